#![no_main]

use libfuzzer_sys::fuzz_target;
use polydirich::harness::CheckId;
use polydirich::io::{parse_complex, parse_degree, parse_param, parse_point, parse_weight};
use polydirich::FamilyId;

fuzz_target!(|data: &[u8]| {
    let Some((&sel, rest)) = data.split_first() else {
        return;
    };
    let s = String::from_utf8_lossy(rest);
    match sel % 7 {
        0 => {
            let _ = parse_complex(&s);
        }
        1 => {
            if let Ok(w) = parse_weight(&s) {
                assert!(w.is_finite());
            }
        }
        2 => {
            let _ = parse_degree(&s);
        }
        3 => {
            if let Ok((z, w)) = parse_point(&s) {
                assert!(z.re.is_finite() && z.im.is_finite() && w.re.is_finite() && w.im.is_finite());
            }
        }
        4 => {
            if let Ok((k, _)) = parse_param(&s) {
                assert!(!k.is_empty());
            }
        }
        5 => {
            let _ = s.parse::<FamilyId>();
        }
        _ => {
            let _ = s.parse::<CheckId>();
        }
    }
});
