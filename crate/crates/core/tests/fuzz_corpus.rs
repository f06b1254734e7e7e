//! Replays the fuzz corpus seeds through the parser entry points.

use std::fs;
use std::path::PathBuf;

use polydirich::harness::{CheckId, SuiteConfig};
use polydirich::io::{parse_complex, parse_degree, parse_param, parse_point, parse_series_csv, parse_weight, read_series_csv, series_to_csv_string};
use polydirich::FamilyId;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn series_csv_seeds() {
    for (name, data) in seeds("series_csv") {
        let r = read_series_csv(data.as_slice());
        let expect_ok = !matches!(name.as_str(), "duplicate" | "nonfinite" | "short_header");
        assert_eq!(r.is_ok(), expect_ok, "{name}: {r:?}");
        if let Ok(f) = r {
            assert_eq!(parse_series_csv(&series_to_csv_string(&f)).unwrap(), f);
        }
    }
}

#[test]
fn cli_arg_seeds() {
    for (name, data) in seeds("cli_args") {
        let s = String::from_utf8_lossy(&data[1..]).into_owned();
        let ok = match data[0] % 7 {
            0 => parse_complex(&s).is_ok(),
            1 => parse_weight(&s).is_ok(),
            2 => parse_degree(&s).is_ok(),
            3 => parse_point(&s).is_ok(),
            4 => parse_param(&s).is_ok(),
            5 => s.parse::<FamilyId>().is_ok(),
            _ => s.parse::<CheckId>().is_ok(),
        };
        assert!(ok, "{name}");
    }
}

#[test]
fn suite_config_seeds() {
    for (name, data) in seeds("suite_config") {
        let r = SuiteConfig::from_toml_str(std::str::from_utf8(&data).unwrap());
        assert_eq!(r.is_ok(), name != "unknown_check", "{name}: {r:?}");
    }
}
