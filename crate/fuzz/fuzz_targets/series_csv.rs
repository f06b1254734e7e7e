#![no_main]

use libfuzzer_sys::fuzz_target;
use polydirich::io::{parse_series_csv, read_series_csv, series_to_csv_string};

fuzz_target!(|data: &[u8]| {
    if let Ok(f) = read_series_csv(data) {
        // anything accepted must survive a write/read cycle unchanged
        let back = parse_series_csv(&series_to_csv_string(&f)).expect("own output parses");
        assert_eq!(back, f);
    }
});
