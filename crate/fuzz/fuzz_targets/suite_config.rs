#![no_main]

use libfuzzer_sys::fuzz_target;
use polydirich::harness::SuiteConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = SuiteConfig::from_toml_str(text) {
            cfg.check_ids().expect("validated on parse");
        }
    }
});
