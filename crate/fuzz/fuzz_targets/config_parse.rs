#![no_main]

use dipole_squeeze_scenarios::config::parse;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(cfg) = parse(s) {
            let text = cfg.to_text();
            let back = parse(&text).expect("canonical text parses");
            assert_eq!(back, cfg);
            assert_eq!(back.to_text(), text);
        }
    }
});
