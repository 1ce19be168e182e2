#![no_main]

use dipole_squeeze_scenarios::config::{parse_range, GridSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(g) = s.parse::<GridSpec>() {
            assert_eq!(g.to_string().parse::<GridSpec>(), Ok(g));
            assert_eq!(g.values().len(), g.count);
        }
        if let Ok(v) = parse_range(s) {
            assert!(v.windows(2).all(|w| w[0] < w[1]));
        }
    }
});
