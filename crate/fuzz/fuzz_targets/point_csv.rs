#![no_main]

use libfuzzer_sys::fuzz_target;
use noethkit::chainfile::parse_point_csv;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(v) = parse_point_csv(text) {
        assert_eq!(v.len(), text.trim().split(',').count());
    }
});
