#![no_main]

use libfuzzer_sys::fuzz_target;
use noethkit::algebra::{parse_poly, Arena};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let arena = Arena::with_eps(3, 2);
    if let Ok(p) = parse_poly(text, &arena) {
        // printing must parse back to the same polynomial
        let back = parse_poly(&p.to_string(), &arena).expect("printed polynomial reparses");
        assert_eq!(back, p);
    }
});
