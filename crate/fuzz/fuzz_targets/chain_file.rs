#![no_main]

use libfuzzer_sys::fuzz_target;
use noethkit::chainfile::parse_chain_file;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(loaded) = parse_chain_file(text) {
        let width = loaded.chain.n() + loaded.chain.m();
        for p in loaded.points.values() {
            assert_eq!(p.coords.len(), width);
        }
    }
});
