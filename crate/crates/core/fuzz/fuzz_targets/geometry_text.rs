#![no_main]

use approx_c1::geometry::{parse_geometry, save_geometry};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(domain) = parse_geometry(text) {
        // anything accepted must survive a round trip
        let again = parse_geometry(&save_geometry(&domain)).expect("saved geometry parses");
        assert_eq!(again.patches(), domain.patches());
    }
});
