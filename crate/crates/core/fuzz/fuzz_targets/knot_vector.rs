#![no_main]

use approx_c1::spline::KnotVector;
use libfuzzer_sys::fuzz_target;

// first byte: degree; then little-endian f64 knots
fuzz_target!(|data: &[u8]| {
    let Some((&deg, rest)) = data.split_first() else { return };
    let knots: Vec<f64> = rest.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    if let Ok(kv) = KnotVector::from_expanded(deg as usize % 12, &knots) {
        let back = KnotVector::from_expanded(kv.degree(), kv.expanded()).expect("expanded knots parse");
        assert_eq!(back, kv);
    }
});
