#![no_main]
use convlab::formats::{emit_radii, parse_radii};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(x) = parse_radii(s) {
            assert_eq!(parse_radii(&emit_radii(&x)).unwrap(), x);
        }
    }
});
