#![no_main]
use convlab::formats::{emit_profile_json, parse_profile};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(x) = parse_profile(s) {
            assert_eq!(parse_profile(&emit_profile_json(&x)).unwrap(), x);
        }
    }
});
