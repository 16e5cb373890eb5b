#![no_main]
use convlab::formats::{emit_module, parse_module};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(m) = parse_module(s) {
            let text = emit_module(&m);
            assert_eq!(parse_module(&text).unwrap(), m);
        }
    }
});
