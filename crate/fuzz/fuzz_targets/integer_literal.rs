#![no_main]

use dedekind_core::literal::{format_integer, parse_integer};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(n) = parse_integer(s) {
        assert_eq!(parse_integer(&format_integer(n)).ok(), Some(n));
    }
});
