#![no_main]

use dedekind_core::survey::Checkpoint;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(c) = Checkpoint::from_json(s) {
        let back = Checkpoint::from_json(&c.to_json()).expect("encoded checkpoint decodes");
        assert_eq!(back, c);
    }
});
