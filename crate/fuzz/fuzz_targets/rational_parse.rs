#![no_main]

use dedekind_core::ExactRational;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = s.parse::<ExactRational>() {
        let back: ExactRational = r.to_string().parse().expect("rendered rational reparses");
        assert_eq!(back, r);
    }
});
