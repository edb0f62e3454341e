#![no_main]

use dedekind_core::survey::read_records;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = read_records(data) {
        for r in &rows {
            r.validate().expect("decoded rows are validated");
        }
    }
});
