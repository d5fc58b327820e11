#![no_main]

use libfuzzer_sys::fuzz_target;
use nlqc_core::BoolFn;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = BoolFn::from_json(text) {
        let again = BoolFn::from_json(&f.to_json()).expect("serialized function parses");
        assert_eq!(again.table(), f.table());
    }
});
