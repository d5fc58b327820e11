#![no_main]

use libfuzzer_sys::fuzz_target;
use nlqc_core::gardenhose::GhStrategy;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(s) = GhStrategy::from_json(text) else { return };
    // Flow must terminate for every input.
    for x in 0..(1u64 << s.n_x()).min(16) {
        for y in 0..(1u64 << s.n_y()).min(16) {
            let _ = s.eval(x, y);
        }
    }
    assert!(GhStrategy::from_json(&s.to_json()).is_ok());
});
