#![no_main]

use libfuzzer_sys::fuzz_target;
use nlqc_core::BoolFn;

// First byte picks the input widths, the rest is the table.
fuzz_target!(|data: &[u8]| {
    let Some((&widths, rest)) = data.split_first() else { return };
    let Ok(hex) = std::str::from_utf8(rest) else { return };
    let (n_x, n_y) = ((widths & 0x0f) as u32, (widths >> 4) as u32);
    if let Ok(f) = BoolFn::from_hex(n_x, n_y, hex) {
        let again = BoolFn::from_hex(n_x, n_y, &f.to_hex()).expect("own hex parses");
        assert_eq!(again.table(), f.table());
    }
});
