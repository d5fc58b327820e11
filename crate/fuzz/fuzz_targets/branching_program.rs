#![no_main]

use libfuzzer_sys::fuzz_target;
use nlqc_core::algebra::BranchingProgram;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(bp) = BranchingProgram::from_json(text) else { return };
    if bp.n_vars() <= 16 {
        let _ = bp.eval_mod(&vec![false; bp.n_vars() as usize], 2);
        let _ = bp.eval_mod(&vec![true; bp.n_vars() as usize], 3);
    }
});
