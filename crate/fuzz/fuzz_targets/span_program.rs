#![no_main]

use libfuzzer_sys::fuzz_target;
use nlqc_core::algebra::SpanProgram;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(program) = SpanProgram::from_json(text) else { return };
    if program.n_vars() <= 8 {
        let z = vec![true; program.n_vars() as usize];
        let _ = program.eval(&z);
    }
    assert!(SpanProgram::from_json(&program.to_json()).is_ok());
});
