#![no_main]

use libfuzzer_sys::fuzz_target;
use nlqc_core::quantum::state::StateDump;
use nlqc_core::quantum::PureState;

fuzz_target!(|data: &[u8]| {
    let Ok(dump) = serde_json::from_slice::<StateDump>(data) else { return };
    if let Ok(psi) = PureState::from_dump(&dump) {
        let again = PureState::from_dump(&psi.dump()).expect("own dump loads");
        assert_eq!(again.dim(), psi.dim());
    }
});
