#![no_main]

use libfuzzer_sys::fuzz_target;
use nlqc_core::descriptor::{
    build_cdqs, build_cds, build_dre, build_frouting, build_psm, build_psqm, ProtocolDescriptor, ProtocolKind,
};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(d) = ProtocolDescriptor::from_json(text) else { return };
    let Ok(f) = d.function() else { return };
    if f.n_x() + f.n_y() > 6 {
        return;
    }
    let _ = match d.kind {
        ProtocolKind::Cds => build_cds(&d.source, &f).map(drop),
        ProtocolKind::Psm => build_psm(&d.source, &f).map(drop),
        ProtocolKind::Dre => build_dre(&d.source, &f).map(drop),
        ProtocolKind::Cdqs => build_cdqs(&d.source, &f).map(drop),
        ProtocolKind::Frouting => build_frouting(&d.source, &f).map(drop),
        ProtocolKind::Psqm => build_psqm(&d.source, &f).map(drop),
    };
});
