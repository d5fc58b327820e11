//! Replays the checked-in fuzz corpus through the parsers. Seeds whose name
//! starts with a rejection marker must fail to load; all others must load.

use std::fs;
use std::path::PathBuf;

use nlqc_core::algebra::{BranchingProgram, SpanProgram};
use nlqc_core::descriptor::{
    build_cdqs, build_cds, build_dre, build_frouting, build_psm, build_psqm, ProtocolDescriptor, ProtocolKind,
};
use nlqc_core::gardenhose::GhStrategy;
use nlqc_core::quantum::state::StateDump;
use nlqc_core::quantum::PureState;
use nlqc_core::BoolFn;

const REJECTED: [&str; 5] = ["mismatch", "bad_digit", "zero_target", "cycle", "unnormalized"];

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            let name = path.file_stem().unwrap().to_string_lossy().into_owned();
            (name, fs::read(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn check(target: &str, load: impl Fn(&[u8]) -> bool) {
    for (name, bytes) in seeds(target) {
        let expect = !REJECTED.iter().any(|r| name.starts_with(r));
        assert_eq!(load(&bytes), expect, "{target}/{name}");
    }
}

fn text(bytes: &[u8]) -> &str {
    std::str::from_utf8(bytes).unwrap()
}

#[test]
fn function_specs() {
    check("fn_spec", |b| BoolFn::from_json(text(b)).is_ok());
}

#[test]
fn hex_tables() {
    check("hex_table", |b| {
        let (n_x, n_y) = ((b[0] & 0x0f) as u32, (b[0] >> 4) as u32);
        BoolFn::from_hex(n_x, n_y, text(&b[1..])).is_ok()
    });
}

#[test]
fn span_programs() {
    check("span_program", |b| SpanProgram::from_json(text(b)).is_ok());
}

#[test]
fn branching_programs() {
    check("branching_program", |b| BranchingProgram::from_json(text(b)).is_ok());
    let (_, chain) = seeds("branching_program").into_iter().find(|(n, _)| n == "chain").unwrap();
    let bp = BranchingProgram::from_json(text(&chain)).unwrap();
    assert!(bp.eval_mod(&[true, true], 2).unwrap());
    assert!(!bp.eval_mod(&[false, true], 2).unwrap());
}

#[test]
fn garden_hose_strategies() {
    check("gh_strategy", |b| GhStrategy::from_json(text(b)).is_ok());
}

#[test]
fn state_dumps() {
    check("state_dump", |b| {
        serde_json::from_slice::<StateDump>(b).ok().and_then(|d| PureState::from_dump(&d).ok()).is_some()
    });
}

/// Every descriptor seed rebuilds into a protocol with the same source and
/// the resources it declares.
#[test]
fn protocol_descriptors_round_trip() {
    for (name, bytes) in seeds("protocol_descriptor") {
        let d = ProtocolDescriptor::from_json(text(&bytes)).unwrap_or_else(|e| panic!("{name}: {e}"));
        let f = d.function().unwrap();
        let (source, resources) = match d.kind {
            ProtocolKind::Cds => {
                let p = build_cds(&d.source, &f).unwrap();
                (p.source(), serde_json::to_value(p.resources()).unwrap())
            }
            ProtocolKind::Psm => {
                let p = build_psm(&d.source, &f).unwrap();
                (p.source(), serde_json::to_value(p.resources()).unwrap())
            }
            ProtocolKind::Dre => {
                let p = build_dre(&d.source, &f).unwrap();
                (p.source(), serde_json::to_value(p.resources()).unwrap())
            }
            ProtocolKind::Cdqs => {
                let p = build_cdqs(&d.source, &f).unwrap();
                (p.source, serde_json::to_value(p.resources).unwrap())
            }
            ProtocolKind::Frouting => {
                let p = build_frouting(&d.source, &f).unwrap();
                (p.source, serde_json::to_value(p.resources).unwrap())
            }
            ProtocolKind::Psqm => {
                let p = build_psqm(&d.source, &f).unwrap();
                (p.source, serde_json::to_value(p.resources).unwrap())
            }
        };
        assert_eq!(source, d.source, "{name}");
        assert_eq!(resources, d.resources, "{name}");
        let again = ProtocolDescriptor::from_json(&d.to_json_pretty()).unwrap();
        assert_eq!(again, d, "{name}");
    }
}

#[test]
fn descriptors_reject_unknown_fields() {
    let (_, bytes) = seeds("protocol_descriptor").into_iter().next().unwrap();
    let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    v["extra"] = serde_json::json!(1);
    assert!(ProtocolDescriptor::from_json(&v.to_string()).is_err());
}
