use std::sync::Arc;

use nlqc_core::algebra::span::library as spans;
use nlqc_core::boolfn::{self, BoolFn};
use nlqc_core::classical::cds::{cds_from_gh, cds_from_span, cds_parallel, SpanVariant};
use nlqc_core::classical::dre::dre_qr;
use nlqc_core::classical::psm::{psm_from_dre, psm_generic_table, ClosurePsm};
use nlqc_core::classical::{Coin, Psm, Resources};
use nlqc_core::descriptor::KeyPolicy;
use nlqc_core::gardenhose::{gh_generic, library, Side};
use nlqc_core::nlqc::*;
use smallvec::smallvec;

const TOL: f64 = 1e-9;

fn opts() -> QVerifyOptions {
    QVerifyOptions::default()
}

fn gh_cdqs(f: &BoolFn) -> CdqsProtocol {
    let strategy = match f.label().as_str() {
        "and1x1" => library::and1(),
        "xor1x1" => library::xor1(),
        _ => gh_generic(f).unwrap(),
    };
    cdqs_from_cds(cds_parallel(cds_from_gh(&strategy, f).unwrap(), 2).unwrap()).unwrap()
}

fn assert_perfect(r: &QVerificationReport) {
    assert!(r.worst_correctness_infidelity <= TOL, "{r:#?}");
    assert!(r.worst_security_gap <= TOL, "{r:#?}");
    assert!(r.is_perfect(), "{r:#?}");
}

#[test]
fn pad_cdqs_from_perfect_cds_is_perfect() {
    let eq = boolfn::eq(1);
    let eq_cds = cds_from_span(&spans::eq1(), &eq, SpanVariant::CommOpt).unwrap();
    let protocols = vec![
        gh_cdqs(&boolfn::and(1)),
        gh_cdqs(&boolfn::xor(1)),
        cdqs_from_cds(cds_parallel(eq_cds, 2).unwrap()).unwrap(),
    ];
    for p in &protocols {
        let r = verify_cdqs(p, &opts()).unwrap();
        assert_perfect(&r);
        assert!(r.worst_state_security_gap.unwrap() <= TOL);
        assert!(r.state_gap_spread.unwrap() <= TOL);
        assert_eq!(r.resources.key_bits, 2);
        assert_eq!(r.inputs.len(), 4);
    }
}

#[test]
fn fixed_key_is_insecure() {
    let f = boolfn::and(1);
    let cds = cds_parallel(cds_from_gh(&library::and1(), &f).unwrap(), 2).unwrap();
    let p = cdqs_from_cds_with_key(cds, KeyPolicy::Fixed(2)).unwrap();
    let r = verify_cdqs(&p, &opts()).unwrap();
    assert!(r.worst_correctness_infidelity <= TOL);
    assert!((r.worst_security_gap - 0.75).abs() < 1e-9, "{}", r.worst_security_gap);
    assert!(r.security_witness.is_some());
    assert!(!r.is_perfect());
}

#[test]
fn one_bit_cds_is_rejected() {
    let f = boolfn::and(1);
    let cds = cds_from_gh(&library::and1(), &f).unwrap();
    assert!(cdqs_from_cds(cds).is_err());
}

#[test]
fn garden_hose_routings_are_perfect() {
    let and = boolfn::and(1);
    let xor = boolfn::xor(1);
    for (r, pipes) in [
        (frouting_from_gh(&library::and1(), &and).unwrap(), 3),
        (frouting_from_gh(&library::xor1(), &xor).unwrap(), 3),
        (frouting_from_gh(&gh_generic(&and).unwrap(), &and).unwrap(), 4),
    ] {
        assert_eq!(r.resources.epr_pairs, pipes);
        let rep = verify_frouting(&r, &opts()).unwrap();
        assert_perfect(&rep);
        assert_eq!(rep.routing_side_ok, Some(true));
        for v in &rep.inputs {
            assert_eq!(v.routed_to, Some(target_side(v.value)));
        }
        let back = verify_cdqs(&cdqs_from_frouting(&r), &opts()).unwrap();
        assert_perfect(&back);
        assert_eq!(back.resources, r.resources);
    }
}

#[test]
fn routing_to_bob_always_fails_on_zero_inputs() {
    let f = boolfn::xor(1);
    let r = frouting_constant(&f, Side::Right);
    let rep = verify_frouting(&r, &opts()).unwrap();
    assert!(rep.worst_correctness_infidelity > 0.99, "{}", rep.worst_correctness_infidelity);
    assert_eq!(rep.routing_side_ok, Some(false));
    let cdqs = verify_cdqs(&cdqs_from_frouting(&r), &opts()).unwrap();
    assert!(cdqs.worst_correctness_infidelity <= TOL);
    assert!((cdqs.worst_security_gap - 0.75).abs() < 1e-9);
}

#[test]
fn purified_pad_routing_recovers_on_both_sides() {
    for f in [boolfn::and(1), boolfn::xor(1)] {
        let p = gh_cdqs(&f);
        let r = frouting_from_cdqs(&p).unwrap();
        let bound = r.bound.clone().unwrap();
        assert!(bound.ok && bound.used <= bound.limit, "{bound:?}");
        let rep = verify_frouting(&r, &opts()).unwrap();
        assert_perfect(&rep);
        let back = cdqs_from_frouting(&r);
        let rep = verify_cdqs(&back, &opts()).unwrap();
        assert_perfect(&rep);
    }
}

#[test]
fn purified_two_sided_keying_recovers() {
    let f = boolfn::and(1);
    let psqm = psqm_from_psm(psm_generic_table(&f).unwrap());
    let p = cdqs_from_psqm(&psqm).unwrap();
    let r = frouting_from_cdqs(&p).unwrap();
    assert_perfect(&verify_frouting(&r, &opts()).unwrap());
}

#[test]
fn psqm_from_perfect_psm_is_perfect() {
    let and = boolfn::and(1);
    let p = psqm_from_psm(psm_generic_table(&and).unwrap());
    assert_perfect(&verify_psqm(&p, &opts()).unwrap());
    let qr = psqm_from_psm(psm_from_dre(dre_qr(7, None).unwrap()));
    assert_perfect(&verify_psqm(&qr, &opts()).unwrap());
}

fn noisy_and_psm() -> Psm {
    // the decoder flips its answer when both noise bits are 1
    let f = boolfn::and(1);
    Arc::new(ClosurePsm {
        name: "noisy".into(),
        f,
        coins: vec![Coin::shared(2), Coin::shared(2)],
        alice: Box::new(|x, _r| smallvec![x as u32]),
        bob: Box::new(|y, r| smallvec![y as u32, (r[0] & r[1]) as u32]),
        decode: Box::new(|a, b| (a[0] & b[0] ^ b[1]) as u64),
        resources: Resources {
            shared_random_bits: 2,
            alice_message_bits: 1,
            bob_message_bits: 2,
            ..Resources::default()
        },
    })
}

#[test]
fn noisy_psm_gives_bounded_psqm_error() {
    let p = psqm_from_psm(noisy_and_psm());
    let r = verify_psqm(&p, &opts()).unwrap();
    assert!((r.worst_correctness_infidelity - 0.25).abs() < 1e-12);
    assert!(r.worst_correctness_infidelity <= 2.0 * 0.25f64.sqrt());
    // x is sent in the clear, so (0, 0) and (1, 0) are told apart
    assert!((r.worst_security_gap - 1.0).abs() < 1e-12);
}

#[test]
fn cdqs_from_psqm_is_perfect() {
    for f in [boolfn::and(1), boolfn::xor(1)] {
        let psqm = psqm_from_psm(psm_generic_table(&f).unwrap());
        let p = cdqs_from_psqm(&psqm).unwrap();
        let r = verify_cdqs(&p, &opts()).unwrap();
        assert_perfect(&r);
        let inner = psqm.resources;
        assert_eq!(r.resources.random_bits, 2 * inner.random_bits);
        assert_eq!(r.resources.message_qubits, 2 * inner.message_qubits + 1);
    }
    let constant = BoolFn::constant(1, 1, true).unwrap();
    let psqm = psqm_from_psm(psm_generic_table(&constant).unwrap());
    assert_perfect(&verify_cdqs(&cdqs_from_psqm(&psqm).unwrap(), &opts()).unwrap());
}

#[test]
fn purified_fixed_key_cannot_be_rebuilt_on_alice_side() {
    let f = boolfn::and(1);
    let cds = cds_parallel(cds_from_gh(&library::and1(), &f).unwrap(), 2).unwrap();
    let p = cdqs_from_cds_with_key(cds, KeyPolicy::Fixed(1)).unwrap();
    let rep = verify_frouting(&frouting_from_cdqs(&p).unwrap(), &opts()).unwrap();
    assert!(rep.worst_correctness_infidelity > 0.4, "{}", rep.worst_correctness_infidelity);
    assert!(rep.worst_security_gap > 0.5);
    let w = rep.correctness_witness.unwrap();
    assert!(matches!(w, nlqc_core::classical::verify::Witness::Input { x, y } if !f.at(x, y)));
}
