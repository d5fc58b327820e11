//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test -p nlqc-cli --test acceptance -- --nocapture` to see them.

use std::time::{Duration, Instant};

use nlqc_cli::sweep::{run_sweep, to_csv, Family, SweepConfig, QR_PRIMES};
use nlqc_core::algebra::span::library;
use nlqc_core::algebra::LsssScheme;
use nlqc_core::boolfn::{self, BoolFn};
use nlqc_core::classical::cds::{cds_from_gh, cds_from_psm, cds_from_span, cds_parallel, SpanVariant};
use nlqc_core::classical::dre::dre_qr;
use nlqc_core::classical::psm::{psm_from_dre, psm_generic_table};
use nlqc_core::classical::{verify_cds, verify_dre, verify_psm, VerifyOptions};
use nlqc_core::gardenhose::{gh_search, GhStrategy};
use nlqc_core::nlqc::{
    cdqs_from_cds, cdqs_from_frouting, cdqs_from_psqm, frouting_from_cdqs, frouting_from_gh, otp_reconstruct_left,
    psqm_from_psm, target_side, verify_cdqs, verify_frouting, verify_psqm, QVerificationReport, QVerifyOptions,
};
use nlqc_core::quantum::pauli::key_bits;
use nlqc_core::quantum::random::{random_density, random_state};
use nlqc_core::quantum::{fidelity, pad_average, pad_key, trace_distance, MeasureMode, PureState, Register};
use nlqc_core::quantum::{SparseState, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const QUANTUM_TOL: f64 = 1e-9;
const PAD_TOL: f64 = 1e-12;
const FVDG_TOL: f64 = 1e-9;
const BELL_TOL: f64 = 1e-10;
const ONE_BIT_LIMIT: Duration = Duration::from_secs(30);
const QR_LIMIT: Duration = Duration::from_secs(10);

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e(err: impl std::fmt::Display) -> String {
    err.to_string()
}

fn quantum_perfect(r: &QVerificationReport, what: &str) -> Result<(), String> {
    ensure(
        r.worst_correctness_infidelity <= QUANTUM_TOL && r.worst_security_gap <= QUANTUM_TOL,
        format!("{what}: infidelity {:e}, gap {:e}", r.worst_correctness_infidelity, r.worst_security_gap),
    )
}

/// Minimal strategies for all 16 one-bit functions.
fn one_bit_strategies() -> Result<Vec<(BoolFn, GhStrategy)>, String> {
    (0..16)
        .map(|bits| {
            let f = BoolFn::from_bits(1, 1, bits).map_err(e)?;
            let s = gh_search(&f, 3).map_err(e)?.ok_or(format!("no strategy for {}", f.label()))?;
            Ok((f, s))
        })
        .collect()
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let opts = VerifyOptions::default();
    let mut worst = 0;
    for (f, s) in one_bit_strategies()? {
        worst = worst.max(s.pipes());
        let rep = verify_cds(&*cds_from_gh(&s, &f).map_err(e)?, &opts).map_err(e)?;
        ensure(
            rep.eps_hat.is_zero() && rep.delta_pair.is_zero(),
            format!("{}: eps {:?} delta {:?}", f.label(), rep.eps_hat, rep.delta_pair),
        )?;
    }
    let took = start.elapsed();
    ensure(took < ONE_BIT_LIMIT, format!("took {took:?}"))?;
    Ok(format!("16 functions, max {worst} pipes, {took:.2?}"))
}

fn criterion_2() -> Check {
    for f in [boolfn::and(1), boolfn::xor(1)] {
        let s = gh_search(&f, 3).map_err(e)?.ok_or(format!("{} not found within 3 pipes", f.label()))?;
        ensure(s.pipes() == 3, format!("{} found with {} pipes", f.label(), s.pipes()))?;
        ensure(gh_search(&f, 2).map_err(e)?.is_none(), format!("{} has a 2-pipe strategy", f.label()))?;
    }
    Ok("GH(AND1) = GH(XOR1) = 3, no strategy with 1 or 2 pipes".into())
}

fn criterion_3() -> Check {
    let mut all = one_bit_strategies()?;
    for f in [boolfn::and(1), boolfn::xor(1)] {
        let s = gh_search(&f, 3).map_err(e)?.ok_or("missing strategy")?;
        all.push((f, s));
    }
    for (f, s) in &all {
        let r = cds_from_gh(s, f).map_err(e)?.resources();
        ensure(
            r.shared_random_bits == s.pipes() as u64 && r.private_random_bits == 0,
            format!("{}: {} random bits for {} pipes", f.label(), r.shared_random_bits, s.pipes()),
        )?;
    }
    Ok(format!("{} compiled CDS, randomness = pipes", all.len()))
}

fn criterion_4() -> Check {
    let opts = VerifyOptions::default();
    let mut checked = 0;
    for p in [2, 3] {
        let programs = [
            (boolfn::and(1), library::and1_over(p)),
            (boolfn::or(1), library::or1_over(p)),
            (boolfn::eq(1), library::eq1_over(p)),
            (boolfn::threshold(1, 2, 2), library::threshold_2_of_3(p)),
        ];
        for (f, program) in programs {
            let program = program.map_err(e)?;
            let share = LsssScheme::new(program.clone()).total_share_bits();
            for variant in [SpanVariant::CommOpt, SpanVariant::RandOpt] {
                let cds = cds_from_span(&program, &f, variant).map_err(e)?;
                let rep = verify_cds(&*cds, &opts).map_err(e)?;
                let tag = format!("{} over Z_{p} {variant:?}", f.label());
                ensure(rep.is_perfect(), format!("{tag}: not perfect"))?;
                let r = cds.resources();
                match variant {
                    SpanVariant::CommOpt => ensure(
                        r.communication_bits() <= share,
                        format!("{tag}: {} communication bits > {share}", r.communication_bits()),
                    )?,
                    SpanVariant::RandOpt => ensure(
                        r.shared_random_bits + r.private_random_bits <= share,
                        format!("{tag}: randomness over {share}"),
                    )?,
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} span CDS perfect within share-size accounting"))
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let opts = VerifyOptions::default();
    for p in QR_PRIMES {
        let rep = verify_dre(&dre_qr(p, None).map_err(e)?, &opts).map_err(e)?;
        ensure(
            rep.eps_hat.is_zero() && rep.delta_pair.is_zero(),
            format!("p = {p}: eps {:?} delta {:?}", rep.eps_hat, rep.delta_pair),
        )?;
    }
    let took = start.elapsed();
    ensure(took < QR_LIMIT, format!("took {took:?}"))?;
    Ok(format!("p in {QR_PRIMES:?}, exact, {took:.2?}"))
}

fn criterion_6() -> Check {
    let opts = QVerifyOptions::default();
    ensure(opts.random_states == 10, "expected 10 random secrets")?;
    for f in [boolfn::and(1), boolfn::xor(1), boolfn::eq(1)] {
        let s = gh_search(&f, 3).map_err(e)?.ok_or("missing strategy")?;
        let cdqs = cdqs_from_cds(cds_parallel(cds_from_gh(&s, &f).map_err(e)?, 2).map_err(e)?).map_err(e)?;
        let rep = verify_cdqs(&cdqs, &opts).map_err(e)?;
        quantum_perfect(&rep, &f.label())?;
        ensure(
            rep.worst_state_security_gap.is_some_and(|g| g <= QUANTUM_TOL),
            format!("{}: per-secret gap {:?}", f.label(), rep.worst_state_security_gap),
        )?;
    }
    Ok("AND1, XOR1, EQ1 pad CDQS within 1e-9 (6 eigenstates + 10 random secrets)".into())
}

fn criterion_7() -> Check {
    let f = boolfn::and(1);
    let s = gh_search(&f, 3).map_err(e)?.ok_or("missing strategy")?;
    let r = frouting_from_gh(&s, &f).map_err(e)?;
    ensure(r.resources.epr_pairs == 3, format!("{} EPR pairs", r.resources.epr_pairs))?;
    let rep = verify_frouting(&r, &QVerifyOptions::default()).map_err(e)?;
    quantum_perfect(&rep, "AND1 routing")?;
    ensure(rep.branches <= 4 * 64, format!("{} branches", rep.branches))?;
    for v in &rep.inputs {
        ensure(v.routed_to == Some(target_side(v.value)), format!("({}, {}) routed to {:?}", v.x, v.y, v.routed_to))?;
    }
    Ok(format!("{} branches in total over 4 inputs, sides match f", rep.branches))
}

/// `1/2 sum_s |s>_{a1 a2} P^s |psi>_Q` as a sparse state.
fn padded(psi: (C64, C64)) -> Result<SparseState, String> {
    let regs = vec![Register::qubit("a1"), Register::qubit("a2"), Register::qubit("Q")];
    let mut terms = Vec::new();
    for s in 0..4 {
        let (s1, s2) = key_bits(s);
        let p = pad_key((s1, s2));
        for q in 0..2 {
            let amp = (p[(q, 0)] * psi.0 + p[(q, 1)] * psi.1) * 0.5;
            terms.push((vec![s1 as u32, s2 as u32, q as u32], amp));
        }
    }
    SparseState::from_terms(regs, terms).map_err(e)
}

fn criterion_8() -> Check {
    let f = boolfn::and(1);
    let s = gh_search(&f, 3).map_err(e)?.ok_or("missing strategy")?;
    let pad = cdqs_from_cds(cds_parallel(cds_from_gh(&s, &f).map_err(e)?, 2).map_err(e)?).map_err(e)?;
    let opts = QVerifyOptions::default();
    quantum_perfect(&verify_cdqs(&pad, &opts).map_err(e)?, "pad CDQS")?;
    let routing = frouting_from_cdqs(&pad).map_err(e)?;
    quantum_perfect(&verify_frouting(&routing, &opts).map_err(e)?, "purified routing")?;
    let back = cdqs_from_frouting(&routing);
    quantum_perfect(&verify_cdqs(&back, &opts).map_err(e)?, "round-trip CDQS")?;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 1.0;
    for _ in 0..20 {
        let psi = random_state(vec![Register::qubit("Q")], &mut rng).map_err(e)?;
        let a = psi.amplitudes();
        let (a0, a1) = (a[0], a[1]);
        let mut st = padded((a0, a1))?;
        otp_reconstruct_left(&mut st, "a1", "a2").map_err(e)?;
        let target = PureState::qubit("a2", a0, a1).map_err(e)?;
        let fid = st.reduced(&["a2"]).map_err(e)?.expectation(&target).map_err(e)?;
        worst = worst.min(fid);
    }
    ensure(worst >= 1.0 - QUANTUM_TOL, format!("reconstruction fidelity {worst}"))?;
    Ok(format!("round trip within 1e-9, reconstruction fidelity >= {worst:.12} on 20 random secrets"))
}

fn criterion_9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pad_err: f64 = 0.0;
    for _ in 0..100 {
        let rho = random_density(vec![Register::qubit("Q")], &mut rng).map_err(e)?;
        let avg = pad_average(&rho, "Q").map_err(e)?;
        let m = avg.matrix();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 0.5 } else { 0.0 };
                pad_err = pad_err.max((m[(i, j)] - C64::new(want, 0.0)).norm());
            }
        }
    }
    ensure(pad_err <= PAD_TOL, format!("pad average off by {pad_err:e}"))?;

    let regs = || vec![Register::qubit("A"), Register::qubit("B")];
    for k in 0..100 {
        let rho = random_density(regs(), &mut rng).map_err(e)?;
        let sigma = random_density(regs(), &mut rng).map_err(e)?;
        let fid = fidelity(&rho, &sigma).map_err(e)?;
        let t = trace_distance(&rho, &sigma).map_err(e)?;
        ensure(
            1.0 - fid.sqrt() <= t + FVDG_TOL && t <= (1.0 - fid).sqrt() + FVDG_TOL,
            format!("sample {k}: F = {fid}, T = {t}"),
        )?;
    }

    let mut bell_err: f64 = 0.0;
    for _ in 0..1000 {
        let psi = random_state(vec![Register::qubit("A"), Register::qubit("B"), Register::qubit("C")], &mut rng)
            .map_err(e)?;
        let total: f64 =
            psi.bell_measure("A", "B", MeasureMode::Branches).map_err(e)?.iter().map(|b| b.probability).sum();
        bell_err = bell_err.max((total - 1.0).abs());
    }
    ensure(bell_err <= BELL_TOL, format!("Bell probabilities off by {bell_err:e}"))?;
    Ok(format!("pad {pad_err:.1e}, FvdG 100 pairs, Bell completeness {bell_err:.1e}"))
}

fn criterion_10() -> Check {
    let opts = VerifyOptions::default();
    let qopts = QVerifyOptions::default();
    let psm = psm_from_dre(dre_qr(7, None).map_err(e)?);
    ensure(verify_psm(&*psm, &opts).map_err(e)?.is_perfect(), "QR7 PSM")?;
    let cds = cds_from_psm(psm.clone()).map_err(e)?;
    ensure(verify_cds(&*cds, &opts).map_err(e)?.is_perfect(), "QR7 CDS")?;
    let psqm = psqm_from_psm(psm);
    quantum_perfect(&verify_psqm(&psqm, &qopts).map_err(e)?, "QR7 PSQM")?;
    quantum_perfect(&verify_cdqs(&cdqs_from_psqm(&psqm).map_err(e)?, &qopts).map_err(e)?, "QR7 CDQS via PSQM")?;
    let pad = cdqs_from_cds(cds_parallel(cds, 2).map_err(e)?).map_err(e)?;
    quantum_perfect(&verify_cdqs(&pad, &qopts).map_err(e)?, "QR7 CDQS via CDS")?;
    for f in [boolfn::and(1), boolfn::index(1).map_err(e)?] {
        let rep = verify_psm(&*psm_generic_table(&f).map_err(e)?, &opts).map_err(e)?;
        ensure(rep.is_perfect(), format!("table PSM for {}", f.label()))?;
    }
    Ok("QR7 PSM, CDS, PSQM and both CDQS perfect; table PSM for AND1 and INDEX1 perfect".into())
}

fn criterion_11() -> Check {
    for family in [Family::OneBit, Family::Qr] {
        let cfg = SweepConfig { family, max_pipes: 3, budget: 1 << 24, seed: 11, limit: None };
        let a = run_sweep(&cfg).map_err(e)?;
        let b = run_sweep(&cfg).map_err(e)?;
        let (ja, jb) = (serde_json::to_string(&a).map_err(e)?, serde_json::to_string(&b).map_err(e)?);
        ensure(ja == jb, format!("{family:?}: JSON reports differ"))?;
        ensure(to_csv(&a).map_err(e)? == to_csv(&b).map_err(e)?, format!("{family:?}: CSV reports differ"))?;
    }
    Ok("one-bit and QR sweeps byte-identical across runs".into())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("one-bit sweep", criterion_1),
        ("garden-hose complexity of AND1 and XOR1", criterion_2),
        ("CDS randomness equals pipes", criterion_3),
        ("span-program CDS", criterion_4),
        ("QR encoding", criterion_5),
        ("pad CDQS", criterion_6),
        ("garden-hose routing", criterion_7),
        ("CDQS / routing round trip", criterion_8),
        ("quantum toolkit", criterion_9),
        ("encoding to PSM to CDS/PSQM to CDQS", criterion_10),
        ("determinism", criterion_11),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
