use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{cdqs, psqm, purified, routing, target_side};
use super::{CdqsKind, CdqsProtocol, FRouting, FRoutingKind, PsqmProtocol, QResources};
use crate::classical::verify::{Witness, DEFAULT_BUDGET};
use crate::error::Result;
use crate::gardenhose::Side;
use crate::quantum::channel::BlockChoi;
use crate::quantum::density::trace_norm;
use crate::quantum::gates::{c, phi_plus};
use crate::quantum::random::{pauli_eigenstates, random_state};
use crate::quantum::{Register, C64};

use super::purified::MessageBound;

/// Tolerance for calling a protocol perfect.
pub const VERDICT_TOL: f64 = 1e-9;

const METRIC: &str = "correctness: max of Choi-state infidelity and worst infidelity over the six \
Pauli eigenstates and the seeded random secrets; security: decoupling gap 1/2 ||J_RM - J_R (x) J_M||_1 of the adversary view; \
raw values without dimension factors";

#[derive(Clone, Copy, Debug)]
pub struct QVerifyOptions {
    /// Cap on enumerated classical states per input.
    pub budget: u64,
    /// Seed for the random secrets of the per-state security sweep.
    pub seed: u64,
    pub random_states: usize,
}

impl Default for QVerifyOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, seed: 0, random_states: 10 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QKind {
    Cdqs,
    Frouting,
    Psqm,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputVerdict {
    pub x: u64,
    pub y: u64,
    pub value: bool,
    pub correctness_infidelity: Option<f64>,
    pub security_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub routed_to: Option<Side>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QVerificationReport {
    pub kind: QKind,
    pub function: String,
    pub worst_correctness_infidelity: f64,
    pub correctness_witness: Option<Witness>,
    pub worst_choi_infidelity: f64,
    pub worst_state_infidelity: f64,
    pub worst_security_gap: f64,
    pub security_witness: Option<Witness>,
    /// Worst per-secret gap `1/2 sum_l ||N_l(psi) - N_l(I/2)||_1` over the
    /// Pauli eigenstates and the seeded random secrets.
    pub worst_state_security_gap: Option<f64>,
    /// Largest difference between per-secret gaps on one input.
    pub state_gap_spread: Option<f64>,
    /// Every routed input ended on the side its function value names.
    pub routing_side_ok: Option<bool>,
    /// Inputs whose adversary view was evaluated.
    pub security_checked: u64,
    pub branches: u64,
    pub resources: QResources,
    pub bound: Option<MessageBound>,
    pub metric: &'static str,
    pub inputs: Vec<InputVerdict>,
}

impl QVerificationReport {
    pub fn is_perfect(&self) -> bool {
        self.worst_correctness_infidelity <= VERDICT_TOL
            && self.worst_security_gap <= VERDICT_TOL
            && self.routing_side_ok != Some(false)
            && self.bound.as_ref().is_none_or(|b| b.ok)
    }
}

/// Who must recover `Q` and whose view must be decoupled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Perspective {
    /// CDQS: the referee recovers on `f = 1` and learns nothing on `f = 0`.
    Referee,
    /// f-routing: the side named by `f` recovers, the other side's view is checked.
    Routing,
}

/// What one simulated input contributes.
#[derive(Clone, Debug, Default)]
pub(crate) struct InputRun {
    /// Choi state on `(Ref, recovered qubit)` averaged over branches.
    pub recovered: Option<DMatrix<C64>>,
    pub view: Option<BlockChoi>,
    pub side: Option<Side>,
    pub branches: u64,
}

/// Choi state when the recovering party holds nothing: a fresh `|0>`.
pub(crate) fn absent_choi() -> DMatrix<C64> {
    let mut j = DMatrix::zeros(4, 4);
    j[(0, 0)] = c(0.5, 0.);
    j[(2, 2)] = c(0.5, 0.);
    j
}

/// `N(rho) = d Tr_R[(rho^T (x) I) J]` for a Choi state on a qubit reference.
pub(crate) fn channel_output(j: &DMatrix<C64>, rho: &DMatrix<C64>) -> DMatrix<C64> {
    let d_out = j.nrows() / 2;
    let mut out = DMatrix::zeros(d_out, d_out);
    for i in 0..2 {
        for k in 0..2 {
            let w = rho[(i, k)] * 2.0;
            if w.norm_sqr() == 0.0 {
                continue;
            }
            out += j.view((i * d_out, k * d_out), (d_out, d_out)) * w;
        }
    }
    out
}

fn projector(psi: &DVector<C64>) -> DMatrix<C64> {
    psi * psi.adjoint()
}

fn secrets(opts: &QVerifyOptions) -> Result<Vec<DVector<C64>>> {
    let mut out: Vec<DVector<C64>> =
        pauli_eigenstates().into_iter().map(|(_, a, b)| DVector::from_vec(vec![a, b])).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_states {
        let s = random_state(vec![Register::qubit("Q")], &mut rng)?;
        out.push(s.amplitudes().clone());
    }
    Ok(out)
}

/// `(Choi infidelity, worst infidelity over the given secrets)` of a recovered channel.
pub(crate) fn recovery_scores(j: &DMatrix<C64>, secrets: &[DVector<C64>]) -> (f64, f64) {
    let phi = phi_plus();
    let choi = (1.0 - (phi.adjoint() * j * &phi)[(0, 0)].re).clamp(0.0, 1.0);
    let state = secrets
        .iter()
        .map(|psi| {
            let out = channel_output(j, &projector(psi));
            (1.0 - (psi.adjoint() * out * psi)[(0, 0)].re).clamp(0.0, 1.0)
        })
        .fold(0.0, f64::max);
    (choi, state)
}

/// Per-secret gaps `1/2 sum_l ||N_l(psi) - Tr_R J_l||_1`.
pub(crate) fn state_gaps(view: &BlockChoi, secrets: &[DVector<C64>]) -> Vec<f64> {
    let mixed: Vec<DMatrix<C64>> =
        view.blocks().values().map(|b| channel_output(b, &(DMatrix::identity(2, 2) * c(0.5, 0.)))).collect();
    secrets
        .iter()
        .map(|psi| {
            let rho = projector(psi);
            let total: f64 =
                view.blocks().values().zip(&mixed).map(|(b, m)| trace_norm(&(channel_output(b, &rho) - m))).sum();
            (0.5 * total).clamp(0.0, 1.0)
        })
        .collect()
}

struct Merge {
    report: QVerificationReport,
}

impl Merge {
    fn new(kind: QKind, function: String, resources: QResources) -> Self {
        Self {
            report: QVerificationReport {
                kind,
                function,
                worst_correctness_infidelity: 0.0,
                correctness_witness: None,
                worst_choi_infidelity: 0.0,
                worst_state_infidelity: 0.0,
                worst_security_gap: 0.0,
                security_witness: None,
                worst_state_security_gap: None,
                state_gap_spread: None,
                routing_side_ok: None,
                security_checked: 0,
                branches: 0,
                resources,
                bound: None,
                metric: METRIC,
                inputs: Vec::new(),
            },
        }
    }

    fn correctness(&mut self, x: u64, y: u64, v: f64) {
        let r = &mut self.report;
        if v > r.worst_correctness_infidelity {
            r.worst_correctness_infidelity = v;
            if v > VERDICT_TOL {
                r.correctness_witness = Some(Witness::Input { x, y });
            }
        }
    }

    fn security(&mut self, v: f64, witness: Witness) {
        let r = &mut self.report;
        r.security_checked += 1;
        if v > r.worst_security_gap {
            r.worst_security_gap = v;
            if v > VERDICT_TOL {
                r.security_witness = Some(witness);
            }
        }
    }

    fn add_run(
        &mut self,
        x: u64,
        y: u64,
        value: bool,
        run: InputRun,
        secrets: &[DVector<C64>],
        perspective: Perspective,
    ) {
        let mut verdict =
            InputVerdict { x, y, value, correctness_infidelity: None, security_gap: None, routed_to: run.side };
        self.report.branches += run.branches;
        if let Some(side) = run.side {
            if perspective == Perspective::Routing {
                let ok = side == target_side(value);
                let prev = self.report.routing_side_ok.unwrap_or(true);
                self.report.routing_side_ok = Some(prev && ok);
            }
        }
        if let Some(j) = &run.recovered {
            let (choi, state) = recovery_scores(j, secrets);
            let r = &mut self.report;
            r.worst_choi_infidelity = r.worst_choi_infidelity.max(choi);
            r.worst_state_infidelity = r.worst_state_infidelity.max(state);
            let worst = choi.max(state);
            verdict.correctness_infidelity = Some(worst);
            self.correctness(x, y, worst);
        }
        if let Some(view) = &run.view {
            let gap = view.gap();
            verdict.security_gap = Some(gap);
            self.security(gap, Witness::Input { x, y });
            let gaps = state_gaps(view, secrets);
            let hi = gaps.iter().copied().fold(0.0, f64::max);
            let lo = gaps.iter().copied().fold(f64::INFINITY, f64::min);
            let r = &mut self.report;
            r.worst_state_security_gap = Some(r.worst_state_security_gap.unwrap_or(0.0).max(hi));
            r.state_gap_spread = Some(r.state_gap_spread.unwrap_or(0.0).max(hi - lo));
        }
        self.report.inputs.push(verdict);
    }
}

/// Runs `sim` on every input in parallel and merges in input order.
fn sweep(
    inputs: Vec<(u64, u64, bool)>,
    sim: impl Fn(u64, u64, bool) -> Result<InputRun> + Sync,
) -> Result<Vec<(u64, u64, bool, InputRun)>> {
    inputs.into_par_iter().map(|(x, y, v)| sim(x, y, v).map(|run| (x, y, v, run))).collect()
}

pub fn verify_cdqs(p: &CdqsProtocol, opts: &QVerifyOptions) -> Result<QVerificationReport> {
    let f = &p.function;
    let secrets = secrets(opts)?;
    let domain: Vec<(u64, u64, bool)> = match &p.kind {
        CdqsKind::OneTimePad { cds, .. } => {
            f.inputs().filter(|&(x, y)| cds.in_domain(x, y)).map(|(x, y)| (x, y, f.at(x, y))).collect()
        }
        CdqsKind::Routing(_) => f.inputs().map(|(x, y)| (x, y, f.at(x, y))).collect(),
    };
    let runs = match &p.kind {
        CdqsKind::OneTimePad { cds, key } => sweep(domain, |x, y, v| cdqs::pad_run(cds, *key, x, y, v, opts))?,
        CdqsKind::Routing(r) => sweep(domain, |x, y, v| routing_run(r, x, y, v, Perspective::Referee, opts))?,
    };
    let mut m = Merge::new(QKind::Cdqs, f.label(), p.resources);
    for (x, y, v, run) in runs {
        m.add_run(x, y, v, run, &secrets, Perspective::Referee);
    }
    if let CdqsKind::Routing(r) = &p.kind {
        m.report.bound = r.bound.clone();
    }
    Ok(m.report)
}

pub(crate) fn routing_run(
    r: &FRouting,
    x: u64,
    y: u64,
    value: bool,
    perspective: Perspective,
    opts: &QVerifyOptions,
) -> Result<InputRun> {
    match &r.kind {
        FRoutingKind::GardenHose { strategy } => routing::gh_run(strategy, x, y, value, perspective),
        FRoutingKind::Purified { cdqs } => purified::purified_run(cdqs, x, y, value, perspective, opts),
        FRoutingKind::Constant(side) => Ok(routing::constant_run(*side, value, perspective)),
    }
}

pub fn verify_frouting(r: &FRouting, opts: &QVerifyOptions) -> Result<QVerificationReport> {
    let f = &r.function;
    let secrets = secrets(opts)?;
    let inputs: Vec<(u64, u64, bool)> = match &r.kind {
        FRoutingKind::Purified { cdqs: CdqsProtocol { kind: CdqsKind::OneTimePad { cds, .. }, .. } } => {
            f.inputs().filter(|&(x, y)| cds.in_domain(x, y)).map(|(x, y)| (x, y, f.at(x, y))).collect()
        }
        _ => f.inputs().map(|(x, y)| (x, y, f.at(x, y))).collect(),
    };
    let runs = sweep(inputs, |x, y, v| routing_run(r, x, y, v, Perspective::Routing, opts))?;
    let mut m = Merge::new(QKind::Frouting, f.label(), r.resources);
    for (x, y, v, run) in runs {
        m.add_run(x, y, v, run, &secrets, Perspective::Routing);
    }
    m.report.bound = r.bound.clone();
    Ok(m.report)
}

pub fn verify_psqm(p: &PsqmProtocol, opts: &QVerifyOptions) -> Result<QVerificationReport> {
    let scores = psqm::psqm_scores(p, opts)?;
    let mut m = Merge::new(QKind::Psqm, p.function.label(), p.resources);
    for (x, y, value, infidelity) in &scores.correctness {
        m.correctness(*x, *y, *infidelity);
        m.report.inputs.push(InputVerdict {
            x: *x,
            y: *y,
            value: *value,
            correctness_infidelity: Some(*infidelity),
            security_gap: None,
            routed_to: None,
        });
    }
    m.report.worst_state_infidelity = m.report.worst_correctness_infidelity;
    for (gap, witness) in scores.pairs {
        m.security(gap, witness);
    }
    Ok(m.report)
}
