use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::verify::{absent_choi, InputRun, Perspective};
use super::{target_side, FRouting, FRoutingKind, QResources};
use crate::boolfn::BoolFn;
use crate::descriptor::Source;
use crate::error::{budget, invalid, Result};
use crate::gardenhose::{Dir, GhStrategy, Hop, Side};
use crate::quantum::channel::BlockChoi;
use crate::quantum::gates::phi_plus;
use crate::quantum::pauli::PauliString;
use crate::quantum::state::{MeasureMode, PureState};
use crate::quantum::QUBIT_BUDGET;

/// Where a Bell measurement of a garden-hose routing happens. Pipes are
/// 0-indexed; pairs are stored with the smaller pipe first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellSite {
    /// Alice measures `Q` with her half of the tapped pipe.
    Tap {
        pipe: u32,
    },
    Alice {
        a: u32,
        b: u32,
    },
    Bob {
        a: u32,
        b: u32,
    },
}

impl BellSite {
    fn alice(i: u32, j: u32) -> Self {
        BellSite::Alice { a: i.min(j), b: i.max(j) }
    }

    fn bob(i: u32, j: u32) -> Self {
        BellSite::Bob { a: i.min(j), b: i.max(j) }
    }
}

/// The Bell measurements the qubit passes through, in order.
pub fn path_sites(path: &[Hop]) -> Vec<BellSite> {
    let Some(first) = path.first() else {
        return Vec::new();
    };
    let mut sites = vec![BellSite::Tap { pipe: first.pipe }];
    for w in path.windows(2) {
        sites.push(match w[0].dir {
            Dir::ToBob => BellSite::bob(w[0].pipe, w[1].pipe),
            Dir::ToAlice => BellSite::alice(w[0].pipe, w[1].pipe),
        });
    }
    sites
}

/// The Pauli error accumulated along `path`: each hop with outcome `(a, b)`
/// applies `X^a Z^b` after the earlier ones. The correction is its adjoint.
pub fn pauli_frame(path: &[Hop], outcomes: &BTreeMap<BellSite, (u8, u8)>) -> Result<PauliString> {
    let mut frame = PauliString::identity(1);
    for site in path_sites(path) {
        let &(a, b) = outcomes.get(&site).ok_or_else(|| invalid(format!("no outcome recorded for {site:?}")))?;
        frame = PauliString::xz(a, b).compose(&frame)?;
    }
    Ok(frame)
}

/// Teleports `Q` along the water path of `strategy`, one EPR pair per pipe.
pub fn frouting_from_gh(strategy: &GhStrategy, f: &BoolFn) -> Result<FRouting> {
    if let Some((x, y)) = strategy.counterexample(f)? {
        return Err(invalid(format!("strategy disagrees with {} at x={x}, y={y}", f.label())));
    }
    frouting_from_gh_unchecked(strategy.clone(), f.clone())
}

/// Skips the functional check, for descriptors that may be corrupted.
pub fn frouting_from_gh_unchecked(strategy: GhStrategy, f: BoolFn) -> Result<FRouting> {
    if strategy.n_x() != f.n_x() || strategy.n_y() != f.n_y() {
        return Err(invalid("strategy and function have different input sizes"));
    }
    let alice_meas = (0..f.x_count()).map(|x| 1 + strategy.alice(x).matching.pairs().len()).max().unwrap_or(1);
    let bob_meas = (0..f.y_count()).map(|y| strategy.bob(y).pairs().len()).max().unwrap_or(0);
    let resources = QResources {
        epr_pairs: strategy.pipes() as u64,
        message_qubits: 2 * (alice_meas + bob_meas) as u64,
        ..QResources::default()
    };
    let source = Source::FroutingFromGh { strategy: strategy.to_json_value() };
    Ok(FRouting { function: f, kind: FRoutingKind::GardenHose { strategy }, source, resources, bound: None })
}

/// A deliberately broken routing that always delivers `Q` to `side`.
pub fn frouting_constant(f: &BoolFn, side: Side) -> FRouting {
    FRouting {
        function: f.clone(),
        kind: FRoutingKind::Constant(side),
        source: Source::FroutingConstant { side },
        resources: QResources { message_qubits: 1, ..QResources::default() },
        bound: None,
    }
}

fn left(pipe: u32) -> String {
    format!("L{}", pipe + 1)
}

fn right(pipe: u32) -> String {
    format!("R{}", pipe + 1)
}

struct Branch {
    probability: f64,
    outcomes: BTreeMap<BellSite, (u8, u8)>,
    order: Vec<u64>,
    state: PureState,
}

/// Exact simulation of the routing on one input over every outcome branch.
pub(crate) fn gh_run(strategy: &GhStrategy, x: u64, y: u64, value: bool, perspective: Perspective) -> Result<InputRun> {
    let m = strategy.pipes();
    if 2 * m + 2 > QUBIT_BUDGET {
        return Err(budget(format!("{m} pipes need {} qubits", 2 * m + 2)));
    }
    let alice = strategy.alice(x);
    let bob = strategy.bob(y);
    let mut measurements = vec![("Q".to_owned(), left(alice.tap), BellSite::Tap { pipe: alice.tap })];
    for (i, j) in alice.matching.pairs() {
        measurements.push((left(i), left(j), BellSite::alice(i, j)));
    }
    for (i, j) in bob.pairs() {
        measurements.push((right(i), right(j), BellSite::bob(i, j)));
    }

    let start = PureState::bell_pair("Ref", "Q")?.tensor(&PureState::epr_pairs(m as usize)?)?;
    let mut branches = vec![Branch { probability: 1.0, outcomes: BTreeMap::new(), order: Vec::new(), state: start }];
    for (a, b, site) in &measurements {
        let mut next = Vec::with_capacity(branches.len() * 4);
        for br in branches {
            for out in br.state.bell_measure(a, b, MeasureMode::Branches)? {
                let mut outcomes = br.outcomes.clone();
                outcomes.insert(*site, out.outcome);
                let mut order = br.order.clone();
                order.push(2 * out.outcome.0 as u64 + out.outcome.1 as u64);
                next.push(Branch { probability: br.probability * out.probability, outcomes, order, state: out.state });
            }
        }
        branches = next;
    }

    let flow = strategy.eval(x, y)?;
    let exit = match flow.side {
        Side::Right => right(flow.exit_pipe),
        Side::Left => left(flow.exit_pipe),
    };
    let recovering = match perspective {
        Perspective::Referee => value.then_some(Side::Right),
        Perspective::Routing => Some(target_side(value)),
    };
    let viewed = match perspective {
        Perspective::Referee => (!value).then_some(Side::Right),
        Perspective::Routing => Some(if value { Side::Left } else { Side::Right }),
    };

    let mut run = InputRun { side: Some(flow.side), branches: branches.len() as u64, ..InputRun::default() };
    let mut recovered = DMatrix::zeros(4, 4);
    let mut view = BlockChoi::new(2);
    for br in &branches {
        if recovering == Some(flow.side) {
            let frame = pauli_frame(&flow.path, &br.outcomes)?;
            let mut st = br.state.clone();
            st.apply(&frame.adjoint().matrix(), &[exit.as_str()])?;
            let j = st.reduced(&["Ref", exit.as_str()])?;
            recovered += j.matrix() * crate::quantum::C64::new(br.probability, 0.0);
        }
        if let Some(side) = viewed {
            let prefix = if side == Side::Right { 'R' } else { 'L' };
            let mut keep: Vec<&str> = vec!["Ref"];
            keep.extend(
                br.state.registers().iter().map(|r| r.name.as_str()).filter(|n| *n != "Ref" && n.starts_with(prefix)),
            );
            let j = br.state.reduced(&keep)?;
            view.add(br.order.clone(), j.matrix() * crate::quantum::C64::new(br.probability, 0.0))?;
        }
    }
    if let Some(side) = recovering {
        run.recovered = Some(if side == flow.side { recovered } else { absent_choi() });
    }
    if viewed.is_some() {
        run.view = Some(view);
    }
    Ok(run)
}

pub(crate) fn constant_run(side: Side, value: bool, perspective: Perspective) -> InputRun {
    let phi = phi_plus();
    let holding = &phi * phi.adjoint();
    let empty = DMatrix::identity(2, 2) * crate::quantum::C64::new(0.5, 0.0);
    let (recovering, viewed) = match perspective {
        Perspective::Referee => (value.then_some(Side::Right), (!value).then_some(Side::Right)),
        Perspective::Routing => {
            let t = target_side(value);
            (Some(t), Some(if t == Side::Right { Side::Left } else { Side::Right }))
        }
    };
    let mut run = InputRun { side: Some(side), branches: 1, ..InputRun::default() };
    run.recovered = recovering.map(|r| if r == side { holding.clone() } else { absent_choi() });
    run.view = viewed.map(|v| {
        let mut b = BlockChoi::new(2);
        let block = if v == side { holding.clone() } else { empty.clone() };
        b.add(Vec::new(), block).expect("fixed block shapes");
        b
    });
    run
}
