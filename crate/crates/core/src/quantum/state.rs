use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::density::DensityOp;
use super::pauli::pad_key;
use super::{BRANCH_CUTOFF, NORM_TOL, QUBIT_BUDGET};
use crate::error::{budget, invalid, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub dim: usize,
}

impl Register {
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        Self { name: name.into(), dim }
    }

    pub fn qubit(name: impl Into<String>) -> Self {
        Self::new(name, 2)
    }
}

/// Checks names are unique and the total dimension fits the qubit budget.
pub(crate) fn check_registers(registers: &[Register]) -> Result<usize> {
    let mut total: usize = 1;
    for (i, r) in registers.iter().enumerate() {
        if r.dim == 0 {
            return Err(invalid(format!("register {} has dimension 0", r.name)));
        }
        if registers[..i].iter().any(|o| o.name == r.name) {
            return Err(invalid(format!("duplicate register name {}", r.name)));
        }
        total = total
            .checked_mul(r.dim)
            .filter(|&t| t <= 1 << QUBIT_BUDGET)
            .ok_or_else(|| budget(format!("state exceeds the {QUBIT_BUDGET}-qubit budget")))?;
    }
    Ok(total)
}

/// Index arithmetic for an ordered register list, first register most significant.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    pub dims: Vec<usize>,
    pub strides: Vec<usize>,
    pub total: usize,
}

impl Layout {
    pub fn new(registers: &[Register]) -> Self {
        let dims: Vec<usize> = registers.iter().map(|r| r.dim).collect();
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let total = dims.iter().product();
        Self { dims, strides, total }
    }

    pub fn digit(&self, index: usize, k: usize) -> usize {
        index / self.strides[k] % self.dims[k]
    }

    /// Offsets of the sub-basis spanned by `targets` (first target most significant).
    pub fn offsets(&self, targets: &[usize]) -> Vec<usize> {
        let mut offsets = vec![0usize];
        for &t in targets {
            let mut next = Vec::with_capacity(offsets.len() * self.dims[t]);
            for &o in &offsets {
                for d in 0..self.dims[t] {
                    next.push(o + d * self.strides[t]);
                }
            }
            offsets = next;
        }
        offsets
    }

    /// Indices whose digits on `targets` are all zero.
    pub fn bases(&self, targets: &[usize]) -> Vec<usize> {
        (0..self.total).filter(|&i| targets.iter().all(|&t| self.digit(i, t) == 0)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureMode {
    /// One outcome drawn with its Born probability from a seeded generator.
    Sample(u64),
    /// Every outcome with nonzero probability.
    Branches,
}

#[derive(Clone, Debug)]
pub struct BellBranch {
    /// `(a, b)`: the projector is onto `(I (x) X^a Z^b)|Phi+>`.
    pub outcome: (u8, u8),
    pub probability: f64,
    /// Normalized post-measurement state on the unmeasured registers.
    pub state: PureState,
}

/// A normalized pure state on an ordered list of registers.
#[derive(Clone, Debug)]
pub struct PureState {
    registers: Vec<Register>,
    amps: DVector<C64>,
}

impl PureState {
    /// `|0 .. 0>` on the given registers.
    pub fn zero(registers: Vec<Register>) -> Result<Self> {
        let total = check_registers(&registers)?;
        let mut amps = DVector::zeros(total);
        amps[0] = C64::new(1.0, 0.0);
        Ok(Self { registers, amps })
    }

    pub fn from_amplitudes(registers: Vec<Register>, amps: Vec<C64>) -> Result<Self> {
        let total = check_registers(&registers)?;
        if amps.len() != total {
            return Err(Error::Dimension(format!("{} amplitudes for dimension {total}", amps.len())));
        }
        let amps = DVector::from_vec(amps);
        let norm = amps.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("state norm {norm} is not 1")));
        }
        Ok(Self { registers, amps: amps / C64::new(norm, 0.0) })
    }

    /// `|psi>` on a single qubit register.
    pub fn qubit(name: &str, a0: C64, a1: C64) -> Result<Self> {
        Self::from_amplitudes(vec![Register::qubit(name)], vec![a0, a1])
    }

    /// `m` EPR pairs `|Phi+>` on `(L1, R1), .., (Lm, Rm)`, listed in that order.
    pub fn epr_pairs(m: usize) -> Result<Self> {
        let mut state = Self::zero(vec![])?;
        for i in 1..=m {
            let pair = Self::bell_pair(&format!("L{i}"), &format!("R{i}"))?;
            state = state.tensor(&pair)?;
        }
        Ok(state)
    }

    pub fn bell_pair(a: &str, b: &str) -> Result<Self> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        Self::from_amplitudes(
            vec![Register::qubit(a), Register::qubit(b)],
            vec![C64::new(s, 0.0), z, z, C64::new(s, 0.0)],
        )
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.registers.iter().position(|r| r.name == name).ok_or_else(|| invalid(format!("no register named {name}")))
    }

    fn positions(&self, names: &[&str]) -> Result<Vec<usize>> {
        let pos: Vec<usize> = names.iter().map(|n| self.position(n)).collect::<Result<_>>()?;
        for (i, p) in pos.iter().enumerate() {
            if pos[..i].contains(p) {
                return Err(invalid(format!("register {} listed twice", names[i])));
            }
        }
        Ok(pos)
    }

    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        let mut registers = self.registers.clone();
        registers.extend(other.registers.iter().cloned());
        check_registers(&registers)?;
        let amps = self.amps.kronecker(&other.amps);
        Ok(Self { registers, amps })
    }

    /// Applies `op` to the named registers (first name most significant).
    pub fn apply(&mut self, op: &DMatrix<C64>, targets: &[&str]) -> Result<()> {
        let pos = self.positions(targets)?;
        let layout = Layout::new(&self.registers);
        let offsets = layout.offsets(&pos);
        if op.nrows() != offsets.len() || op.ncols() != offsets.len() {
            return Err(Error::Dimension(format!(
                "{}x{} operator on registers of dimension {}",
                op.nrows(),
                op.ncols(),
                offsets.len()
            )));
        }
        let mut buf = DVector::zeros(offsets.len());
        for base in layout.bases(&pos) {
            for (k, &o) in offsets.iter().enumerate() {
                buf[k] = self.amps[base + o];
            }
            let out = op * &buf;
            for (k, &o) in offsets.iter().enumerate() {
                self.amps[base + o] = out[k];
            }
        }
        Ok(())
    }

    /// Reduced density operator on `keep`, in the listed order.
    pub fn reduced(&self, keep: &[&str]) -> Result<DensityOp> {
        let pos = self.positions(keep)?;
        let layout = Layout::new(&self.registers);
        let offsets = layout.offsets(&pos);
        let d = offsets.len();
        let mut rho = DMatrix::zeros(d, d);
        for base in layout.bases(&pos) {
            for i in 0..d {
                let ai = self.amps[base + offsets[i]];
                if ai.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..d {
                    rho[(i, j)] += ai * self.amps[base + offsets[j]].conj();
                }
            }
        }
        let registers = pos.iter().map(|&p| self.registers[p].clone()).collect();
        DensityOp::new(registers, rho)
    }

    pub fn density(&self) -> DensityOp {
        let rho = &self.amps * self.amps.adjoint();
        DensityOp::new(self.registers.clone(), rho).expect("pure states are valid density operators")
    }

    /// Projects `(a, b)` onto each Bell state `(I (x) X^a Z^b)|Phi+>` and
    /// removes the two registers.
    pub fn bell_measure(&self, a: &str, b: &str, mode: MeasureMode) -> Result<Vec<BellBranch>> {
        let pos = self.positions(&[a, b])?;
        if pos.iter().any(|&p| self.registers[p].dim != 2) {
            return Err(Error::Dimension("Bell measurement needs two qubits".into()));
        }
        let layout = Layout::new(&self.registers);
        let offsets = layout.offsets(&pos);
        let rest: Vec<Register> =
            self.registers.iter().enumerate().filter(|(k, _)| !pos.contains(k)).map(|(_, r)| r.clone()).collect();
        let bases = layout.bases(&pos);

        let mut branches = Vec::with_capacity(4);
        for outcome in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
            let bell = bell_vector(outcome);
            let amps: Vec<C64> =
                bases.iter().map(|&base| (0..4).map(|k| bell[k].conj() * self.amps[base + offsets[k]]).sum()).collect();
            let probability: f64 = amps.iter().map(|v| v.norm_sqr()).sum();
            if probability < BRANCH_CUTOFF {
                continue;
            }
            let scale = C64::new(probability.sqrt(), 0.0);
            let state = PureState {
                registers: rest.clone(),
                amps: DVector::from_iterator(amps.len(), amps.into_iter().map(|v| v / scale)),
            };
            branches.push(BellBranch { outcome, probability, state });
        }
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("Bell branch probabilities sum to {total}")));
        }
        match mode {
            MeasureMode::Branches => Ok(branches),
            MeasureMode::Sample(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let u: f64 = rng.random::<f64>() * total;
                let mut acc = 0.0;
                let pick = branches
                    .iter()
                    .position(|b| {
                        acc += b.probability;
                        u < acc
                    })
                    .unwrap_or(branches.len() - 1);
                Ok(vec![branches.swap_remove(pick)])
            }
        }
    }

    /// `|<self|other>|^2` for states on identical registers.
    pub fn overlap(&self, other: &PureState) -> Result<f64> {
        if self.registers != other.registers {
            return Err(Error::Dimension("overlap of states on different registers".into()));
        }
        Ok(self.amps.dotc(&other.amps).norm_sqr())
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOL
    }

    /// Moves the registers into the listed order.
    pub fn reorder(&self, order: &[&str]) -> Result<Self> {
        let pos = self.positions(order)?;
        if pos.len() != self.registers.len() {
            return Err(invalid("reorder must list every register"));
        }
        let old = Layout::new(&self.registers);
        let registers: Vec<Register> = pos.iter().map(|&p| self.registers[p].clone()).collect();
        let new = Layout::new(&registers);
        let mut amps = DVector::zeros(self.amps.len());
        for i in 0..old.total {
            let j: usize = pos.iter().enumerate().map(|(k, &p)| old.digit(i, p) * new.strides[k]).sum();
            amps[j] = self.amps[i];
        }
        Ok(Self { registers, amps })
    }

    /// Writes the state as `(index, re, im)` triples under a register header.
    pub fn dump(&self) -> StateDump {
        StateDump {
            registers: self.registers.clone(),
            amplitudes: self
                .amps
                .iter()
                .enumerate()
                .filter(|(_, a)| a.norm_sqr() > 0.0)
                .map(|(i, a)| (i as u64, a.re, a.im))
                .collect(),
        }
    }

    pub fn from_dump(dump: &StateDump) -> Result<Self> {
        let total = check_registers(&dump.registers)?;
        let mut amps = vec![C64::new(0.0, 0.0); total];
        for &(i, re, im) in &dump.amplitudes {
            if !(re.is_finite() && im.is_finite()) {
                return Err(invalid("non-finite amplitude"));
            }
            let slot = amps
                .get_mut(i as usize)
                .ok_or_else(|| Error::Dimension(format!("basis index {i} outside dimension {total}")))?;
            *slot += C64::new(re, im);
        }
        Self::from_amplitudes(dump.registers.clone(), amps)
    }
}

/// `(I (x) X^a Z^b)|Phi+>` as a 4-vector.
pub fn bell_vector(outcome: (u8, u8)) -> DVector<C64> {
    let p = pad_key(outcome);
    let phi = super::gates::phi_plus();
    super::gates::kron(&super::gates::identity(2), &p) * phi
}

/// State dump format: register header plus sparse amplitudes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDump {
    pub registers: Vec<Register>,
    pub amplitudes: Vec<(u64, f64, f64)>,
}

#[cfg(test)]
mod tests {
    use super::super::gates::{c, cz, h, identity, x, z};
    use super::*;

    #[test]
    fn x_flips_zero() {
        let mut s = PureState::zero(vec![Register::qubit("q")]).unwrap();
        s.apply(&x(), &["q"]).unwrap();
        assert_eq!(s.amplitudes()[1], c(1., 0.));
    }

    #[test]
    fn graph_state_amplitudes() {
        let mut s = PureState::zero(vec![Register::qubit("a"), Register::qubit("b")]).unwrap();
        s.apply(&h(), &["a"]).unwrap();
        s.apply(&h(), &["b"]).unwrap();
        s.apply(&cz(), &["a", "b"]).unwrap();
        let want = [0.5, 0.5, 0.5, -0.5];
        for (a, w) in s.amplitudes().iter().zip(want) {
            assert!((a - c(w, 0.)).norm() < 1e-15);
        }
        let before = s.clone();
        s.apply(&identity(4), &["b", "a"]).unwrap();
        assert_eq!(s.amplitudes(), before.amplitudes());
        assert!(s.apply(&identity(2), &["a", "b"]).is_err());
    }

    #[test]
    fn epr_pairs_and_marginals() {
        let one = PureState::epr_pairs(1).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(one.amplitudes().as_slice(), &[c(s, 0.), c(0., 0.), c(0., 0.), c(s, 0.)]);
        let two = PureState::epr_pairs(2).unwrap();
        let pair = two.reduced(&["L1", "R1"]).unwrap();
        assert!(super::super::gates::max_abs_diff(pair.matrix(), one.density().matrix()) < 1e-15);
        let half = two.reduced(&["R2"]).unwrap();
        assert!(super::super::gates::max_abs_diff(half.matrix(), &(identity(2) * c(0.5, 0.))) < 1e-15);
    }

    #[test]
    fn teleportation_convention() {
        // outcome (a, b) on (Q, L) leaves R in X^a Z^b |psi>
        let psi = PureState::qubit("Q", c(0.6, 0.), c(0., 0.8)).unwrap();
        let state = psi.tensor(&PureState::bell_pair("L", "R").unwrap()).unwrap();
        let branches = state.bell_measure("Q", "L", MeasureMode::Branches).unwrap();
        assert_eq!(branches.len(), 4);
        for b in branches {
            assert!((b.probability - 0.25).abs() < 1e-12);
            let mut r = b.state.clone();
            let (a, bb) = b.outcome;
            // undo X^a Z^b: apply Z^b then X^a
            if a == 1 {
                r.apply(&x(), &["R"]).unwrap();
            }
            if bb == 1 {
                r.apply(&z(), &["R"]).unwrap();
            }
            let target = PureState::qubit("R", c(0.6, 0.), c(0., 0.8)).unwrap();
            assert!((r.overlap(&target).unwrap() - 1.0).abs() < 1e-12, "outcome {:?}", b.outcome);
        }
    }

    #[test]
    fn measuring_phi_plus_halves() {
        let s = PureState::bell_pair("a", "b").unwrap();
        let branches = s.bell_measure("a", "b", MeasureMode::Branches).unwrap();
        assert_eq!(branches.len(), 1);
        assert_eq!(branches[0].outcome, (0, 0));
        let sampled = s.bell_measure("a", "b", MeasureMode::Sample(7)).unwrap();
        assert_eq!(sampled[0].outcome, (0, 0));
    }

    #[test]
    fn product_input_branches_uniform_on_compatible_outcomes() {
        let s = PureState::zero(vec![Register::qubit("a"), Register::qubit("b")]).unwrap();
        let branches = s.bell_measure("a", "b", MeasureMode::Branches).unwrap();
        let outcomes: Vec<_> = branches.iter().map(|b| b.outcome).collect();
        assert_eq!(outcomes, vec![(0, 0), (0, 1)]);
        for b in branches {
            assert!((b.probability - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn dump_round_trip_and_reorder() {
        let mut s = PureState::epr_pairs(1).unwrap();
        s.apply(&h(), &["L1"]).unwrap();
        let back = PureState::from_dump(&s.dump()).unwrap();
        assert!((back.overlap(&s).unwrap() - 1.0).abs() < 1e-12);
        let swapped = s.reorder(&["R1", "L1"]).unwrap().reorder(&["L1", "R1"]).unwrap();
        assert!((swapped.overlap(&s).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn budget_enforced() {
        let regs: Vec<Register> = (0..15).map(|i| Register::qubit(format!("q{i}"))).collect();
        assert!(matches!(PureState::zero(regs), Err(Error::Budget(_))));
    }
}
