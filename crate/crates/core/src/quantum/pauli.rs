use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::density::DensityOp;
use super::gates::{c, identity, kron, x, y, z};
use super::state::PureState;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// `(x, z)` exponents with `Y = i X Z`.
    pub fn bits(self) -> (u8, u8) {
        match self {
            Pauli::I => (0, 0),
            Pauli::X => (1, 0),
            Pauli::Z => (0, 1),
            Pauli::Y => (1, 1),
        }
    }

    pub fn from_bits(xb: u8, zb: u8) -> Self {
        match (xb & 1, zb & 1) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (0, 1) => Pauli::Z,
            _ => Pauli::Y,
        }
    }

    pub fn matrix(self) -> DMatrix<C64> {
        match self {
            Pauli::I => identity(2),
            Pauli::X => x(),
            Pauli::Y => y(),
            Pauli::Z => z(),
        }
    }
}

/// `i^phase` times a tensor product of single-qubit Paulis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    pub phase: u8,
    pub ops: Vec<Pauli>,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self { phase: 0, ops: vec![Pauli::I; n] }
    }

    pub fn single(p: Pauli) -> Self {
        Self { phase: 0, ops: vec![p] }
    }

    /// `X^x Z^z` on one qubit, phase included (`X Z = -i Y`).
    pub fn xz(xb: u8, zb: u8) -> Self {
        let p = Pauli::from_bits(xb, zb);
        let phase = if p == Pauli::Y { 3 } else { 0 };
        Self { phase, ops: vec![p] }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// `self * other`, tracking the phase exactly.
    pub fn compose(&self, other: &PauliString) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Dimension(format!(
                "composing Pauli strings of lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        let mut phase = (self.phase + other.phase) % 4;
        let ops = self
            .ops
            .iter()
            .zip(&other.ops)
            .map(|(&a, &b)| {
                let (p, k) = single_product(a, b);
                phase = (phase + k) % 4;
                p
            })
            .collect();
        Ok(Self { phase, ops })
    }

    pub fn adjoint(&self) -> Self {
        Self { phase: (4 - self.phase) % 4, ops: self.ops.clone() }
    }

    /// Equal as operators up to a global phase.
    pub fn same_up_to_phase(&self, other: &PauliString) -> bool {
        self.ops == other.ops
    }

    pub fn matrix(&self) -> DMatrix<C64> {
        let mut m = DMatrix::from_element(1, 1, c(1., 0.));
        for p in &self.ops {
            m = kron(&m, &p.matrix());
        }
        m * phase_factor(self.phase)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i", "-", "-i"][self.phase as usize % 4];
        write!(f, "{prefix}")?;
        for p in &self.ops {
            write!(f, "{p:?}")?;
        }
        Ok(())
    }
}

fn phase_factor(k: u8) -> C64 {
    [c(1., 0.), c(0., 1.), c(-1., 0.), c(0., -1.)][k as usize % 4]
}

/// `a * b = i^k p`.
fn single_product(a: Pauli, b: Pauli) -> (Pauli, u8) {
    use Pauli::*;
    match (a, b) {
        (I, p) | (p, I) => (p, 0),
        (X, X) | (Y, Y) | (Z, Z) => (I, 0),
        (X, Y) => (Z, 1),
        (Y, Z) => (X, 1),
        (Z, X) => (Y, 1),
        (Y, X) => (Z, 3),
        (Z, Y) => (X, 3),
        (X, Z) => (Y, 3),
    }
}

/// The one-time pad operator for key `(s1, s2)`: `i^(s1 s2) X^s1 Z^s2`,
/// that is `I, Z, X, Y`. Each is Hermitian and self-inverse.
pub fn pad_key(s: (u8, u8)) -> DMatrix<C64> {
    Pauli::from_bits(s.0, s.1).matrix()
}

/// Key index `0..4` as `(s1, s2)` with `s1` the high bit.
pub fn key_bits(s: u64) -> (u8, u8) {
    (((s >> 1) & 1) as u8, (s & 1) as u8)
}

/// Applies the pad for key `s` to qubit register `q`.
pub fn pauli_pad(state: &mut PureState, q: &str, s: (u8, u8)) -> Result<()> {
    state.apply(&pad_key(s), &[q])
}

/// Uniform average of `P^s rho P^s` over the four keys on qubit `q`.
pub fn pad_average(rho: &DensityOp, q: &str) -> Result<DensityOp> {
    let mut acc = DMatrix::zeros(rho.dim(), rho.dim());
    for s in 0..4 {
        let padded = rho.conjugate(&pad_key(key_bits(s)), &[q])?;
        acc += padded.matrix() * c(0.25, 0.);
    }
    DensityOp::new(rho.registers().to_vec(), acc)
}

#[cfg(test)]
mod tests {
    use super::super::gates::{max_abs_diff, swap};
    use super::super::random::random_density;
    use super::super::state::Register;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn products_match_matrices() {
        let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        for a in all {
            for b in all {
                for pa in 0..4 {
                    let s = PauliString { phase: pa, ops: vec![a, b] };
                    let t = PauliString { phase: 0, ops: vec![b, a] };
                    let prod = s.compose(&t).unwrap();
                    assert!(max_abs_diff(&prod.matrix(), &(s.matrix() * t.matrix())) < 1e-15);
                }
            }
        }
    }

    #[test]
    fn pad_keys_are_hermitian_and_span_swap() {
        let mut sum = DMatrix::zeros(4, 4);
        for s in 0..4 {
            let p = pad_key(key_bits(s));
            assert!(max_abs_diff(&p, &p.adjoint()) < 1e-15);
            assert!(max_abs_diff(&(&p * &p), &identity(2)) < 1e-15);
            sum += kron(&p, &p) * c(0.5, 0.);
        }
        assert!(max_abs_diff(&sum, &swap()) < 1e-15);
        let xz = PauliString::xz(1, 1).matrix();
        assert!(max_abs_diff(&xz, &(x() * z())) < 1e-15);
    }

    #[test]
    fn zero_key_and_double_pad_are_identity() {
        let s = PureState::qubit("q", c(0.6, 0.), c(0., 0.8)).unwrap();
        let mut t = s.clone();
        pauli_pad(&mut t, "q", (0, 0)).unwrap();
        assert_eq!(t.amplitudes(), s.amplitudes());
        for k in 0..4 {
            let mut t = s.clone();
            pauli_pad(&mut t, "q", key_bits(k)).unwrap();
            pauli_pad(&mut t, "q", key_bits(k)).unwrap();
            assert!((t.overlap(&s).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn pad_average_is_maximally_mixed_times_rest() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let regs = vec![Register::qubit("q"), Register::qubit("rest")];
        for _ in 0..20 {
            let rho = random_density(regs.clone(), &mut rng).unwrap();
            let avg = pad_average(&rho, "q").unwrap();
            let rest = rho.reduced(&["rest"]).unwrap();
            let want = kron(&(identity(2) * c(0.5, 0.)), rest.matrix());
            let l1: f64 = (avg.matrix() - want).iter().map(|v| v.norm()).sum();
            assert!(l1 <= 1e-12, "{l1}");
        }
    }
}
