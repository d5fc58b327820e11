//! Seeded random states for property tests and security sweeps.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::density::DensityOp;
use super::state::{check_registers, PureState, Register};
use crate::error::Result;

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state (normalized complex Gaussian vector).
pub fn random_state(registers: Vec<Register>, rng: &mut impl Rng) -> Result<PureState> {
    let d = check_registers(&registers)?;
    let v = DVector::from_fn(d, |_, _| gaussian(rng));
    let n = v.norm();
    PureState::from_amplitudes(registers, v.iter().map(|a| a / n).collect())
}

/// Random full-rank density operator `G G^dagger / tr` from a square Ginibre matrix.
pub fn random_density(registers: Vec<Register>, rng: &mut impl Rng) -> Result<DensityOp> {
    let d = check_registers(&registers)?;
    let g = DMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let tr = m.trace();
    let mut rho = m / tr;
    // exact Hermitian symmetry after rounding
    rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    DensityOp::new(registers, rho)
}

/// The six single-qubit Pauli eigenstates as `(label, |0> amplitude, |1> amplitude)`.
pub fn pauli_eigenstates() -> Vec<(&'static str, C64, C64)> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        ("+z", C64::new(1., 0.), C64::new(0., 0.)),
        ("-z", C64::new(0., 0.), C64::new(1., 0.)),
        ("+x", C64::new(s, 0.), C64::new(s, 0.)),
        ("-x", C64::new(s, 0.), C64::new(-s, 0.)),
        ("+y", C64::new(s, 0.), C64::new(0., s)),
        ("-y", C64::new(s, 0.), C64::new(0., -s)),
    ]
}
