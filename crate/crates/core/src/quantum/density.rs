use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use super::state::{check_registers, Layout, PureState, Register};
use super::{MATRIX_TOL, NORM_TOL};
use crate::error::{invalid, Error, Result};

/// A density operator on an ordered register list.
#[derive(Clone, Debug)]
pub struct DensityOp {
    registers: Vec<Register>,
    matrix: DMatrix<C64>,
}

impl DensityOp {
    /// Checks dimensions, Hermiticity and unit trace. Positivity is checked
    /// by the metrics that need it, see [`DensityOp::check_psd`].
    pub fn new(registers: Vec<Register>, matrix: DMatrix<C64>) -> Result<Self> {
        let total = check_registers(&registers)?;
        if matrix.nrows() != total || matrix.ncols() != total {
            return Err(Error::Dimension(format!(
                "{}x{} matrix on registers of dimension {total}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(invalid("density matrix has non-finite entries"));
        }
        let herm = hermiticity_defect(&matrix);
        if herm > MATRIX_TOL {
            return Err(invalid(format!("density matrix is not Hermitian (defect {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > NORM_TOL * total.max(1) as f64 || tr.im.abs() > NORM_TOL {
            return Err(invalid(format!("density matrix trace {tr} is not 1")));
        }
        Ok(Self { registers, matrix })
    }

    pub fn maximally_mixed(registers: Vec<Register>) -> Result<Self> {
        let d = check_registers(&registers)?;
        Self::new(registers, DMatrix::identity(d, d) / C64::new(d as f64, 0.0))
    }

    pub fn from_pure(state: &PureState) -> Self {
        state.density()
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn positions(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut pos = Vec::with_capacity(names.len());
        for n in names {
            let p = self
                .registers
                .iter()
                .position(|r| r.name == *n)
                .ok_or_else(|| invalid(format!("no register named {n}")))?;
            if pos.contains(&p) {
                return Err(invalid(format!("register {n} listed twice")));
            }
            pos.push(p);
        }
        Ok(pos)
    }

    /// Real eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Fails when an eigenvalue is below `-MATRIX_TOL`.
    pub fn check_psd(&self) -> Result<()> {
        match self.eigenvalues().first() {
            Some(&low) if low < -MATRIX_TOL => Err(invalid(format!("density matrix has eigenvalue {low:e} < 0"))),
            _ => Ok(()),
        }
    }

    pub fn reduced(&self, keep: &[&str]) -> Result<Self> {
        let pos = self.positions(keep)?;
        let layout = Layout::new(&self.registers);
        let offsets = layout.offsets(&pos);
        let d = offsets.len();
        let mut out = DMatrix::zeros(d, d);
        for base in layout.bases(&pos) {
            for i in 0..d {
                for j in 0..d {
                    out[(i, j)] += self.matrix[(base + offsets[i], base + offsets[j])];
                }
            }
        }
        let registers = pos.iter().map(|&p| self.registers[p].clone()).collect();
        Self::new(registers, out)
    }

    /// `U rho U^dagger` with `U` acting on the named registers.
    pub fn conjugate(&self, op: &DMatrix<C64>, targets: &[&str]) -> Result<Self> {
        let pos = self.positions(targets)?;
        let layout = Layout::new(&self.registers);
        let left = apply_to_columns(&self.matrix, op, &layout, &pos)?;
        let both = apply_to_columns(&left.adjoint(), op, &layout, &pos)?.adjoint();
        Self::new(self.registers.clone(), both)
    }

    pub fn tensor(&self, other: &DensityOp) -> Result<Self> {
        let mut registers = self.registers.clone();
        registers.extend(other.registers.iter().cloned());
        Self::new(registers, self.matrix.kronecker(&other.matrix))
    }

    /// `<psi| rho |psi>` for a state on the same registers.
    pub fn expectation(&self, psi: &PureState) -> Result<f64> {
        if psi.registers() != self.registers.as_slice() {
            return Err(Error::Dimension("state and density operator differ in registers".into()));
        }
        let v = psi.amplitudes();
        Ok((v.adjoint() * &self.matrix * v)[(0, 0)].re)
    }
}

/// Applies `op` on registers `pos` to every column of `m`.
fn apply_to_columns(m: &DMatrix<C64>, op: &DMatrix<C64>, layout: &Layout, pos: &[usize]) -> Result<DMatrix<C64>> {
    let offsets = layout.offsets(pos);
    if op.nrows() != offsets.len() || op.ncols() != offsets.len() {
        return Err(Error::Dimension(format!(
            "{}x{} operator on registers of dimension {}",
            op.nrows(),
            op.ncols(),
            offsets.len()
        )));
    }
    let mut out = m.clone();
    let d = offsets.len();
    let mut block = DMatrix::zeros(d, m.ncols());
    for base in layout.bases(pos) {
        for (k, &o) in offsets.iter().enumerate() {
            block.row_mut(k).copy_from(&m.row(base + o));
        }
        let mapped = op * &block;
        for (k, &o) in offsets.iter().enumerate() {
            out.row_mut(base + o).copy_from(&mapped.row(k));
        }
    }
    Ok(out)
}

pub(crate) fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub(crate) fn trace_norm(m: &DMatrix<C64>) -> f64 {
    hermitian_eigenvalues(m).iter().map(|v| v.abs()).sum()
}

/// Square root of a positive semidefinite matrix, negative eigenvalues clipped.
fn psd_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let roots = eig.eigenvalues.map(|v| C64::new(v.max(0.0).sqrt(), 0.0));
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.adjoint()
}

fn same_space(rho: &DensityOp, sigma: &DensityOp) -> Result<()> {
    if rho.registers != sigma.registers {
        return Err(Error::Dimension("density operators on different registers".into()));
    }
    Ok(())
}

/// `(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`, clipped to `[0, 1]`.
pub fn fidelity(rho: &DensityOp, sigma: &DensityOp) -> Result<f64> {
    same_space(rho, sigma)?;
    rho.check_psd()?;
    sigma.check_psd()?;
    let r = psd_sqrt(&rho.matrix);
    let inner = &r * &sigma.matrix * &r;
    let root: f64 = hermitian_eigenvalues(&inner).iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok((root * root).clamp(0.0, 1.0))
}

/// `1/2 ||rho - sigma||_1`, clipped to `[0, 1]`.
pub fn trace_distance(rho: &DensityOp, sigma: &DensityOp) -> Result<f64> {
    same_space(rho, sigma)?;
    rho.check_psd()?;
    sigma.check_psd()?;
    Ok((0.5 * trace_norm(&(&rho.matrix - &sigma.matrix))).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::super::gates::{c, h, identity, max_abs_diff};
    use super::super::random::{random_density, random_state};
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> Vec<Register> {
        vec![Register::qubit("q")]
    }

    #[test]
    fn basic_metrics() {
        let zero = PureState::qubit("q", c(1., 0.), c(0., 0.)).unwrap().density();
        let one = PureState::qubit("q", c(0., 0.), c(1., 0.)).unwrap().density();
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-12);
        assert!(trace_distance(&zero, &zero).unwrap() < 1e-12);
        assert!(fidelity(&zero, &one).unwrap() < 1e-12);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fuchs_van_de_graaf_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for k in 0..100 {
            let (rho, sigma) = if k % 2 == 0 {
                (random_density(q(), &mut rng).unwrap(), random_density(q(), &mut rng).unwrap())
            } else {
                (random_state(q(), &mut rng).unwrap().density(), random_density(q(), &mut rng).unwrap())
            };
            let f = fidelity(&rho, &sigma).unwrap();
            let t = trace_distance(&rho, &sigma).unwrap();
            assert!(1.0 - f.sqrt() <= t + 1e-9, "lower bound, sample {k}");
            assert!(t <= (1.0 - f).sqrt() + 1e-9, "upper bound, sample {k}");
        }
    }

    #[test]
    fn rejects_non_psd_and_bad_trace() {
        let bad = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.5, 0.), c(-0.5, 0.)]));
        let rho = DensityOp::new(q(), bad).unwrap();
        assert!(rho.check_psd().is_err());
        let mixed = DensityOp::maximally_mixed(q()).unwrap();
        assert!(matches!(fidelity(&rho, &mixed), Err(Error::Validation(_))));
        assert!(DensityOp::new(q(), identity(2)).is_err());
        let mut skew = identity(2) * c(0.5, 0.);
        skew[(0, 1)] = c(0.1, 0.);
        assert!(DensityOp::new(q(), skew).is_err());
    }

    #[test]
    fn conjugation_and_trace_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let regs = vec![Register::qubit("a"), Register::new("b", 3)];
        let rho = random_density(regs, &mut rng).unwrap();
        let out = rho.conjugate(&h(), &["a"]).unwrap();
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-10);
        let back = out.conjugate(&h(), &["a"]).unwrap();
        assert!(max_abs_diff(back.matrix(), rho.matrix()) < 1e-12);
        let rb = rho.reduced(&["b"]).unwrap();
        assert!(max_abs_diff(rb.matrix(), out.reduced(&["b"]).unwrap().matrix()) < 1e-12);
    }
}
