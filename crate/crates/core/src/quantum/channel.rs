use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::density::{trace_norm, DensityOp};
use super::pauli::{key_bits, pad_key};
use super::state::{check_registers, Register};
use super::{MATRIX_TOL, QUBIT_BUDGET};
use crate::boolfn::BoolFn;
use crate::error::{budget, invalid, Error, Result};

/// A channel given by an isometry `V` from the input registers into
/// output (x) environment, output most significant.
#[derive(Clone, Debug)]
pub struct QChannel {
    input: Vec<Register>,
    output: Vec<Register>,
    env: Vec<Register>,
    v: DMatrix<C64>,
}

impl QChannel {
    pub fn new(input: Vec<Register>, output: Vec<Register>, env: Vec<Register>, v: DMatrix<C64>) -> Result<Self> {
        let d_in = check_registers(&input)?;
        let mut all = output.clone();
        all.extend(env.iter().cloned());
        let d_all = check_registers(&all)?;
        if v.nrows() != d_all || v.ncols() != d_in {
            return Err(Error::Dimension(format!(
                "isometry is {}x{}, registers need {d_all}x{d_in}",
                v.nrows(),
                v.ncols()
            )));
        }
        let gram = v.adjoint() * &v;
        let defect = (gram - DMatrix::<C64>::identity(d_in, d_in)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if defect > MATRIX_TOL {
            return Err(invalid(format!("channel matrix is not an isometry (defect {defect:e})")));
        }
        Ok(Self { input, output, env, v })
    }

    pub fn identity(reg: Register) -> Result<Self> {
        let d = reg.dim;
        Self::new(vec![reg.clone()], vec![reg], vec![], DMatrix::identity(d, d))
    }

    /// Discards the input into the environment and outputs `|0>` on `out`.
    pub fn trace_and_replace(input: Register, out: Register) -> Result<Self> {
        let d = input.dim;
        let mut v = DMatrix::zeros(out.dim * d, d);
        for i in 0..d {
            v[(i, i)] = C64::new(1.0, 0.0);
        }
        let env = Register::new(format!("{}_env", input.name), d);
        Self::new(vec![input], vec![out], vec![env], v)
    }

    /// Pads qubit `q` with a uniformly random key kept in the environment.
    pub fn pad_discard(q: Register) -> Result<Self> {
        if q.dim != 2 {
            return Err(Error::Dimension("pad channel needs a qubit".into()));
        }
        // row index (out, key) = 4 * out + key
        let mut v = DMatrix::zeros(8, 2);
        for s in 0..4 {
            let p = pad_key(key_bits(s));
            for out in 0..2 {
                for i in 0..2 {
                    v[(4 * out + s as usize, i)] = p[(out, i)] * 0.5;
                }
            }
        }
        let key = Register::new("key", 4);
        Self::new(vec![q.clone()], vec![q], vec![key], v)
    }

    pub fn input(&self) -> &[Register] {
        &self.input
    }

    pub fn output(&self) -> &[Register] {
        &self.output
    }

    pub fn isometry(&self) -> &DMatrix<C64> {
        &self.v
    }

    fn dims(&self) -> (usize, usize, usize) {
        let d_in = self.v.ncols();
        let d_out: usize = self.output.iter().map(|r| r.dim).product();
        (d_in, d_out, self.v.nrows() / d_out)
    }

    /// The channel to the environment.
    pub fn complementary(&self) -> Self {
        let (d_in, d_out, d_env) = self.dims();
        let mut v = DMatrix::zeros(d_env * d_out, d_in);
        for o in 0..d_out {
            for e in 0..d_env {
                v.row_mut(e * d_out + o).copy_from(&self.v.row(o * d_env + e));
            }
        }
        Self { input: self.input.clone(), output: self.env.clone(), env: self.output.clone(), v }
    }

    pub fn apply(&self, rho: &DensityOp) -> Result<DensityOp> {
        if rho.registers() != self.input.as_slice() {
            return Err(Error::Dimension("channel input registers differ".into()));
        }
        let (_, d_out, d_env) = self.dims();
        let full = &self.v * rho.matrix() * self.v.adjoint();
        DensityOp::new(self.output.clone(), trace_second(&full, d_out, d_env))
    }

    /// `(id (x) N)(Phi+)` on reference (x) output, normalized to trace 1.
    pub fn choi(&self) -> Result<DensityOp> {
        let (d_in, d_out, d_env) = self.dims();
        let mut regs: Vec<Register> =
            self.input.iter().map(|r| Register::new(format!("ref_{}", r.name), r.dim)).collect();
        regs.extend(self.output.iter().cloned());
        let total = check_registers(&regs)?;
        if total > 1 << QUBIT_BUDGET {
            return Err(budget("Choi matrix exceeds the qubit budget"));
        }
        let mut j = DMatrix::zeros(d_in * d_out, d_in * d_out);
        let scale = 1.0 / d_in as f64;
        for i in 0..d_in {
            for k in 0..d_in {
                for a in 0..d_out {
                    for b in 0..d_out {
                        let mut acc = C64::new(0.0, 0.0);
                        for e in 0..d_env {
                            acc += self.v[(a * d_env + e, i)] * self.v[(b * d_env + e, k)].conj();
                        }
                        j[(i * d_out + a, k * d_out + b)] = acc * scale;
                    }
                }
            }
        }
        DensityOp::new(regs, j)
    }

    /// `1/2 || J_RM - J_R (x) J_M ||_1` of the Choi state.
    pub fn decoupling_gap(&self) -> Result<f64> {
        let j = self.choi()?;
        let mut blocks = BlockChoi::new(self.v.ncols());
        blocks.add(Vec::new(), j.matrix().clone())?;
        Ok(blocks.gap())
    }
}

/// `Tr_2` of a matrix on a `d1 x d2` bipartite space.
pub(crate) fn trace_second(m: &DMatrix<C64>, d1: usize, d2: usize) -> DMatrix<C64> {
    DMatrix::from_fn(d1, d1, |i, j| (0..d2).map(|e| m[(i * d2 + e, j * d2 + e)]).sum())
}

/// `Tr_1` of a matrix on a `d1 x d2` bipartite space.
pub(crate) fn trace_first(m: &DMatrix<C64>, d1: usize, d2: usize) -> DMatrix<C64> {
    DMatrix::from_fn(d2, d2, |i, j| (0..d1).map(|r| m[(r * d2 + i, r * d2 + j)]).sum())
}

/// Choi state of a channel whose output has a classical part: one
/// subnormalized reference (x) quantum block per classical label.
#[derive(Clone, Debug)]
pub struct BlockChoi {
    ref_dim: usize,
    blocks: BTreeMap<Vec<u64>, DMatrix<C64>>,
}

impl BlockChoi {
    pub fn new(ref_dim: usize) -> Self {
        Self { ref_dim, blocks: BTreeMap::new() }
    }

    pub fn ref_dim(&self) -> usize {
        self.ref_dim
    }

    pub fn labels(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &BTreeMap<Vec<u64>, DMatrix<C64>> {
        &self.blocks
    }

    /// Adds `m` into the block for `label`.
    pub fn add(&mut self, label: Vec<u64>, m: DMatrix<C64>) -> Result<()> {
        if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(self.ref_dim) {
            return Err(Error::Dimension(format!(
                "{}x{} block with reference dimension {}",
                m.nrows(),
                m.ncols(),
                self.ref_dim
            )));
        }
        match self.blocks.get_mut(&label) {
            Some(b) if b.shape() != m.shape() => Err(Error::Dimension("blocks for one label differ in shape".into())),
            Some(b) => {
                *b += m;
                Ok(())
            }
            None => {
                self.blocks.insert(label, m);
                Ok(())
            }
        }
    }

    pub fn trace(&self) -> f64 {
        self.blocks.values().map(|b| b.trace().re).sum()
    }

    /// Marginal on the reference.
    pub fn reference_marginal(&self) -> DMatrix<C64> {
        let mut jr = DMatrix::zeros(self.ref_dim, self.ref_dim);
        for b in self.blocks.values() {
            jr += trace_second(b, self.ref_dim, b.nrows() / self.ref_dim);
        }
        jr
    }

    /// `1/2 sum_l || J_l - J_R (x) Tr_R J_l ||_1`, which is the decoupling gap
    /// of the whole block-diagonal Choi state.
    pub fn gap(&self) -> f64 {
        let jr = self.reference_marginal();
        let total: f64 = self
            .blocks
            .values()
            .map(|b| {
                let dm = b.nrows() / self.ref_dim;
                let jm = trace_first(b, self.ref_dim, dm);
                trace_norm(&(b - jr.kronecker(&jm)))
            })
            .sum();
        (0.5 * total).clamp(0.0, 1.0)
    }

    /// Fidelity of the whole state with a pure target `|t><t|` placed in one
    /// label's block: `<t| J_label |t>`.
    pub fn overlap(&self, label: &[u64], target: &nalgebra::DVector<C64>) -> f64 {
        self.blocks.get(label).map(|b| (target.adjoint() * b * target)[(0, 0)].re).unwrap_or(0.0)
    }
}

/// `V_f = sum_{x,y} |x, y, f(x,y)><x, y|`, columns indexed by `x 2^n_y + y`.
pub fn build_vf(f: &BoolFn) -> Result<DMatrix<C64>> {
    let n = f.n_x() + f.n_y();
    if n + 1 > QUBIT_BUDGET {
        return Err(budget(format!("V_f on {} qubits exceeds the qubit budget", n + 1)));
    }
    let cols = 1usize << n;
    let mut v = DMatrix::zeros(2 * cols, cols);
    for x in 0..f.x_count() {
        for y in 0..f.y_count() {
            let col = (x << f.n_y()) as usize | y as usize;
            v[(2 * col + f.at(x, y) as usize, col)] = C64::new(1.0, 0.0);
        }
    }
    Ok(v)
}
