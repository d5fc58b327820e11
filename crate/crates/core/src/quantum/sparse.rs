//! Sparse states over registers of arbitrary dimension.
//!
//! Purified classical protocols keep keys, coins and messages as basis
//! registers whose dimension is the number of values they take. The support
//! stays small even when the dense dimension would not fit the qubit budget.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::density::DensityOp;
use super::state::Register;
use super::BRANCH_CUTOFF;
use crate::error::{budget, invalid, Error, Result};

/// Largest number of basis terms a sparse state may hold.
pub const SPARSE_TERM_BUDGET: usize = 1 << 20;

/// Largest dimension of a dense reduced block.
pub const REDUCED_DIM_BUDGET: usize = 1 << 10;

type Digits = Vec<u32>;

#[derive(Clone, Debug)]
pub struct SparseState {
    registers: Vec<Register>,
    amps: BTreeMap<Digits, C64>,
}

impl SparseState {
    pub fn new(registers: Vec<Register>) -> Result<Self> {
        check_unique(&registers)?;
        let mut amps = BTreeMap::new();
        amps.insert(vec![0; registers.len()], C64::new(1.0, 0.0));
        Ok(Self { registers, amps })
    }

    /// Sums repeated basis terms and checks the norm.
    pub fn from_terms(registers: Vec<Register>, terms: Vec<(Digits, C64)>) -> Result<Self> {
        check_unique(&registers)?;
        if terms.len() > SPARSE_TERM_BUDGET {
            return Err(budget("sparse state exceeds its term budget"));
        }
        let mut amps = BTreeMap::new();
        for (d, a) in terms {
            check_digits(&registers, &d)?;
            *amps.entry(d).or_insert(C64::new(0.0, 0.0)) += a;
        }
        let s = Self { registers, amps };
        let n = s.norm();
        if (n - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("sparse state norm {n} is not 1")));
        }
        Ok(s)
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Digits, &C64)> {
        self.amps.iter()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.registers.iter().position(|r| r.name == name).ok_or_else(|| invalid(format!("no register named {name}")))
    }

    fn positions(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut pos = Vec::with_capacity(names.len());
        for n in names {
            let p = self.position(n)?;
            if pos.contains(&p) {
                return Err(invalid(format!("register {n} listed twice")));
            }
            pos.push(p);
        }
        Ok(pos)
    }

    /// Appends a register in state `|0>`.
    pub fn add_register(&mut self, reg: Register) -> Result<()> {
        if reg.dim == 0 {
            return Err(invalid(format!("register {} has dimension 0", reg.name)));
        }
        if self.registers.iter().any(|r| r.name == reg.name) {
            return Err(invalid(format!("duplicate register name {}", reg.name)));
        }
        self.registers.push(reg);
        let amps = std::mem::take(&mut self.amps);
        self.amps = amps
            .into_iter()
            .map(|(mut d, a)| {
                d.push(0);
                (d, a)
            })
            .collect();
        Ok(())
    }

    /// Appends a register in the uniform superposition of its basis states.
    pub fn add_uniform(&mut self, reg: Register) -> Result<()> {
        let d = reg.dim;
        let weights = vec![1.0 / d as f64; d];
        self.add_weighted(reg, &weights)
    }

    /// Appends a register in `sum_k sqrt(weights[k]) |k>`.
    pub fn add_weighted(&mut self, reg: Register, weights: &[f64]) -> Result<()> {
        if weights.len() != reg.dim {
            return Err(Error::Dimension(format!("{} weights for dimension {}", weights.len(), reg.dim)));
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(invalid("weights must be a probability distribution"));
        }
        let support: Vec<(u32, f64)> =
            weights.iter().enumerate().filter(|(_, w)| **w > 0.0).map(|(k, w)| (k as u32, w.sqrt())).collect();
        if self.amps.len().saturating_mul(support.len()) > SPARSE_TERM_BUDGET {
            return Err(budget("sparse state exceeds its term budget"));
        }
        self.add_register(reg)?;
        let amps = std::mem::take(&mut self.amps);
        for (d, a) in amps {
            for &(k, w) in &support {
                let mut e = d.clone();
                *e.last_mut().expect("register just added") = k;
                self.amps.insert(e, a * w);
            }
        }
        Ok(())
    }

    /// Removes a register whose digit is the same on every term.
    pub fn remove_constant(&mut self, name: &str) -> Result<u32> {
        let p = self.position(name)?;
        let mut values = self.amps.keys().map(|d| d[p]);
        let first = values.next().unwrap_or(0);
        if values.any(|v| v != first) {
            return Err(invalid(format!("register {name} is still entangled")));
        }
        self.registers.remove(p);
        let amps = std::mem::take(&mut self.amps);
        self.amps = amps
            .into_iter()
            .map(|(mut d, a)| {
                d.remove(p);
                (d, a)
            })
            .collect();
        Ok(first)
    }

    /// Maps each basis term by rewriting the `targets` digits with
    /// `map(all digits)`. The map must be injective on the support, so it
    /// extends to a unitary.
    pub fn apply_classical(&mut self, targets: &[&str], map: impl Fn(&[u32]) -> Result<Vec<u32>>) -> Result<()> {
        let pos = self.positions(targets)?;
        let mut out = BTreeMap::new();
        for (d, a) in &self.amps {
            let vals = map(d)?;
            if vals.len() != pos.len() {
                return Err(Error::Dimension("classical map returned the wrong number of digits".into()));
            }
            let mut e = d.clone();
            for (&p, &v) in pos.iter().zip(&vals) {
                if v as usize >= self.registers[p].dim {
                    return Err(invalid(format!("value {v} out of range for register {}", self.registers[p].name)));
                }
                e[p] = v;
            }
            if out.insert(e, *a).is_some() {
                return Err(invalid("classical map is not injective on the support"));
            }
        }
        self.amps = out;
        Ok(())
    }

    /// Applies `op` to `targets`.
    pub fn apply(&mut self, op: &DMatrix<C64>, targets: &[&str]) -> Result<()> {
        self.apply_conditional(targets, |_| Some(op.clone()))
    }

    /// Applies the matrix chosen from the remaining digits (targets read as
    /// zero) to `targets`; `None` leaves that group untouched.
    pub fn apply_conditional(
        &mut self,
        targets: &[&str],
        choose: impl Fn(&[u32]) -> Option<DMatrix<C64>>,
    ) -> Result<()> {
        let pos = self.positions(targets)?;
        let tdims: Vec<usize> = pos.iter().map(|&p| self.registers[p].dim).collect();
        let d: usize = tdims.iter().product();
        let groups = self.group(&pos);
        let mut out = BTreeMap::new();
        for (rest, entries) in groups {
            let Some(op) = choose(&rest) else {
                for (idx, a) in entries {
                    out.insert(with_digits(&rest, &pos, &tdims, idx), a);
                }
                continue;
            };
            if op.nrows() != d || op.ncols() != d {
                return Err(Error::Dimension(format!("{}x{} operator on dimension {d}", op.nrows(), op.ncols())));
            }
            let mut v = DVector::zeros(d);
            for (idx, a) in entries {
                v[idx] = a;
            }
            let w = op * v;
            for (idx, a) in w.iter().enumerate() {
                if a.norm_sqr() > BRANCH_CUTOFF * BRANCH_CUTOFF {
                    out.insert(with_digits(&rest, &pos, &tdims, idx), *a);
                }
            }
            if out.len() > SPARSE_TERM_BUDGET {
                return Err(budget("sparse state exceeds its term budget"));
            }
        }
        self.amps = out;
        Ok(())
    }

    /// Terms grouped by the digits outside `pos` (those set to zero), with
    /// the row-major index of the `pos` digits.
    fn group(&self, pos: &[usize]) -> BTreeMap<Digits, Vec<(usize, C64)>> {
        let mut groups: BTreeMap<Digits, Vec<(usize, C64)>> = BTreeMap::new();
        for (d, a) in &self.amps {
            let mut rest = d.clone();
            let mut idx = 0usize;
            for &p in pos {
                idx = idx * self.registers[p].dim + d[p] as usize;
                rest[p] = 0;
            }
            groups.entry(rest).or_default().push((idx, *a));
        }
        groups
    }

    /// Dense reduced density operator on `keep`.
    pub fn reduced(&self, keep: &[&str]) -> Result<DensityOp> {
        let pos = self.positions(keep)?;
        let regs: Vec<Register> = pos.iter().map(|&p| self.registers[p].clone()).collect();
        let d: usize = regs.iter().map(|r| r.dim).product();
        if d > REDUCED_DIM_BUDGET {
            return Err(budget(format!("reduced state of dimension {d} is too large")));
        }
        DensityOp::new(regs, self.reduced_matrix(&pos, d))
    }

    fn reduced_matrix(&self, pos: &[usize], d: usize) -> DMatrix<C64> {
        let mut rho = DMatrix::zeros(d, d);
        for entries in self.group(pos).into_values() {
            for &(i, a) in &entries {
                for &(j, b) in &entries {
                    rho[(i, j)] += a * b.conj();
                }
            }
        }
        rho
    }

    /// Reduced state on `labels` (x) `quantum` when the label registers are
    /// classical there: one subnormalized block on `quantum` per label value.
    /// Fails if some configuration of the traced registers carries two labels.
    pub fn reduced_blocks(&self, labels: &[&str], quantum: &[&str]) -> Result<BTreeMap<Vec<u64>, DMatrix<C64>>> {
        let lpos = self.positions(labels)?;
        let qpos = self.positions(quantum)?;
        if lpos.iter().any(|p| qpos.contains(p)) {
            return Err(invalid("label and quantum registers overlap"));
        }
        let d: usize = qpos.iter().map(|&p| self.registers[p].dim).product();
        if d > REDUCED_DIM_BUDGET {
            return Err(budget(format!("reduced block of dimension {d} is too large")));
        }
        let mut kept = lpos.clone();
        kept.extend(&qpos);
        // group by traced digits; within a group the label must be unique
        let mut groups: BTreeMap<Digits, (Vec<u64>, Vec<(usize, C64)>)> = BTreeMap::new();
        for (dg, a) in &self.amps {
            let mut rest = dg.clone();
            for &p in &kept {
                rest[p] = 0;
            }
            let label: Vec<u64> = lpos.iter().map(|&p| dg[p] as u64).collect();
            let idx = qpos.iter().fold(0usize, |acc, &p| acc * self.registers[p].dim + dg[p] as usize);
            let entry = groups.entry(rest).or_insert_with(|| (label.clone(), Vec::new()));
            if entry.0 != label {
                return Err(invalid("label registers are not classical in the reduced state"));
            }
            entry.1.push((idx, *a));
        }
        let mut blocks: BTreeMap<Vec<u64>, DMatrix<C64>> = BTreeMap::new();
        for (label, entries) in groups.into_values() {
            let b = blocks.entry(label).or_insert_with(|| DMatrix::zeros(d, d));
            for &(i, a) in &entries {
                for &(j, c) in &entries {
                    b[(i, j)] += a * c.conj();
                }
            }
        }
        Ok(blocks)
    }
}

fn check_unique(registers: &[Register]) -> Result<()> {
    for (i, r) in registers.iter().enumerate() {
        if r.dim == 0 || r.dim > u32::MAX as usize {
            return Err(invalid(format!("register {} has unusable dimension {}", r.name, r.dim)));
        }
        if registers[..i].iter().any(|o| o.name == r.name) {
            return Err(invalid(format!("duplicate register name {}", r.name)));
        }
    }
    Ok(())
}

fn check_digits(registers: &[Register], d: &[u32]) -> Result<()> {
    if d.len() != registers.len() {
        return Err(Error::Dimension(format!("{} digits for {} registers", d.len(), registers.len())));
    }
    for (r, &v) in registers.iter().zip(d) {
        if v as usize >= r.dim {
            return Err(invalid(format!("digit {v} out of range for register {}", r.name)));
        }
    }
    Ok(())
}

fn with_digits(rest: &[u32], pos: &[usize], dims: &[usize], mut idx: usize) -> Digits {
    let mut d = rest.to_vec();
    for k in (0..pos.len()).rev() {
        d[pos[k]] = (idx % dims[k]) as u32;
        idx /= dims[k];
    }
    d
}
