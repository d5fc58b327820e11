use serde::{Deserialize, Serialize};

use super::field::PrimeField;
use super::linalg::in_span;
use super::{literal_string, Literal};
use crate::boolfn::BoolFn;
use crate::error::{invalid, Result};

/// A span program `(M, labels, t)` over `Z_p` on `n_vars` input bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanProgram {
    field: PrimeField,
    n_vars: u32,
    rows: Vec<Vec<u64>>,
    labels: Vec<Literal>,
    target: Vec<u64>,
}

impl SpanProgram {
    pub fn new(
        field: PrimeField,
        n_vars: u32,
        rows: Vec<Vec<u64>>,
        labels: Vec<Literal>,
        target: Vec<u64>,
    ) -> Result<Self> {
        let e = target.len();
        if e == 0 || target.iter().all(|&v| v % field.p() == 0) {
            return Err(invalid("span program target must be nonzero"));
        }
        if rows.len() != labels.len() {
            return Err(invalid(format!("{} rows but {} labels", rows.len(), labels.len())));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != e) {
            return Err(invalid(format!("row of length {} against target length {e}", r.len())));
        }
        if let Some(l) = labels.iter().find(|l| l.var == 0 || l.var > n_vars) {
            return Err(invalid(format!("label variable {} outside 1..={n_vars}", l.var)));
        }
        let reduce = |v: Vec<u64>| v.into_iter().map(|a| field.reduce(a)).collect();
        Ok(Self { field, n_vars, rows: rows.into_iter().map(reduce).collect(), labels, target: reduce(target) })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn n_vars(&self) -> u32 {
        self.n_vars
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn labels(&self) -> &[Literal] {
        &self.labels
    }

    pub fn target(&self) -> &[u64] {
        &self.target
    }

    /// Number of rows `d`.
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// Number of columns `e`.
    pub fn width(&self) -> usize {
        self.target.len()
    }

    /// Indices of the rows whose literal is satisfied by `z`.
    pub fn selected(&self, z: &[bool]) -> Vec<usize> {
        (0..self.rows.len()).filter(|&i| self.labels[i].holds(z)).collect()
    }

    pub fn eval(&self, z: &[bool]) -> Result<bool> {
        if z.len() != self.n_vars as usize {
            return Err(invalid(format!("input has {} bits, program has {}", z.len(), self.n_vars)));
        }
        let rows: Vec<Vec<u64>> = self.selected(z).into_iter().map(|i| self.rows[i].clone()).collect();
        Ok(in_span(&self.field, &rows, &self.target).is_some())
    }

    pub fn eval_xy(&self, x: u64, y: u64, n_x: u32, n_y: u32) -> Result<bool> {
        self.eval(&literal_string(x, y, n_x, n_y))
    }

    /// First input on which the program and `f` disagree.
    pub fn disagreement(&self, f: &BoolFn) -> Result<Option<(u64, u64)>> {
        if self.n_vars != f.n_x() + f.n_y() {
            return Err(invalid(format!(
                "span program has {} variables, function has {}",
                self.n_vars,
                f.n_x() + f.n_y()
            )));
        }
        for (x, y) in f.inputs() {
            if self.eval_xy(x, y, f.n_x(), f.n_y())? != f.at(x, y) {
                return Ok(Some((x, y)));
            }
        }
        Ok(None)
    }

    pub fn permute_rows(&self, order: &[usize]) -> Self {
        Self {
            rows: order.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: order.iter().map(|&i| self.labels[i]).collect(),
            ..self.clone()
        }
    }

    pub fn to_spec(&self) -> SpanSpec {
        SpanSpec {
            p: self.field.p(),
            n_vars: self.n_vars,
            target: self.target.clone(),
            rows: self
                .rows
                .iter()
                .zip(&self.labels)
                .map(|(v, l)| SpanRow { vector: v.clone(), var: l.var, bit: l.bit as u8 })
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<SpanSpec>(text)?.build()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_spec()).expect("span program serializes")
    }
}

/// JSON form: `{"p": 2, "n_vars": 2, "target": [1, 1], "rows": [{"vector": [1, 0], "var": 1, "bit": 1}, ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanSpec {
    pub p: u64,
    pub n_vars: u32,
    pub target: Vec<u64>,
    pub rows: Vec<SpanRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanRow {
    pub vector: Vec<u64>,
    pub var: u32,
    pub bit: u8,
}

impl SpanSpec {
    pub fn build(&self) -> Result<SpanProgram> {
        let field = PrimeField::new(self.p)?;
        let mut labels = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            if r.bit > 1 {
                return Err(invalid(format!("label bit {} is not 0 or 1", r.bit)));
            }
            labels.push(Literal::new(r.var, r.bit == 1));
        }
        SpanProgram::new(
            field,
            self.n_vars,
            self.rows.iter().map(|r| r.vector.clone()).collect(),
            labels,
            self.target.clone(),
        )
    }
}

/// Small hand-built programs for the named one-bit functions.
pub mod library {
    use super::*;

    fn lit(var: u32, bit: u8) -> Literal {
        Literal::new(var, bit == 1)
    }

    /// AND of one bit each: rows `(1,0)` on `z_1`, `(0,1)` on `z_2`, target `(1,1)`.
    pub fn and1() -> SpanProgram {
        and1_over(2).expect("p=2 valid")
    }

    pub fn and1_over(p: u64) -> Result<SpanProgram> {
        SpanProgram::new(PrimeField::new(p)?, 2, vec![vec![1, 0], vec![0, 1]], vec![lit(1, 1), lit(2, 1)], vec![1, 1])
    }

    pub fn or1() -> SpanProgram {
        or1_over(2).expect("p=2 valid")
    }

    pub fn or1_over(p: u64) -> Result<SpanProgram> {
        SpanProgram::new(PrimeField::new(p)?, 2, vec![vec![1], vec![1]], vec![lit(1, 1), lit(2, 1)], vec![1])
    }

    pub fn eq1() -> SpanProgram {
        eq1_over(2).expect("p=2 valid")
    }

    /// Equality of one bit each with target `(1,0)`; the two accepting row
    /// pairs differ by exactly the target.
    pub fn eq1_over(p: u64) -> Result<SpanProgram> {
        SpanProgram::new(
            PrimeField::new(p)?,
            2,
            vec![vec![0, 1], vec![1, 1], vec![1, 1], vec![0, 1]],
            vec![lit(1, 0), lit(1, 1), lit(2, 0), lit(2, 1)],
            vec![1, 0],
        )
    }

    /// 2-of-3 threshold on `z_1 z_2 z_3`; over `Z_2` this is the replicated
    /// scheme, over odd `p` a line through the secret.
    pub fn threshold_2_of_3(p: u64) -> Result<SpanProgram> {
        let field = PrimeField::new(p)?;
        if p == 2 {
            let labels = vec![lit(1, 1), lit(1, 1), lit(2, 1), lit(2, 1), lit(3, 1), lit(3, 1)];
            let e = |i: usize| {
                let mut v = vec![0; 3];
                v[i] = 1;
                v
            };
            return SpanProgram::new(field, 3, vec![e(1), e(2), e(0), e(2), e(0), e(1)], labels, vec![1, 1, 1]);
        }
        // parties 1 and 2 hold the line's values at 1 and 2, party 3 its slope
        SpanProgram::new(
            field,
            3,
            vec![vec![1, 1], vec![1, 2], vec![0, 1]],
            vec![lit(1, 1), lit(2, 1), lit(3, 1)],
            vec![1, 0],
        )
    }

    /// Looks up a library program matching `f`.
    pub fn for_function(f: &BoolFn) -> Option<SpanProgram> {
        let candidates = [and1(), or1(), eq1(), threshold_2_of_3(2).expect("p=2 valid")];
        candidates.into_iter().find(|s| matches!(s.disagreement(f), Ok(None)))
    }
}

#[cfg(test)]
mod tests {
    use super::library::*;
    use super::*;
    use crate::boolfn::{and, eq, or, threshold};
    use proptest::prelude::*;

    #[test]
    fn library_programs_compute_their_functions() {
        assert_eq!(and1().disagreement(&and(1)).unwrap(), None);
        assert_eq!(or1().disagreement(&or(1)).unwrap(), None);
        assert_eq!(eq1().disagreement(&eq(1)).unwrap(), None);
        for p in [3, 5] {
            assert_eq!(and1_over(p).unwrap().disagreement(&and(1)).unwrap(), None, "p = {p}");
            assert_eq!(or1_over(p).unwrap().disagreement(&or(1)).unwrap(), None, "p = {p}");
            assert_eq!(eq1_over(p).unwrap().disagreement(&eq(1)).unwrap(), None, "p = {p}");
        }
        for p in [2, 3, 5] {
            let s = threshold_2_of_3(p).unwrap();
            assert_eq!(s.disagreement(&threshold(1, 2, 2)).unwrap(), None, "p = {p}");
        }
    }

    #[test]
    fn and_examples() {
        let s = and1();
        assert!(s.eval(&[true, true]).unwrap());
        assert!(!s.eval(&[true, false]).unwrap());
        assert!(or1().eval(&[false, true]).unwrap());
        assert!(!or1().eval(&[false, false]).unwrap());
        assert!(s.eval(&[true]).is_err());
    }

    #[test]
    fn rejects_zero_target_and_bad_labels() {
        let f = PrimeField::new(3).unwrap();
        assert!(SpanProgram::new(f, 1, vec![vec![1]], vec![Literal::new(1, true)], vec![0]).is_err());
        assert!(SpanProgram::new(f, 1, vec![vec![1]], vec![Literal::new(2, true)], vec![1]).is_err());
        assert!(SpanProgram::new(f, 1, vec![vec![1, 0]], vec![Literal::new(1, true)], vec![1]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = eq1();
        assert_eq!(SpanProgram::from_json(&s.to_json()).unwrap(), s);
        let bad = r#"{"p":2,"n_vars":2,"target":[1],"rows":[{"vector":[1],"var":1,"bit":2}]}"#;
        assert!(SpanProgram::from_json(bad).is_err());
    }

    proptest! {
        #[test]
        fn eval_is_stable_under_row_permutation(seed in any::<u64>(), z in prop::collection::vec(any::<bool>(), 3)) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let s = threshold_2_of_3(3).unwrap();
            let mut order: Vec<usize> = (0..s.size()).collect();
            order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(s.eval(&z).unwrap(), s.permute_rows(&order).eval(&z).unwrap());
        }
    }
}
