//! Exact Gaussian elimination over `Z_p`.

use super::field::PrimeField;

/// Returns `λ` with `Σ λ_i rows[i] = t`, or `None` when `t` is outside the row
/// span. Every returned witness has been checked by multiplying it back out.
pub fn in_span(field: &PrimeField, rows: &[Vec<u64>], t: &[u64]) -> Option<Vec<u64>> {
    let e = t.len();
    let d = rows.len();
    if rows.iter().any(|r| r.len() != e) {
        return None;
    }
    // Solve R^T λ = t: an e x d system augmented with t.
    let mut a: Vec<Vec<u64>> = (0..e)
        .map(|c| {
            let mut line: Vec<u64> = rows.iter().map(|r| field.reduce(r[c])).collect();
            line.push(field.reduce(t[c]));
            line
        })
        .collect();

    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..d {
        let Some(sel) = (row..e).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(row, sel);
        let inv = field.inv(a[row][col]).expect("pivot is nonzero");
        for v in a[row].iter_mut() {
            *v = field.mul(*v, inv);
        }
        for r in 0..e {
            if r != row && a[r][col] != 0 {
                let factor = a[r][col];
                for c in 0..=d {
                    let sub = field.mul(factor, a[row][c]);
                    a[r][c] = field.sub(a[r][c], sub);
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == e {
            break;
        }
    }
    if a[row..].iter().any(|line| line[d] != 0) {
        return None;
    }

    let mut lambda = vec![0; d];
    for (r, &col) in pivots.iter().enumerate() {
        lambda[col] = a[r][d];
    }
    let check = combine(field, rows, &lambda, e);
    (check.iter().zip(t).all(|(&c, &ti)| c == field.reduce(ti))).then_some(lambda)
}

/// `Σ coeffs_i rows[i]` as a length-`e` vector.
pub fn combine(field: &PrimeField, rows: &[Vec<u64>], coeffs: &[u64], e: usize) -> Vec<u64> {
    let mut out = vec![0; e];
    for (r, &c) in rows.iter().zip(coeffs) {
        for (o, &v) in out.iter_mut().zip(r) {
            *o = field.add(*o, field.mul(c, v));
        }
    }
    out
}

/// Rank of a row set.
pub fn rank(field: &PrimeField, rows: &[Vec<u64>]) -> usize {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&v| field.reduce(v)).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(sel) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, sel);
        let inv = field.inv(m[rank][col]).expect("pivot is nonzero");
        let pivot_row: Vec<u64> = m[rank].iter().map(|&v| field.mul(v, inv)).collect();
        for r in (rank + 1)..m.len() {
            let factor = m[r][col];
            if factor != 0 {
                for c in 0..cols {
                    m[r][c] = field.sub(m[r][c], field.mul(factor, pivot_row[c]));
                }
            }
        }
        m[rank] = pivot_row;
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn basic_examples() {
        let rows = vec![vec![1, 1], vec![0, 1]];
        assert_eq!(in_span(&f(2), &rows, &[1, 0]), Some(vec![1, 1]));
        assert_eq!(in_span(&f(2), &[vec![1, 0]], &[1, 1]), None);
        assert_eq!(in_span(&f(2), &[], &[1, 0]), None);
        assert_eq!(in_span(&f(2), &[], &[0, 0]), Some(vec![]));
    }

    #[test]
    fn dependent_rows() {
        let rows = vec![vec![1, 2, 0], vec![2, 4, 0], vec![0, 0, 1]];
        let t = [3, 6, 5];
        let lambda = in_span(&f(7), &rows, &t).unwrap();
        assert_eq!(combine(&f(7), &rows, &lambda, 3), vec![3, 6, 5]);
        assert_eq!(in_span(&f(7), &rows, &[1, 1, 0]), None);
        assert_eq!(rank(&f(7), &rows), 2);
    }

    fn brute_in_span(field: &PrimeField, rows: &[Vec<u64>], t: &[u64]) -> bool {
        let p = field.p();
        let d = rows.len();
        let total = p.pow(d as u32);
        (0..total).any(|mut code| {
            let coeffs: Vec<u64> = (0..d)
                .map(|_| {
                    let c = code % p;
                    code /= p;
                    c
                })
                .collect();
            combine(field, rows, &coeffs, t.len()) == t
        })
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(
            p in prop::sample::select(vec![2u64, 3, 5]),
            rows in prop::collection::vec(prop::collection::vec(0u64..5, 3), 0..4),
            t in prop::collection::vec(0u64..5, 3),
        ) {
            let field = f(p);
            let rows: Vec<Vec<u64>> = rows.into_iter().map(|r| r.into_iter().map(|v| v % p).collect()).collect();
            let t: Vec<u64> = t.into_iter().map(|v| v % p).collect();
            let got = in_span(&field, &rows, &t);
            prop_assert_eq!(got.is_some(), brute_in_span(&field, &rows, &t));
            if let Some(l) = got {
                prop_assert_eq!(combine(&field, &rows, &l, 3), t);
            }
        }
    }
}
