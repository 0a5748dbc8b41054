use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// `u * input * v = d`, with `d` diagonal, nonnegative and each diagonal entry
/// dividing the next. The inverses of `u` and `v` are kept alongside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SnfResult {
    /// The diagonal of `d`, including trailing zeros up to `min(rows, cols)`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let k = self.d.rows().min(self.d.cols());
        (0..k).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors()
            .iter()
            .take_while(|v| !v.is_zero())
            .count()
    }
}

struct Work {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
        self.v_inv.swap_rows(i, j);
    }

    /// row[i] -= q * row[t]
    fn sub_row(&mut self, i: usize, t: usize, q: &BigInt) {
        let neg = -q;
        self.a.add_row_multiple(i, t, &neg);
        self.u.add_row_multiple(i, t, &neg);
        self.u_inv.add_col_multiple(t, i, q);
    }

    /// col[j] -= q * col[t]
    fn sub_col(&mut self, j: usize, t: usize, q: &BigInt) {
        let neg = -q;
        self.a.add_col_multiple(j, t, &neg);
        self.v.add_col_multiple(j, t, &neg);
        self.v_inv.add_row_multiple(t, j, q);
    }

    fn negate_col(&mut self, j: usize) {
        self.a.negate_col(j);
        self.v.negate_col(j);
        self.v_inv.negate_row(j);
    }
}

/// Quotient of `a / p` rounded to the nearest integer, keeping remainders small.
fn near_quotient(a: &BigInt, p: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(p);
    let twice: BigInt = &r * 2;
    // `r` has the sign of `p`, so stepping up moves it towards zero
    if twice.abs() > p.abs() {
        q + 1
    } else {
        q
    }
}

/// Smith normal form with a minimal-absolute-value pivot rule, ties broken by
/// the first entry in row-major order. Fully deterministic.
pub fn snf(m: &IntMatrix) -> SnfResult {
    let (r, c) = (m.rows(), m.cols());
    let mut w = Work {
        a: m.clone(),
        u: IntMatrix::identity(r),
        u_inv: IntMatrix::identity(r),
        v: IntMatrix::identity(c),
        v_inv: IntMatrix::identity(c),
    };
    let k = r.min(c);
    for t in 0..k {
        let Some((pi, pj)) = min_entry(&w.a, t..r, t..c) else {
            break;
        };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            let p = w.a.get(t, t).clone();
            for i in t + 1..r {
                if !w.a.get(i, t).is_zero() {
                    let q = near_quotient(w.a.get(i, t), &p);
                    w.sub_row(i, t, &q);
                    dirty |= !w.a.get(i, t).is_zero();
                }
            }
            for j in t + 1..c {
                if !w.a.get(t, j).is_zero() {
                    let q = near_quotient(w.a.get(t, j), &p);
                    w.sub_col(j, t, &q);
                    dirty |= !w.a.get(t, j).is_zero();
                }
            }
            if dirty {
                // a smaller remainder appeared in the pivot row or column
                let (pi, pj) = min_cross(&w.a, t, r, c);
                w.swap_rows(t, pi);
                w.swap_cols(t, pj);
                continue;
            }
            let p = w.a.get(t, t).clone();
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !w.a.get(i, j).is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    let one = BigInt::from(-1);
                    // row[t] += row[i]
                    w.sub_row(t, i, &one);
                }
                None => break,
            }
        }
        if w.a.get(t, t).is_negative() {
            w.negate_col(t);
        }
    }
    SnfResult {
        u: w.u,
        d: w.a,
        v: w.v,
        u_inv: w.u_inv,
        v_inv: w.v_inv,
    }
}

fn min_entry(
    a: &IntMatrix,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for i in rows {
        for j in cols.clone() {
            let v = a.get(i, j);
            if v.is_zero() {
                continue;
            }
            let av = v.abs();
            if best.as_ref().is_none_or(|(_, b)| av < *b) {
                best = Some(((i, j), av));
            }
        }
    }
    best.map(|(p, _)| p)
}

/// Minimal nonzero entry among the pivot row and pivot column of stage `t`.
fn min_cross(a: &IntMatrix, t: usize, r: usize, c: usize) -> (usize, usize) {
    let mut best = ((t, t), a.get(t, t).abs());
    for i in t + 1..r {
        let v = a.get(i, t);
        if !v.is_zero() && v.abs() < best.1 {
            best = ((i, t), v.abs());
        }
    }
    for j in t + 1..c {
        let v = a.get(t, j);
        if !v.is_zero() && v.abs() < best.1 {
            best = ((t, j), v.abs());
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::mat;
    use num_traits::One;

    fn check(m: &IntMatrix) -> SnfResult {
        let s = snf(m);
        assert_eq!(&(&s.u * m) * &s.v, s.d);
        assert!((&s.u * &s.u_inv).is_identity());
        assert!((&s.v * &s.v_inv).is_identity());
        let f = s.invariant_factors();
        for w in f.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        s
    }

    #[test]
    fn diagonal_example() {
        let s = check(&mat(&[[2, 0], [0, 3]]));
        assert_eq!(s.d, mat(&[[1, 0], [0, 6]]));
    }

    #[test]
    fn zero_and_unimodular() {
        let s = check(&IntMatrix::zeros(2, 2));
        assert!(s.d.is_zero() && s.u.is_identity() && s.v.is_identity());
        let s = check(&mat(&[[1, 1], [0, 1]]));
        assert!(s.d.is_identity());
    }

    #[test]
    fn rectangular() {
        let s = check(&mat(&[[6, 4, 2], [4, 8, 6]]));
        assert_eq!(
            s.invariant_factors(),
            vec![BigInt::from(2), BigInt::from(2)]
        );
        let s = check(&mat(&[[4], [6], [10]]));
        assert_eq!(s.invariant_factors(), vec![BigInt::from(2)]);
        assert_eq!(s.rank(), 1);
        let s = check(&mat(&[[0, 0, 0], [0, 0, 5]]));
        assert_eq!(s.invariant_factors()[0], BigInt::one() * 5);
    }

    #[test]
    fn negative_pivots() {
        for (a, p) in [(7, -4), (-7, -4), (7, 4), (-7, 4), (6, -4), (5, -2)] {
            let (a, p) = (BigInt::from(a), BigInt::from(p));
            let r = &a - near_quotient(&a, &p) * &p;
            assert!(&r.abs() * 2 <= p.abs(), "{a} / {p}");
        }
        check(&mat(&[
            [0, 124, 264, -316, 0, 0, 0, 0],
            [0, -204, -432, 516, 0, 0, 0, 0],
            [0, -168, -648, 720, 0, 516, -432, -204],
            [0, 112, 416, -464, 0, -316, 264, 124],
        ]));
    }

    #[test]
    fn deterministic() {
        let m = mat(&[[12, -7, 3], [5, 9, 11], [-4, 6, 2]]);
        assert_eq!(snf(&m), snf(&m));
    }
}
