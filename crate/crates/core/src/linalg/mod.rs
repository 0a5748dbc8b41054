//! Exact integer linear algebra: Smith normal form, unimodular column sets and
//! completion of such sets to a basis.

mod matrix;
pub mod serde_int;
mod smith;

pub use matrix::{ivec, mat, IntMatrix};
pub use smith::{snf, SnfResult};

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("expected {rows}x{cols} = {} entries, found {found}", rows * cols)]
    EntryCount {
        rows: usize,
        cols: usize,
        found: usize,
    },
    #[error("row {row} has a different length from the first row")]
    Ragged { row: usize },
    #[error("cannot {op} a {}x{} matrix with a {}x{} matrix", left.0, left.1, right.0, right.1)]
    Shape {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not unimodular (determinant {det})")]
    NotUnimodular { det: BigInt },
    #[error("{cols} columns cannot be independent in rank {rows}")]
    TooManyColumns { rows: usize, cols: usize },
    #[error("need at least one column")]
    NoColumns,
    #[error("columns do not extend to a basis (invariant factors {factors:?})")]
    NotCompletable { factors: Vec<BigInt> },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Whether the columns of `m` extend to a basis of the full lattice.
pub fn is_unimodular_set(m: &IntMatrix) -> Result<bool, LinalgError> {
    if m.cols() == 0 {
        return Err(LinalgError::NoColumns);
    }
    if m.cols() > m.rows() {
        return Err(LinalgError::TooManyColumns {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let s = snf(m);
    Ok(s.invariant_factors().iter().all(One::is_one))
}

/// Extends the columns of `m` (n x k) to an n x n unimodular matrix whose first
/// `k` columns are exactly those of `m`.
pub fn complete_to_basis(m: &IntMatrix) -> Result<IntMatrix, LinalgError> {
    if !is_unimodular_set(m)? {
        return Err(LinalgError::NotCompletable {
            factors: snf(m).invariant_factors(),
        });
    }
    let (n, k) = (m.rows(), m.cols());
    let s = snf(m);
    // U m V = [I; 0] gives m = U^{-1} [V^{-1}; 0].
    let right = IntMatrix::block_diag(&[&s.v_inv, &IntMatrix::identity(n - k)]);
    let c = &s.u_inv * &right;
    debug_assert_eq!(c.submatrix(0, n, 0, k), *m);
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unimodular_sets() {
        assert!(is_unimodular_set(&mat(&[[1, 1], [0, 1]])).unwrap());
        assert!(!is_unimodular_set(&mat(&[[2], [0]])).unwrap());
        assert!(is_unimodular_set(&mat(&[[1, 0], [0, 2], [0, 1]])).unwrap());
        assert!(matches!(
            is_unimodular_set(&mat(&[[1, 0, 0], [0, 1, 0]])),
            Err(LinalgError::TooManyColumns { .. })
        ));
    }

    #[test]
    fn completion_contract() {
        for m in [
            mat(&[[0], [1]]),
            mat(&[[1, 0], [0, 2], [0, 1]]),
            mat(&[[3, 1], [5, 2]]),
            mat(&[[6], [10], [15]]),
        ] {
            let c = complete_to_basis(&m).unwrap();
            assert!(c.determinant().unwrap().abs_one());
            assert_eq!(c.submatrix(0, m.rows(), 0, m.cols()), m);
        }
        let full = mat(&[[2, 1], [1, 1]]);
        assert_eq!(complete_to_basis(&full).unwrap(), full);
        assert!(matches!(
            complete_to_basis(&mat(&[[2], [4]])),
            Err(LinalgError::NotCompletable { .. })
        ));
    }

    trait AbsOne {
        fn abs_one(&self) -> bool;
    }

    impl AbsOne for BigInt {
        fn abs_one(&self) -> bool {
            num_traits::Signed::abs(self).is_one()
        }
    }
}
