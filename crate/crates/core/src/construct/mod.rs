//! Witness engines: each construction returns group words together with
//! certificates that have already been rechecked by window arithmetic.

mod factor;
mod pipeline;
mod reduce;
mod shear;
mod zaushko;

pub use factor::{
    factor_block_unitriangular, sum_certificate, wans_three, FactorWitness, WansTriple,
};
pub use pipeline::{
    km_pipeline, ladder_chain, normalize_shear, ChainStep, Normalization, WitnessChain,
};
pub use reduce::{
    bezout_combine, conjugate_product_reduce, euler_reduce, order_reduce, BezoutWitness,
    ConjugateProduct,
};
pub use shear::{order_n_shear, ShearTriple};
pub use zaushko::{y_displacement, zaushko_commutator, ZaushkoWitness};

use num_bigint::BigInt;
use thiserror::Error;

use crate::linalg::{IntMatrix, LinalgError};
use crate::model::{AutError, Certificate, MalformedCertificate, RepAut};

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("{0}")]
    Argument(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("shape error: {0}")]
    Shape(String),
    /// A step would need a conjugator outside the representable classes.
    #[error("out of representable scope at step `{step}`: {reason}")]
    OutOfScope { step: String, reason: String },
    #[error("internal check failed: {0}")]
    Check(String),
    #[error(transparent)]
    Aut(#[from] AutError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("malformed certificate: {0}")]
    Malformed(#[from] MalformedCertificate),
}

/// `τ^m`: the uniform automorphism `x_i ↦ x_i + m·y_i`, fixing every `y_i`.
pub fn tau_power(m: i64) -> RepAut {
    RepAut::uniform(IntMatrix::from_rows(&[[1, 0], [m, 1]]).expect("2x2")).expect("unimodular")
}

/// `τ^m` on the coordinates from `head` on, identity before.
pub(crate) fn tau_power_after(m: &BigInt, head: usize) -> Result<RepAut, AutError> {
    let block = IntMatrix::from_big_rows(vec![
        vec![BigInt::from(1), BigInt::from(0)],
        vec![m.clone(), BigInt::from(1)],
    ])?;
    if head == 0 {
        RepAut::uniform(block)
    } else {
        RepAut::eventually_uniform(IntMatrix::identity(head), block)
    }
}

/// Shear `[[I, 0], [m I, I]]` on blocks of `2d` coordinates with X first.
pub(crate) fn xfirst_shear(d: usize, m: i64) -> IntMatrix {
    let mut b = IntMatrix::identity(2 * d);
    for i in 0..d {
        b.set(d + i, i, BigInt::from(m));
    }
    b
}

/// Rechecks a freshly built certificate; constructions never hand out
/// certificates that fail.
pub(crate) fn checked(cert: Certificate, what: &str) -> Result<Certificate, ConstructError> {
    let v = cert.verify()?;
    if !v.holds {
        return Err(ConstructError::Check(format!(
            "{what}: {}",
            v.report.last().cloned().unwrap_or_default()
        )));
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::congruence_gcd;
    use crate::linalg::mat;

    #[test]
    fn tau_powers() {
        assert_eq!(
            tau_power(1).as_uniform_block().unwrap(),
            &mat(&[[1, 0], [1, 1]])
        );
        assert!(tau_power(0).is_identity());
        assert_eq!(congruence_gcd(&tau_power(4)), BigInt::from(4));
    }
}
