use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use super::{checked, tau_power, ConstructError};
use crate::arith::{bezout_minimal, euler_phi, gcd_all, pow_mod};
use crate::model::{Certificate, Environment, GroupWord};

/// Result of combining `φ_s x = k_s x + m_s y_s` for `s = 1..ℓ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugateProduct {
    pub k: BigInt,
    pub m: BigInt,
    /// Coefficient of `y_s` in `ψx`: `(∏_{t>s} k_t)·m_s`, and `m_ℓ` for the last.
    pub coefficients: Vec<BigInt>,
}

pub fn conjugate_product_reduce(pairs: &[(i64, i64)]) -> Result<ConjugateProduct, ConstructError> {
    if pairs.is_empty() {
        return Err(ConstructError::Argument("need at least one pair".into()));
    }
    for &(k, m) in pairs {
        if m < 2 {
            return Err(ConstructError::Argument(format!("modulus {m} is below 2")));
        }
        if k.gcd(&m) != 1 {
            return Err(ConstructError::Argument(format!("gcd({k}, {m}) is not 1")));
        }
    }
    let k = pairs.iter().fold(BigInt::one(), |acc, &(k, _)| acc * k);
    let mut coefficients = Vec::with_capacity(pairs.len());
    let mut suffix = BigInt::one();
    for &(ks, ms) in pairs.iter().rev() {
        coefficients.push(&suffix * ms);
        suffix *= ks;
    }
    coefficients.reverse();
    let m = gcd_all(&coefficients);
    let direct = gcd_all(
        &pairs
            .iter()
            .map(|&(_, m)| BigInt::from(m))
            .collect::<Vec<_>>(),
    );
    if m != direct {
        return Err(ConstructError::Check(format!(
            "gcd of coefficients is {m} but gcd of moduli is {direct}"
        )));
    }
    Ok(ConjugateProduct { k, m, coefficients })
}

/// `ℓ = φ(m)`, with `k^ℓ ≡ 1 (mod m)` checked.
pub fn euler_reduce(k: &BigInt, m: u64) -> Result<u64, ConstructError> {
    if m < 2 {
        return Err(ConstructError::Argument(format!("modulus {m} is below 2")));
    }
    let bm = BigInt::from(m);
    if !k.gcd(&bm).is_one() {
        return Err(ConstructError::Argument(format!("gcd({k}, {m}) is not 1")));
    }
    let l = euler_phi(m);
    if !pow_mod(k, l, &bm).is_one() {
        return Err(ConstructError::Check(format!("{k}^{l} is not 1 mod {m}")));
    }
    Ok(l)
}

/// Multiplicative order of `k` modulo `m`: the least `ℓ` dividing the Euler
/// value with `k^ℓ ≡ 1 (mod m)`.
pub fn order_reduce(k: &BigInt, m: u64) -> Result<u64, ConstructError> {
    let l = euler_reduce(k, m)?;
    let bm = BigInt::from(m);
    let order = (1..=l)
        .filter(|d| l % d == 0)
        .find(|&d| pow_mod(k, d, &bm).is_one())
        .expect("the Euler value itself works");
    Ok(order)
}

#[derive(Clone, Debug)]
pub struct BezoutWitness {
    pub a: i64,
    pub b: i64,
    pub word: GroupWord,
    pub certificate: Certificate,
}

/// `a n₁ + b n₂ = 1` with `a` of least absolute value.
pub(crate) fn bezout_exponents(n1: i64, n2: i64) -> Result<(i64, i64), ConstructError> {
    if n1 < 1 || n2 < 1 {
        return Err(ConstructError::Argument(format!(
            "coprime pair must be positive, got ({n1}, {n2})"
        )));
    }
    let (g, a, b) = bezout_minimal(n1, n2);
    if g != 1 {
        return Err(ConstructError::Argument(format!(
            "gcd({n1}, {n2}) = {g}, not 1"
        )));
    }
    Ok((a, b))
}

/// `(τ^{mn₁})^a (τ^{mn₂})^b = τ^m`.
pub fn bezout_combine(m: i64, n1: i64, n2: i64) -> Result<BezoutWitness, ConstructError> {
    if m < 1 {
        return Err(ConstructError::Argument(format!(
            "m must be positive, got {m}"
        )));
    }
    let (a, b) = bezout_exponents(n1, n2)?;
    let (p, q) = (format!("tau_{}", m * n1), format!("tau_{}", m * n2));
    let mut env = Environment::new();
    env.insert(p.clone(), tau_power(m * n1));
    env.insert(q.clone(), tau_power(m * n2));
    let word = GroupWord::product(vec![
        GroupWord::power(GroupWord::named(p), a),
        GroupWord::power(GroupWord::named(q), b),
    ]);
    let cert = Certificate::window_identity(word.clone(), env, tau_power(m))?;
    let certificate = checked(cert, "coprime combination")?;
    Ok(BezoutWitness {
        a,
        b,
        word,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn conjugate_products() {
        let r = conjugate_product_reduce(&[(3, 2)]).unwrap();
        assert_eq!(
            (r.k, r.m, r.coefficients),
            (BigInt::from(3), BigInt::from(2), big(&[2]))
        );
        let r = conjugate_product_reduce(&[(5, 4), (3, 4)]).unwrap();
        assert_eq!(
            (r.k, r.m, r.coefficients),
            (BigInt::from(15), BigInt::from(4), big(&[12, 4]))
        );
        let r = conjugate_product_reduce(&[(1, 6), (1, 10), (1, 15)]).unwrap();
        assert_eq!(r.coefficients, big(&[6, 10, 15]));
        assert!(r.m.is_one());
        assert!(conjugate_product_reduce(&[(2, 4)]).is_err());
    }

    #[test]
    fn euler() {
        assert_eq!(euler_reduce(&BigInt::from(3), 4).unwrap(), 2);
        assert_eq!(euler_reduce(&BigInt::from(1), 7).unwrap(), 6);
        assert_eq!(euler_reduce(&BigInt::from(5), 12).unwrap(), 4);
        assert_eq!(euler_reduce(&BigInt::from(-1), 4).unwrap(), 2);
        assert!(euler_reduce(&BigInt::from(2), 4).is_err());
        assert_eq!(order_reduce(&BigInt::from(-1), 11).unwrap(), 2);
        assert_eq!(order_reduce(&BigInt::from(1), 7).unwrap(), 1);
        assert_eq!(order_reduce(&BigInt::from(2), 7).unwrap(), 3);
        assert_eq!(order_reduce(&BigInt::from(3), 4).unwrap(), 2);
        assert!(order_reduce(&BigInt::from(2), 4).is_err());
    }

    #[test]
    fn bezout() {
        let w = bezout_combine(2, 3, 5).unwrap();
        assert_eq!((w.a, w.b), (2, -1));
        assert_eq!(w.certificate.windows, vec![4, 8]);
        let w = bezout_combine(1, 2, 3).unwrap();
        assert_eq!((w.a, w.b), (-1, 1));
        assert!(bezout_combine(2, 4, 4).is_err());
    }
}
