//! Small number-theory helpers over machine and big integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Nonnegative gcd of a sequence of big integers; the empty gcd is zero.
pub fn gcd_all<'a, I>(values: I) -> BigInt
where
    I: IntoIterator<Item = &'a BigInt>,
{
    let mut g = BigInt::zero();
    for v in values {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    g
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// All primes `p <= bound`, increasing.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&p| is_prime(p)).collect()
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// Prime factorization by trial division, primes increasing.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Distinct primes dividing a nonzero big integer, found by trial division up to `limit`.
///
/// Returns `None` if a cofactor larger than one remains that is not certified prime
/// by the search bound.
pub fn prime_divisors_big(n: &BigInt, limit: u64) -> Option<Vec<u64>> {
    let mut n = n.abs();
    if n.is_zero() {
        return None;
    }
    let mut out = Vec::new();
    let mut p = 2u64;
    while p <= limit {
        let bp = BigInt::from(p);
        if &bp * &bp > n {
            break;
        }
        if (&n % &bp).is_zero() {
            out.push(p);
            while (&n % &bp).is_zero() {
                n /= &bp;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n.is_one() {
        return Some(out);
    }
    let last = n.to_u64()?;
    if is_prime(last) {
        out.push(last);
        out.sort_unstable();
        Some(out)
    } else {
        None
    }
}

/// Exponent of the prime `p` in `n`; `None` for `n = 0`.
pub fn valuation(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let bp = BigInt::from(p);
    let mut n = n.abs();
    let mut e = 0;
    while (&n % &bp).is_zero() {
        n /= &bp;
        e += 1;
    }
    Some(e)
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Bezout coefficients `(a, b)` with `a*x + b*y = gcd(x, y)`, choosing the `a` of
/// least absolute value (the positive one on a tie).
pub fn bezout_minimal(x: i64, y: i64) -> (i64, i64, i64) {
    let e = x.extended_gcd(&y);
    let (g, mut a, mut b) = (e.gcd, e.x, e.y);
    if y == 0 || g == 0 {
        return (g, a, b);
    }
    let step_a = (y / g).abs();
    let step_b = if y / g > 0 { x / g } else { -(x / g) };
    let k = Integer::div_floor(&a, &step_a);
    a -= k * step_a;
    b += k * step_b;
    if a > step_a - a {
        a -= step_a;
        b += step_b;
    }
    (g, a, b)
}

pub fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

/// `base^exp mod m` for a positive modulus.
pub fn pow_mod(base: &BigInt, exp: u64, m: &BigInt) -> BigInt {
    base.mod_floor(m).modpow(&BigInt::from(exp), m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_factors() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(next_prime(7), 11);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(7), 6);
        assert_eq!(euler_phi(1), 1);
    }

    #[test]
    fn bezout_picks_small_coefficient() {
        assert_eq!(bezout_minimal(3, 5), (1, 2, -1));
        assert_eq!(bezout_minimal(2, 3), (1, -1, 1));
        for x in 1..30i64 {
            for y in 1..30i64 {
                let (g, a, b) = bezout_minimal(x, y);
                assert_eq!(a * x + b * y, g);
                assert_eq!(g, x.gcd(&y));
                assert!(2 * a.abs() <= y / g, "{x} {y} -> {a}");
            }
        }
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(&big(48), 2), Some(4));
        assert_eq!(valuation(&big(-45), 3), Some(2));
        assert_eq!(valuation(&big(0), 3), None);
        assert_eq!(prime_divisors_big(&big(-60), 100), Some(vec![2, 3, 5]));
    }
}
