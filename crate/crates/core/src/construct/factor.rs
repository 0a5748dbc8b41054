use num_bigint::BigInt;
use num_traits::Zero;

use super::{checked, xfirst_shear, ConstructError};
use crate::linalg::{snf, IntMatrix};
use crate::model::{evaluate_symbolic, Certificate, Claim, Environment, GroupWord, RepAut, Target};

/// Three automorphisms, each the identity-free extension of a `d x d` window
/// part by 2x2 tail blocks, whose window parts add up to `f` and whose tails
/// add up to zero.
#[derive(Clone, Debug)]
pub struct WansTriple {
    pub f: IntMatrix,
    pub heads: [IntMatrix; 3],
    pub tails: [IntMatrix; 3],
    pub parts: [RepAut; 3],
}

fn companion() -> IntMatrix {
    IntMatrix::from_rows(&[[0, -1], [1, 1]]).expect("2x2")
}

fn is_diagonal(f: &IntMatrix) -> bool {
    (0..f.rows()).all(|i| (0..f.cols()).all(|j| i == j || f.get(i, j).is_zero()))
}

/// Writes `diag(a, b)` as `[[a, 1], [1, 0]] + [[0, -1], [-1, b]]`, pair by pair.
fn pair_diagonal(diag: &[BigInt]) -> (IntMatrix, IntMatrix) {
    let d = diag.len();
    let mut a = IntMatrix::zeros(d, d);
    let mut b = IntMatrix::zeros(d, d);
    for j in (0..d).step_by(2) {
        a.set(j, j, diag[j].clone());
        a.set(j, j + 1, BigInt::from(1));
        a.set(j + 1, j, BigInt::from(1));
        b.set(j, j + 1, BigInt::from(-1));
        b.set(j + 1, j, BigInt::from(-1));
        b.set(j + 1, j + 1, diag[j + 1].clone());
    }
    (a, b)
}

/// Splits an arbitrary `d x d` matrix (`d` even) into three automorphisms.
pub fn wans_three(f: &IntMatrix) -> Result<WansTriple, ConstructError> {
    let d = f.rows();
    if !f.is_square() || d == 0 || !d.is_multiple_of(2) {
        return Err(ConstructError::Dimension(format!(
            "need a square matrix of even size, got {}x{}",
            f.rows(),
            f.cols()
        )));
    }
    let p = companion();
    let id2 = IntMatrix::identity(2);
    let tails = [p.clone(), -&id2, &id2 - &p];
    let ph = IntMatrix::repeat_block(&p, d / 2);
    let id = IntMatrix::identity(d);
    let heads = if f.is_zero() {
        [ph.clone(), -&id, &id - &ph]
    } else {
        let (u_inv, diag, v_inv) = if is_diagonal(f) {
            let diag = (0..d).map(|i| f.get(i, i).clone()).collect::<Vec<_>>();
            (id.clone(), diag, id.clone())
        } else {
            let s = snf(f);
            let diag = (0..d).map(|i| s.d.get(i, i).clone()).collect::<Vec<_>>();
            (s.u_inv, diag, s.v_inv)
        };
        let (a, b) = pair_diagonal(&diag);
        let around = |m: &IntMatrix| &(&u_inv * m) * &v_inv;
        [
            around(&a),
            around(&(&b * &ph)),
            around(&(&b * &(&id - &ph))),
        ]
    };
    let sum = &(&heads[0] + &heads[1]) + &heads[2];
    if sum != *f {
        return Err(ConstructError::Check(
            "window parts do not add up to f".into(),
        ));
    }
    let tail_sum = &(&tails[0] + &tails[1]) + &tails[2];
    if !tail_sum.is_zero() {
        return Err(ConstructError::Check("tail parts do not cancel".into()));
    }
    let mut parts = Vec::with_capacity(3);
    for (h, t) in heads.iter().zip(&tails) {
        parts.push(RepAut::eventually_uniform(h.clone(), t.clone())?);
    }
    let parts: [RepAut; 3] = parts.try_into().expect("three parts");
    Ok(WansTriple {
        f: f.clone(),
        heads,
        tails,
        parts,
    })
}

#[derive(Clone, Debug)]
pub struct FactorWitness {
    /// `x_i ↦ x_i + m·(Z y)_i` on the first block, identity elsewhere.
    pub beta: RepAut,
    pub word: GroupWord,
    pub certificate: Certificate,
    /// The three conjugates `σ_k τ^m σ_k⁻¹`, in word order.
    pub factors: [RepAut; 3],
}

fn factor_inner(m: i64, z: &IntMatrix) -> Result<FactorWitness, ConstructError> {
    let wans = wans_three(z)?;
    let d = z.rows();
    let id = IntMatrix::identity(d);
    let mut head = IntMatrix::identity(2 * d);
    head.set_block(d, 0, &z.scale(&BigInt::from(m)));
    let beta = RepAut::eventually_uniform(head, IntMatrix::identity(2 * d))?;

    let mut env = Environment::new();
    env.insert("tau".into(), RepAut::uniform(xfirst_shear(d, m))?);
    let mut factors = Vec::new();
    for (k, (h, t)) in wans.heads.iter().zip(&wans.tails).enumerate() {
        let tail = IntMatrix::repeat_block(t, d / 2);
        let sigma = RepAut::eventually_uniform(
            IntMatrix::block_diag(&[&id, h]),
            IntMatrix::block_diag(&[&id, &tail]),
        )?;
        let name = format!("sigma_{}", k + 1);
        env.insert(name.clone(), sigma);
        factors.push(GroupWord::conj(
            GroupWord::named("tau"),
            GroupWord::named(name),
        ));
    }
    let conjugates = factors
        .iter()
        .map(|w| evaluate_symbolic(w, &env))
        .collect::<Result<Vec<_>, _>>()?;
    let word = GroupWord::product(factors);
    let cert = Certificate::new(
        Claim::WindowIdentity {
            target: Target::Automorphism { aut: beta.clone() },
        },
        word.clone(),
        env,
        vec![2 * d, 4 * d],
    );
    let certificate = checked(cert, "three-conjugate product")?;
    Ok(FactorWitness {
        beta,
        word,
        certificate,
        factors: conjugates.try_into().expect("three conjugates"),
    })
}

/// Writes the block-unitriangular `β` (`β x_i = x_i + m (Z y)_i`, `β y = y`)
/// as a product of exactly three conjugates of `τ^m`.
pub fn factor_block_unitriangular(m: i64, z: &IntMatrix) -> Result<FactorWitness, ConstructError> {
    if m < 2 {
        return Err(ConstructError::Argument(format!(
            "m must be at least 2, got {m}"
        )));
    }
    factor_inner(m, z)
}

/// The `m = 1` instance: a certificate that the three parts of
/// [`wans_three`] add up to `f`, phrased as a product of conjugates of `τ`.
pub fn sum_certificate(f: &IntMatrix) -> Result<FactorWitness, ConstructError> {
    factor_inner(1, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::congruence_gcd;
    use crate::linalg::mat;
    use num_integer::Integer;

    fn det_pm1(m: &IntMatrix) -> bool {
        m.is_unimodular()
    }

    #[test]
    fn zero_matrix() {
        let w = wans_three(&IntMatrix::zeros(2, 2)).unwrap();
        assert_eq!(w.heads[0], mat(&[[0, -1], [1, 1]]));
        assert_eq!(w.heads[1], mat(&[[-1, 0], [0, -1]]));
        assert_eq!(w.heads[2], mat(&[[1, 1], [-1, 0]]));
        assert!(w.heads.iter().all(det_pm1));
    }

    #[test]
    fn diagonal_pairing() {
        let w = wans_three(&mat(&[[5, 0], [0, 7]])).unwrap();
        assert_eq!(w.heads[0], mat(&[[5, 1], [1, 0]]));
        assert!(w.heads.iter().all(det_pm1));
        assert_eq!(
            &(&w.heads[0] + &w.heads[1]) + &w.heads[2],
            mat(&[[5, 0], [0, 7]])
        );
    }

    #[test]
    fn odd_size_rejected() {
        assert!(matches!(
            wans_three(&IntMatrix::identity(3)),
            Err(ConstructError::Dimension(_))
        ));
    }

    #[test]
    fn three_conjugates() {
        let w = factor_block_unitriangular(3, &IntMatrix::identity(2)).unwrap();
        assert_eq!(w.word.top_level_conjugates(), 3);
        assert_eq!(
            w.beta.window_matrix(4).unwrap(),
            crate::model::evaluate_word(&w.word, &w.certificate.environment, 4).unwrap()
        );
        let w = factor_block_unitriangular(2, &mat(&[[2, 1], [0, 1]])).unwrap();
        assert_eq!(w.certificate.windows, vec![4, 8]);
        for f in &w.factors {
            assert!(congruence_gcd(f).is_multiple_of(&BigInt::from(2)));
        }
        let w = factor_block_unitriangular(5, &IntMatrix::zeros(2, 2)).unwrap();
        assert!(w.beta.window_matrix(4).unwrap().is_identity());
        assert!(factor_block_unitriangular(1, &IntMatrix::identity(2)).is_err());
    }
}
