use num_bigint::BigInt;

use super::{checked, ConstructError};
use crate::linalg::IntMatrix;
use crate::model::{Certificate, Claim, Environment, GroupWord, RepAut, Target};

#[derive(Clone, Debug)]
pub struct ZaushkoWitness {
    /// `x_i ↦ x_i`, `y_i ↦ y_i + x_i - ρx_i`.
    pub sigma: RepAut,
    pub word: GroupWord,
    pub certificate: Certificate,
}

/// `σ = π ρ⁻¹ τ⁻¹ ρ τ π` on uniform blocks `(x_0..x_{d-1}, y_0..y_{d-1})`,
/// where `ρ` acts by `ρ_X` on X and fixes Y, `τ` is `x ↦ x + y` and `π` swaps
/// X and Y.
pub fn zaushko_commutator(rho_x: &IntMatrix) -> Result<ZaushkoWitness, ConstructError> {
    if !rho_x.is_square() || rho_x.rows() == 0 {
        return Err(ConstructError::Argument(
            "ρ_X must be a nonempty square matrix".into(),
        ));
    }
    if !rho_x.is_unimodular() {
        return Err(ConstructError::Argument(format!(
            "ρ_X is not unimodular (determinant {})",
            rho_x.determinant()?
        )));
    }
    let d = rho_x.rows();
    let id = IntMatrix::identity(d);
    let rho = IntMatrix::block_diag(&[rho_x, &id]);
    let mut pi = IntMatrix::zeros(2 * d, 2 * d);
    pi.set_block(0, d, &id);
    pi.set_block(d, 0, &id);
    let tau = super::xfirst_shear(d, 1);

    let mut env = Environment::new();
    env.insert("pi".into(), RepAut::uniform(pi)?);
    env.insert("rho".into(), RepAut::uniform(rho)?);
    env.insert("tau".into(), RepAut::uniform(tau)?);
    let name = GroupWord::named;
    let word = GroupWord::product(vec![
        name("pi"),
        GroupWord::inverse(name("rho")),
        GroupWord::inverse(name("tau")),
        name("rho"),
        name("tau"),
        name("pi"),
    ]);

    let mut block = IntMatrix::identity(2 * d);
    block.set_block(0, d, &(&id - rho_x));
    let sigma = RepAut::uniform(block)?;
    let cert = Certificate::new(
        Claim::WindowIdentity {
            target: Target::Automorphism { aut: sigma.clone() },
        },
        word.clone(),
        env,
        vec![2 * d, 4 * d],
    );
    let certificate = checked(cert, "commutator identity")?;
    Ok(ZaushkoWitness {
        sigma,
        word,
        certificate,
    })
}

/// `σ(y_i) - y_i` read off a window matrix, as a vector in X coordinates.
pub fn y_displacement(sigma_window: &IntMatrix, d: usize, i: usize) -> Vec<BigInt> {
    (0..d).map(|r| sigma_window.get(r, d + i).clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ivec, mat};
    use crate::model::evaluate_word;

    #[test]
    fn negation() {
        let w = zaushko_commutator(&mat(&[[-1]])).unwrap();
        let m = evaluate_word(&w.word, &w.certificate.environment, 2).unwrap();
        assert_eq!(m, mat(&[[1, 2], [0, 1]]));
        assert_eq!(y_displacement(&m, 1, 0), ivec(&[2]));
    }

    #[test]
    fn identity_and_swap() {
        let w = zaushko_commutator(&mat(&[[1, 0], [0, 1]])).unwrap();
        assert!(w.sigma.is_identity());
        let w = zaushko_commutator(&mat(&[[0, 1], [1, 0]])).unwrap();
        let m = evaluate_word(&w.word, &w.certificate.environment, 4).unwrap();
        assert_eq!(y_displacement(&m, 2, 0), ivec(&[1, -1]));
        assert_eq!(y_displacement(&m, 2, 1), ivec(&[-1, 1]));
    }

    #[test]
    fn rejects_singular() {
        assert!(zaushko_commutator(&mat(&[[2]])).is_err());
    }
}
