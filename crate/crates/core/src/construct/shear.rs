use num_bigint::BigInt;

use super::ConstructError;
use crate::linalg::IntMatrix;

/// An order-`n` automorphism `γ = σ⁻¹λσ` of a rank `2n-2` lattice sending
/// `e₁` to `e₁ + m(e_n - e_{n+1})` (1-based).
///
/// For `n = 2` the lattice has rank 3 and `σ = I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShearTriple {
    pub n: usize,
    pub m: i64,
    pub lambda: IntMatrix,
    pub sigma: IntMatrix,
    pub gamma: IntMatrix,
}

impl ShearTriple {
    pub fn rank(&self) -> usize {
        self.gamma.rows()
    }

    /// 0-based slots of `e₁`, `e_n` and `e_{n+1}`.
    pub fn slots(&self) -> (usize, usize, usize) {
        (0, self.n - 1, self.n)
    }

    pub fn gamma_inverse(&self) -> IntMatrix {
        self.gamma.inverse_unimodular().expect("γ is unimodular")
    }

    fn check(&self) -> Result<(), String> {
        let r = self.rank();
        let id = IntMatrix::identity(r);
        if !self.gamma.pow(self.n as u64).expect("square").is_identity() {
            return Err(format!("γ^{} is not the identity", self.n));
        }
        for j in 1..self.n {
            if self.n.is_multiple_of(j) && self.gamma.pow(j as u64).expect("square").is_identity() {
                return Err(format!("γ^{j} is already the identity"));
            }
        }
        let (a, b, c) = self.slots();
        let mut want = id.column(a);
        want[b] += self.m;
        want[c] -= self.m;
        if self.gamma.column(a) != want {
            return Err("γe₁ is not e₁ + m(e_n - e_{n+1})".into());
        }
        // λ stabilizes σ⟨e_i : i > 1⟩ iff γ keeps ⟨e_i : i > 1⟩
        if (1..r).any(|j| self.gamma.get(0, j) != &BigInt::from(0)) {
            return Err("λ does not stabilize σ⟨e_i : i > 1⟩".into());
        }
        Ok(())
    }
}

/// Builds λ, σ and γ; for `n >= 3` these are the explicit matrices
/// `λe_i = e_{i+1}` (`i < n-1`), `λe_{n-1} = -(e_1 + … + e_{n-1})`,
/// `σe_1 = -me_1 + e_n`, `σe_i = e_i + e_{i+n-1}` (`1 < i <= n-1`),
/// `σe_i = e_{i-n+1}` (`i >= n`).
pub fn order_n_shear(n: usize, m: i64) -> Result<ShearTriple, ConstructError> {
    if n < 2 || m < 2 {
        return Err(ConstructError::Argument(format!(
            "order_n_shear needs n >= 2 and m >= 2, got n = {n}, m = {m}"
        )));
    }
    let triple = if n == 2 {
        let lambda = IntMatrix::from_rows(&[[1, 0, 0], [m, -1, 0], [-m, 2, 1]])?;
        ShearTriple {
            n,
            m,
            gamma: lambda.clone(),
            lambda,
            sigma: IntMatrix::identity(3),
        }
    } else {
        let r = 2 * n - 2;
        let mut lambda = IntMatrix::identity(r);
        let mut sigma = IntMatrix::zeros(r, r);
        // 0-based column j holds the image of e_{j+1}
        for j in 0..n - 2 {
            lambda.set(j, j, BigInt::from(0));
            lambda.set(j + 1, j, BigInt::from(1));
        }
        for i in 0..n - 1 {
            lambda.set(i, n - 2, BigInt::from(-1));
        }
        sigma.set(0, 0, BigInt::from(-m));
        sigma.set(n - 1, 0, BigInt::from(1));
        for j in 1..n - 1 {
            sigma.set(j, j, BigInt::from(1));
            sigma.set(j + n - 1, j, BigInt::from(1));
        }
        for j in n - 1..r {
            sigma.set(j + 1 - n, j, BigInt::from(1));
        }
        let sigma_inv = sigma.inverse_unimodular()?;
        let gamma = &(&sigma_inv * &lambda) * &sigma;
        ShearTriple {
            n,
            m,
            lambda,
            sigma,
            gamma,
        }
    };
    triple.check().map_err(ConstructError::Check)?;
    Ok(triple)
}
