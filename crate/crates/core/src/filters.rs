//! Finite traces of prime-set filters: Ω_P membership, centered families of
//! descriptors, graded automorphisms with prescribed ν, and the finite part of
//! the countable-cofinality counterexample.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::is_prime;
use crate::classify::{
    explicit_lambda_check, is_almost_radiation, lambda_levels, nu_set, PrimeSetDescriptor,
};
use crate::model::{AutError, RepAut};

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("{0}")]
    Argument(String),
    #[error(transparent)]
    Aut(#[from] AutError),
}

fn require_primes<'a>(ps: impl IntoIterator<Item = &'a u64>) -> Result<(), FilterError> {
    for &p in ps {
        if !is_prime(p) {
            return Err(FilterError::Argument(format!("{p} is not prime")));
        }
    }
    Ok(())
}

/// `φ ∈ Λ(p)` for every `p ∈ P`.
pub fn omega_member(phi: &RepAut, primes: &BTreeSet<u64>) -> Result<bool, FilterError> {
    require_primes(primes)?;
    let levels = lambda_levels(phi);
    Ok(primes.iter().all(|&p| levels.contains(p)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CenteredWitness {
    /// A prime lying in every member of the subfamily (indices into the input).
    Common { subfamily: Vec<usize>, prime: u64 },
    /// A subfamily whose intersection is empty.
    Empty { subfamily: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenteredFamilyReport {
    pub input: Vec<PrimeSetDescriptor>,
    pub subfamily_size: usize,
    pub verdict: bool,
    pub witness: CenteredWitness,
    /// Number of subfamilies examined.
    pub checked: usize,
}

/// Some prime in the intersection of the given descriptors, if there is one.
///
/// A finite member bounds the candidates; otherwise every member is
/// cofinite and the smallest prime outside the union of exclusions works.
pub fn intersection_witness(members: &[&PrimeSetDescriptor]) -> Option<u64> {
    let normal: Vec<PrimeSetDescriptor> = members.iter().map(|d| d.normalized()).collect();
    let finite = normal
        .iter()
        .filter_map(|d| match d {
            PrimeSetDescriptor::Finite(s) => Some(s),
            _ => None,
        })
        .min_by_key(|s| s.len());
    match finite {
        Some(s) => s
            .iter()
            .copied()
            .find(|&p| normal.iter().all(|d| d.contains(p))),
        None => (2..).find(|&p| normal.iter().all(|d| d.contains(p))),
    }
}

/// Checks every subfamily of size at most `size` for a common prime, smallest
/// subfamilies first; stops at the first empty intersection.
pub fn centered_check(
    descriptors: &[PrimeSetDescriptor],
    size: usize,
) -> Result<CenteredFamilyReport, FilterError> {
    if size > descriptors.len() {
        return Err(FilterError::Argument(format!(
            "subfamily size {size} exceeds family size {}",
            descriptors.len()
        )));
    }
    let mut checked = 0;
    let mut last = None;
    for k in 1..=size {
        for idx in (0..descriptors.len()).combinations(k) {
            checked += 1;
            let members: Vec<&PrimeSetDescriptor> = idx.iter().map(|&i| &descriptors[i]).collect();
            match intersection_witness(&members) {
                Some(prime) => last = Some((idx, prime)),
                None => {
                    return Ok(CenteredFamilyReport {
                        input: descriptors.to_vec(),
                        subfamily_size: size,
                        verdict: false,
                        witness: CenteredWitness::Empty { subfamily: idx },
                        checked,
                    })
                }
            }
        }
    }
    let (subfamily, prime) = last.unwrap_or_default();
    Ok(CenteredFamilyReport {
        input: descriptors.to_vec(),
        subfamily_size: size,
        verdict: true,
        witness: CenteredWitness::Common { subfamily, prime },
        checked,
    })
}

impl CenteredFamilyReport {
    /// Rechecks the witness against the descriptors.
    pub fn witness_holds(&self) -> bool {
        match (&self.witness, self.verdict) {
            (CenteredWitness::Common { subfamily, prime }, true) => subfamily
                .iter()
                .all(|&i| self.input.get(i).is_some_and(|d| d.contains(*prime))),
            (CenteredWitness::Empty { subfamily }, false) => {
                let members: Option<Vec<&PrimeSetDescriptor>> =
                    subfamily.iter().map(|&i| self.input.get(i)).collect();
                members.is_some_and(|m| intersection_witness(&m).is_none())
            }
            _ => false,
        }
    }
}

/// Graded automorphism with multipliers `prefix` followed by the increasing
/// primes outside `excluded`; its ν-set is `prefix ∪ (all primes ∖ excluded)`.
pub fn graded_construct(prefix: &[u64], excluded: &BTreeSet<u64>) -> Result<RepAut, FilterError> {
    require_primes(prefix)?;
    require_primes(excluded)?;
    if prefix.iter().duplicates().next().is_some() {
        return Err(FilterError::Argument(
            "prefix primes must be distinct".into(),
        ));
    }
    if let Some(p) = prefix.iter().find(|p| excluded.contains(p)) {
        return Err(FilterError::Argument(format!(
            "{p} is both a prefix prime and excluded"
        )));
    }
    Ok(RepAut::graded(prefix.to_vec(), excluded.clone())?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MembershipCheck {
    /// The excluded prime `p` of `φ_p`.
    pub automorphism: u64,
    pub level: u64,
    pub expected: bool,
    pub by_rule: bool,
    /// `None` when there is no explicit window check for a non-member.
    pub by_window: Option<bool>,
}

impl MembershipCheck {
    pub fn holds(&self) -> bool {
        self.by_rule == self.expected && self.by_window.is_none_or(|w| w == self.expected)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub primes: Vec<u64>,
    pub probe: u64,
    pub checks: Vec<MembershipCheck>,
    /// Every `φ_p` is outside the almost-radiations.
    pub none_radiation: bool,
}

impl CounterexampleReport {
    pub fn all_verified(&self) -> bool {
        self.none_radiation && self.checks.iter().all(MembershipCheck::holds)
    }
}

fn check_membership(phi: &RepAut, p: u64, level: u64, expected: bool) -> MembershipCheck {
    let by_rule = lambda_levels(phi).contains(level);
    // a failed window check on one window proves nothing, so only members are
    // confirmed explicitly
    let by_window = expected.then(|| explicit_lambda_check(phi, level, 2).is_some());
    MembershipCheck {
        automorphism: p,
        level,
        expected,
        by_rule,
        by_window,
    }
}

/// Builds `φ_p` (all primes but `p` in its tail) for each odd prime `p` and
/// confirms `φ_p ∈ Λ(2)`, `φ_p ∈ Λ(q)` and `φ_p ∉ Λ(p)`: a normal closure of
/// finitely many `φ_p` containing `Γ(2)` would sit below `Λ(q)`.
pub fn counterexample_demo(
    primes: &[u64],
    probe: u64,
) -> Result<CounterexampleReport, FilterError> {
    if primes.is_empty() {
        return Err(FilterError::Argument("need at least one prime".into()));
    }
    require_primes(primes)?;
    require_primes([&probe])?;
    if let Some(p) = primes.iter().find(|&&p| p == 2) {
        return Err(FilterError::Argument(format!("{p} is not odd")));
    }
    if !primes.windows(2).all(|w| w[0] < w[1]) {
        return Err(FilterError::Argument(
            "primes must be strictly increasing".into(),
        ));
    }
    let top = *primes.last().expect("nonempty");
    if probe <= top {
        return Err(FilterError::Argument(format!(
            "probe {probe} must exceed every listed prime (largest {top})"
        )));
    }
    let mut checks = Vec::new();
    let mut none_radiation = true;
    for &p in primes {
        let phi = graded_construct(&[], &BTreeSet::from([p]))?;
        none_radiation &= !is_almost_radiation(&phi);
        debug_assert!(nu_set(&phi).same_set(&PrimeSetDescriptor::AllExcept(BTreeSet::from([p]))));
        checks.push(check_membership(&phi, p, 2, true));
        checks.push(check_membership(&phi, p, probe, true));
        checks.push(check_membership(&phi, p, p, false));
    }
    Ok(CounterexampleReport {
        primes: primes.to_vec(),
        probe,
        checks,
        none_radiation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{common_lambda_level, CommonLevel};
    use crate::linalg::mat;

    fn set(v: &[u64]) -> BTreeSet<u64> {
        v.iter().copied().collect()
    }

    #[test]
    fn omega_membership() {
        let phi = RepAut::uniform(mat(&[[1, 6], [0, 1]])).unwrap();
        assert!(omega_member(&phi, &set(&[2, 3])).unwrap());
        assert!(!omega_member(&phi, &set(&[2, 5])).unwrap());
        let minus = RepAut::uniform(mat(&[[-1, 0], [0, -1]])).unwrap();
        assert!(omega_member(&minus, &set(&[2, 3, 5, 97])).unwrap());
        assert!(omega_member(&phi, &set(&[4])).is_err());
    }

    #[test]
    fn centered_examples() {
        let f = |v: &[u64]| PrimeSetDescriptor::Finite(set(v));
        let r = centered_check(&[f(&[2, 3]), f(&[3, 5])], 2).unwrap();
        assert!(r.verdict && r.witness_holds());
        assert_eq!(
            r.witness,
            CenteredWitness::Common {
                subfamily: vec![0, 1],
                prime: 3
            }
        );

        let r = centered_check(&[f(&[2]), f(&[3])], 2).unwrap();
        assert!(!r.verdict && r.witness_holds());
        assert_eq!(
            r.witness,
            CenteredWitness::Empty {
                subfamily: vec![0, 1]
            }
        );

        let fam = [
            PrimeSetDescriptor::AllExcept(set(&[2])),
            PrimeSetDescriptor::AllExcept(set(&[3])),
            f(&[5, 7]),
        ];
        let r = centered_check(&fam, 3).unwrap();
        assert!(r.verdict && r.witness_holds());
        match r.witness {
            CenteredWitness::Common { prime, .. } => assert!(prime == 5 || prime == 7),
            _ => unreachable!(),
        }
        assert!(centered_check(&fam, 4).is_err());
    }

    #[test]
    fn graded_examples() {
        let phi = graded_construct(&[3], &BTreeSet::new()).unwrap();
        let levels = lambda_levels(&phi);
        assert!(levels.contains(3) && levels.contains(6) && levels.contains(30));
        assert!(!levels.contains(9) && !levels.contains(4));
        assert!(nu_set(&phi).same_set(&PrimeSetDescriptor::AllPrimes));
        assert!(!is_almost_radiation(&phi));

        let phi = graded_construct(&[], &set(&[7])).unwrap();
        assert!(nu_set(&phi).same_set(&PrimeSetDescriptor::AllExcept(set(&[7]))));

        assert!(graded_construct(&[3], &set(&[3])).is_err());
        assert!(graded_construct(&[3, 3], &BTreeSet::new()).is_err());
    }

    #[test]
    fn prefix_chain_memberships() {
        let phi = graded_construct(&[5, 3], &set(&[11])).unwrap();
        let RepAut::Graded(g) = &phi else {
            unreachable!()
        };
        let mut product = 1u64;
        for m in g.multipliers(6) {
            product *= m;
            assert!(lambda_levels(&phi).contains(product));
            assert!(explicit_lambda_check(&phi, product, 2).is_some());
        }
        for p in [2u64, 7, 13] {
            assert!(!lambda_levels(&phi).contains(p * p));
        }
    }

    #[test]
    fn graded_pairs_share_levels() {
        let a = graded_construct(&[3], &set(&[5])).unwrap();
        let b = graded_construct(&[5], &set(&[3])).unwrap();
        assert!(matches!(
            common_lambda_level(&[a, b]),
            CommonLevel::Unbounded { .. }
        ));
    }

    #[test]
    fn demo() {
        let r = counterexample_demo(&[3, 5], 7).unwrap();
        assert_eq!(r.checks.len(), 6);
        assert!(r.all_verified());
        assert!(counterexample_demo(&[3], 5).unwrap().all_verified());
        assert!(counterexample_demo(&[3, 5], 3).is_err());
        assert!(counterexample_demo(&[2, 5], 7).is_err());
    }
}
