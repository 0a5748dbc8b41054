//! Decision procedures: congruence level, Λ(m) membership, almost-radiations,
//! normal generation, the prime set ν and common levels of finite families.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{gcd_all, is_prime, next_prime, prime_divisors_big, valuation};
use crate::construct::{ladder_chain, WitnessChain};
use crate::linalg::{is_unimodular_set, IntMatrix, LinalgError};
use crate::model::{GradedBlock, RepAut};

/// The set `{m : φ ∈ Λ(m)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LambdaLevels {
    AllLevels,
    /// Exactly the divisors of `g` (with `g >= 2`).
    DivisorsOf(BigInt),
    /// No `m >= 2`.
    OnlyTrivial,
    RuleBased(LevelRule),
}

/// Levels of a graded automorphism: `m` is a level iff every prime power
/// `p^a` exactly dividing `m` has `a <= v_p(base) + [p is a tail prime]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelRule {
    pub base: BigInt,
    pub prefix: Vec<u64>,
    pub excluded: BTreeSet<u64>,
}

impl LevelRule {
    fn from_graded(g: &GradedBlock) -> Self {
        let base = g.prefix().iter().fold(g.scale().abs(), |acc, &m| acc * m);
        Self {
            base,
            prefix: g.prefix().to_vec(),
            excluded: g.excluded().clone(),
        }
    }

    pub fn is_tail_prime(&self, p: u64) -> bool {
        is_prime(p) && !self.excluded.contains(&p) && self.prefix.iter().all(|m| m % p != 0)
    }

    /// Largest exponent of `p` among the levels.
    pub fn cap(&self, p: u64) -> u32 {
        valuation(&self.base, p).unwrap_or(0) + u32::from(self.is_tail_prime(p))
    }

    pub fn contains(&self, m: u64) -> bool {
        crate::arith::factorize(m)
            .into_iter()
            .all(|(p, a)| a <= self.cap(p))
    }

    /// Largest prime that plays a role in the finite data of the rule.
    fn largest_relevant_prime(&self) -> u64 {
        let from_base = prime_divisors_big(&self.base, u64::MAX)
            .and_then(|v| v.last().copied())
            .unwrap_or(2);
        let from_prefix = self
            .prefix
            .iter()
            .flat_map(|&m| crate::arith::factorize(m).into_iter().map(|(p, _)| p))
            .max()
            .unwrap_or(2);
        let from_excluded = self.excluded.iter().copied().max().unwrap_or(2);
        from_base.max(from_prefix).max(from_excluded)
    }
}

impl LambdaLevels {
    /// Membership `φ ∈ Λ(m)`; every automorphism lies in `Λ(1)`.
    pub fn contains(&self, m: u64) -> bool {
        if m == 1 {
            return true;
        }
        match self {
            LambdaLevels::AllLevels => true,
            LambdaLevels::DivisorsOf(g) => m != 0 && g.is_multiple_of(&BigInt::from(m)),
            LambdaLevels::OnlyTrivial => false,
            LambdaLevels::RuleBased(r) => m != 0 && r.contains(m),
        }
    }
}

impl fmt::Display for LambdaLevels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaLevels::AllLevels => write!(f, "all levels"),
            LambdaLevels::DivisorsOf(g) => write!(f, "divisors of {g}"),
            LambdaLevels::OnlyTrivial => write!(f, "no level m >= 2"),
            LambdaLevels::RuleBased(r) => {
                write!(f, "rule: base {}, ", r.base)?;
                if r.excluded.is_empty() {
                    write!(f, "every tail prime once")
                } else {
                    write!(f, "every tail prime once, excluding {:?}", r.excluded)
                }
            }
        }
    }
}

/// A set of primes given by finite data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(tag = "kind", content = "primes", rename_all = "snake_case")]
pub enum PrimeSetDescriptor {
    Finite(BTreeSet<u64>),
    AllPrimes,
    AllExcept(BTreeSet<u64>),
    /// `finite ∪ (all primes except excluded)`
    UnionWithPrefix {
        finite: BTreeSet<u64>,
        excluded: BTreeSet<u64>,
    },
}

impl PrimeSetDescriptor {
    pub fn contains(&self, p: u64) -> bool {
        if !is_prime(p) {
            return false;
        }
        match self {
            PrimeSetDescriptor::Finite(s) => s.contains(&p),
            PrimeSetDescriptor::AllPrimes => true,
            PrimeSetDescriptor::AllExcept(e) => !e.contains(&p),
            PrimeSetDescriptor::UnionWithPrefix { finite, excluded } => {
                finite.contains(&p) || !excluded.contains(&p)
            }
        }
    }

    /// Equivalent descriptor in the simplest shape.
    pub fn normalized(&self) -> Self {
        let cofinite = |e: BTreeSet<u64>| {
            let e: BTreeSet<u64> = e.into_iter().filter(|&p| is_prime(p)).collect();
            if e.is_empty() {
                PrimeSetDescriptor::AllPrimes
            } else {
                PrimeSetDescriptor::AllExcept(e)
            }
        };
        match self {
            PrimeSetDescriptor::Finite(s) => {
                PrimeSetDescriptor::Finite(s.iter().copied().filter(|&p| is_prime(p)).collect())
            }
            PrimeSetDescriptor::AllPrimes => PrimeSetDescriptor::AllPrimes,
            PrimeSetDescriptor::AllExcept(e) => cofinite(e.clone()),
            PrimeSetDescriptor::UnionWithPrefix { finite, excluded } => {
                cofinite(excluded.difference(finite).copied().collect())
            }
        }
    }

    pub fn is_cofinite(&self) -> bool {
        !matches!(self.normalized(), PrimeSetDescriptor::Finite(_))
    }

    /// Set equality, decided on normal forms.
    pub fn same_set(&self, other: &Self) -> bool {
        self.normalized() == other.normalized()
    }

    /// The finite exclusion set of a cofinite descriptor, or the explicit
    /// members of a finite one.
    pub fn finite_part(&self) -> BTreeSet<u64> {
        match self.normalized() {
            PrimeSetDescriptor::Finite(s) | PrimeSetDescriptor::AllExcept(s) => s,
            _ => BTreeSet::new(),
        }
    }
}

impl fmt::Display for PrimeSetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |s: &BTreeSet<u64>| {
            s.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        };
        match self {
            PrimeSetDescriptor::Finite(s) => write!(f, "{{{}}}", list(s)),
            PrimeSetDescriptor::AllPrimes => write!(f, "all primes"),
            PrimeSetDescriptor::AllExcept(e) => write!(f, "all primes except {{{}}}", list(e)),
            PrimeSetDescriptor::UnionWithPrefix { finite, excluded } => write!(
                f,
                "{{{}}} ∪ all primes except {{{}}}",
                list(finite),
                list(excluded)
            ),
        }
    }
}

fn minus_identity(m: &IntMatrix) -> IntMatrix {
    m - &IntMatrix::identity(m.rows())
}

/// `c` with `φ ∈ Γ(m) ⇔ m | c`; zero exactly for the identity.
pub fn congruence_gcd(phi: &RepAut) -> BigInt {
    match phi {
        RepAut::Finitary(f) => minus_identity(f.matrix()).content(),
        RepAut::EventuallyUniform(e) => minus_identity(e.head())
            .content()
            .gcd(&minus_identity(e.block().block()).content()),
        RepAut::Graded(g) => {
            // later increments are multiples of the first one beyond the head
            let first = g.head_window() / 2;
            let inc = g.increments(first + 1).pop().expect("nonempty");
            minus_identity(g.head()).content().gcd(&inc)
        }
    }
}

/// gcd of the off-diagonal entries and the differences of diagonal entries:
/// `B ≡ kI (mod m)` for some `k` iff `m | g`.
pub fn scalar_defect(b: &IntMatrix) -> Result<BigInt, LinalgError> {
    if !b.is_square() {
        return Err(LinalgError::NotSquare {
            rows: b.rows(),
            cols: b.cols(),
        });
    }
    let n = b.rows();
    let mut vals = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                vals.push(b.get(i, j).clone());
            }
        }
        if i > 0 {
            vals.push(b.get(i, i) - b.get(0, 0));
        }
    }
    Ok(gcd_all(&vals))
}

pub fn lambda_levels(phi: &RepAut) -> LambdaLevels {
    match phi {
        RepAut::Finitary(_) => LambdaLevels::AllLevels,
        RepAut::EventuallyUniform(e) => {
            let g = scalar_defect(e.block().block()).expect("blocks are square");
            if g.is_zero() {
                LambdaLevels::AllLevels
            } else if g.is_one() {
                LambdaLevels::OnlyTrivial
            } else {
                LambdaLevels::DivisorsOf(g)
            }
        }
        RepAut::Graded(g) => LambdaLevels::RuleBased(LevelRule::from_graded(g)),
    }
}

pub fn is_almost_radiation(phi: &RepAut) -> bool {
    match phi {
        RepAut::Finitary(_) => true,
        RepAut::EventuallyUniform(e) => {
            let b = e.block().block();
            b.is_identity() || (-b).is_identity()
        }
        RepAut::Graded(_) => false,
    }
}

/// Supporting data for a normal-generation verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorEvidence {
    /// `{w, φw}` is a unimodular pair inside `blocks` consecutive blocks.
    Witness {
        vector: Vec<BigInt>,
        image: Vec<BigInt>,
        blocks: usize,
    },
    /// The bounded search found nothing; the verdict rests on the level set alone.
    DichotomyOnly,
    /// `φ ∈ Λ(level)` for this `level >= 2`.
    Level(BigInt),
    AlmostRadiation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorVerdict {
    pub is_generator: bool,
    pub evidence: GeneratorEvidence,
}

const SEARCH_BOUND: i64 = 3;

fn coefficient_rank(c: i64) -> i64 {
    match c {
        0 => 2 * SEARCH_BOUND,
        c if c > 0 => 2 * c - 2,
        c => -2 * c - 1,
    }
}

/// Vectors with entries in `[-3, 3]`, small L1 norm first.
pub(crate) fn search_vectors(len: usize) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-SEARCH_BOUND..=SEARCH_BOUND).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|&c| c != 0));
    out.sort_by_key(|v| {
        (
            v.iter().map(|c| c.abs()).sum::<i64>(),
            v.iter().map(|&c| coefficient_rank(c)).collect::<Vec<_>>(),
        )
    });
    out
}

fn witness_search(block: &IntMatrix) -> Option<GeneratorEvidence> {
    let d = block.rows();
    let mut sizes = vec![1];
    if 2 * d <= 4 {
        sizes.push(2);
    }
    for blocks in sizes {
        let b = IntMatrix::repeat_block(block, blocks);
        let n = d * blocks;
        if n < 2 {
            continue;
        }
        for v in search_vectors(n) {
            let w: Vec<BigInt> = v.iter().map(|&c| BigInt::from(c)).collect();
            let image = b.mul_vec(&w).expect("shapes agree");
            let pair = IntMatrix::from_columns(n, &[w.clone(), image.clone()]).expect("columns");
            if is_unimodular_set(&pair).unwrap_or(false) {
                return Some(GeneratorEvidence::Witness {
                    vector: w,
                    image,
                    blocks,
                });
            }
        }
    }
    None
}

/// Normal generation holds exactly when no level `m >= 2` admits `φ`.
pub fn is_normal_generator(phi: &RepAut) -> GeneratorVerdict {
    if is_almost_radiation(phi) {
        return GeneratorVerdict {
            is_generator: false,
            evidence: GeneratorEvidence::AlmostRadiation,
        };
    }
    match lambda_levels(phi) {
        LambdaLevels::OnlyTrivial => {
            let RepAut::EventuallyUniform(e) = phi else {
                unreachable!("only eventually uniform values can have trivial level sets")
            };
            GeneratorVerdict {
                is_generator: true,
                evidence: witness_search(e.block().block())
                    .unwrap_or(GeneratorEvidence::DichotomyOnly),
            }
        }
        LambdaLevels::DivisorsOf(g) => GeneratorVerdict {
            is_generator: false,
            evidence: GeneratorEvidence::Level(g),
        },
        LambdaLevels::RuleBased(_) => {
            let RepAut::Graded(g) = phi else {
                unreachable!()
            };
            let m0 = g.multipliers(1)[0];
            GeneratorVerdict {
                is_generator: false,
                evidence: GeneratorEvidence::Level(g.scale().abs() * m0),
            }
        }
        LambdaLevels::AllLevels => GeneratorVerdict {
            is_generator: false,
            evidence: GeneratorEvidence::AlmostRadiation,
        },
    }
}

fn primes_of(n: &BigInt) -> BTreeSet<u64> {
    prime_divisors_big(n, u64::MAX)
        .unwrap_or_default()
        .into_iter()
        .collect()
}

/// `ν(φ)`: the primes `p` with `φ ∈ Λ(p)`, in normal form.
pub fn nu_set(phi: &RepAut) -> PrimeSetDescriptor {
    match lambda_levels(phi) {
        LambdaLevels::AllLevels => PrimeSetDescriptor::AllPrimes,
        LambdaLevels::DivisorsOf(g) => PrimeSetDescriptor::Finite(primes_of(&g)),
        LambdaLevels::OnlyTrivial => PrimeSetDescriptor::Finite(BTreeSet::new()),
        LambdaLevels::RuleBased(r) => PrimeSetDescriptor::UnionWithPrefix {
            finite: primes_of(&r.base),
            excluded: r.excluded.clone(),
        }
        .normalized(),
    }
}

/// Largest common level of a finite family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CommonLevel {
    AllLevels,
    Level(BigInt),
    None,
    /// Only rule-based members constrain the family, so common levels are
    /// unbounded; `witness` is the largest common level built from the primes
    /// up to `bound`.
    Unbounded {
        witness: BigInt,
        bound: u64,
    },
}

pub fn common_lambda_level(family: &[RepAut]) -> CommonLevel {
    let levels: Vec<LambdaLevels> = family.iter().map(lambda_levels).collect();
    if levels
        .iter()
        .any(|l| matches!(l, LambdaLevels::OnlyTrivial))
    {
        return CommonLevel::None;
    }
    let cap = |l: &LambdaLevels, p: u64| -> Option<u32> {
        match l {
            LambdaLevels::AllLevels => None,
            LambdaLevels::DivisorsOf(g) => Some(valuation(g, p).unwrap_or(0)),
            LambdaLevels::RuleBased(r) => Some(r.cap(p)),
            LambdaLevels::OnlyTrivial => Some(0),
        }
    };
    let min_cap = |p: u64| levels.iter().filter_map(|l| cap(l, p)).min();
    let divisor_gcd = levels.iter().fold(None::<BigInt>, |acc, l| match l {
        LambdaLevels::DivisorsOf(g) => Some(acc.map_or(g.clone(), |a| a.gcd(g))),
        _ => acc,
    });
    if let Some(g) = divisor_gcd {
        let mut m = BigInt::one();
        for p in primes_of(&g) {
            m *= BigInt::from(p).pow(min_cap(p).unwrap_or(0));
        }
        return if m > BigInt::one() {
            CommonLevel::Level(m)
        } else {
            CommonLevel::None
        };
    }
    let rules: Vec<&LevelRule> = levels
        .iter()
        .filter_map(|l| match l {
            LambdaLevels::RuleBased(r) => Some(r),
            _ => None,
        })
        .collect();
    if rules.is_empty() {
        return CommonLevel::AllLevels;
    }
    let bound = next_prime(
        rules
            .iter()
            .map(|r| r.largest_relevant_prime())
            .max()
            .unwrap_or(2),
    );
    let mut witness = BigInt::one();
    for p in crate::arith::primes_up_to(bound) {
        witness *= BigInt::from(p).pow(min_cap(p).unwrap_or(0));
    }
    CommonLevel::Unbounded { witness, bound }
}

/// Checks `φ ∈ Λ(m)` directly: on a window, every column from the start of the
/// fixed summand on is congruent to `k` times its unit vector modulo `m`, for
/// one `k`. Returns that `k` (reduced mod `m`), or `None` if the check fails.
pub fn explicit_lambda_check(phi: &RepAut, m: u64, extra_blocks: usize) -> Option<BigInt> {
    if m < 2 {
        return None;
    }
    let bm = BigInt::from(m);
    let (start, window) = match phi {
        RepAut::Finitary(f) => {
            let s = f.support().last().map_or(0, |&x| x + 1);
            (s, s + extra_blocks.max(1))
        }
        RepAut::EventuallyUniform(e) => (e.window(), e.window() + e.d() * extra_blocks.max(1)),
        RepAut::Graded(g) => {
            let first = g.head_window() / 2;
            let horizon = first + 64;
            let incs = g.increments(horizon);
            let n0 = (first..horizon).find(|&n| incs[n].is_multiple_of(&bm))?;
            (2 * n0, 2 * (n0 + extra_blocks.max(1)))
        }
    };
    let w = phi.window_matrix(window).ok()?;
    let mut k: Option<BigInt> = None;
    for j in start..window {
        let kj = w.get(j, j).mod_floor(&bm);
        if let Some(k) = &k {
            if *k != kj {
                return None;
            }
        } else {
            k = Some(kj);
        }
        for i in 0..window {
            if i != j && !w.get(i, j).is_multiple_of(&bm) {
                return None;
            }
        }
    }
    Some(k.unwrap_or_else(BigInt::one))
}

/// Position of `φ` with respect to the sandwich `Γ(m) ≤ nc(φ) ≤ Λ(m)`.
#[derive(Clone, Debug)]
pub enum LadderRung {
    /// `nc(φ)` is everything: the rung `m = 1`.
    Generator,
    /// `nc(φ)` is trivial modulo almost-radiations: the rung `m = 0`.
    AlmostRadiation,
    Rung {
        level: BigInt,
        evidence: RungEvidence,
    },
    /// The level set is unbounded, so there is no maximal level.
    NoMaximalLevel,
}

#[derive(Clone, Debug)]
pub enum RungEvidence {
    /// A verified chain of certificates showing `τ^level ∈ nc(φ)`.
    Constructed(Box<WitnessChain>),
    NotConstructed(String),
}

impl LadderRung {
    pub fn rung_number(&self) -> Option<BigInt> {
        match self {
            LadderRung::Generator => Some(BigInt::one()),
            LadderRung::AlmostRadiation => Some(BigInt::zero()),
            LadderRung::Rung { level, .. } => Some(level.clone()),
            LadderRung::NoMaximalLevel => None,
        }
    }
}

impl fmt::Display for LadderRung {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LadderRung::Generator => write!(f, "1 (normal generator)"),
            LadderRung::AlmostRadiation => write!(f, "0 (almost-radiation)"),
            LadderRung::Rung { level, evidence } => {
                write!(f, "{level}")?;
                match evidence {
                    RungEvidence::Constructed(c) => {
                        write!(f, " (lower bound constructed: {} steps)", c.steps.len())
                    }
                    RungEvidence::NotConstructed(why) => {
                        write!(f, " (lower bound not constructed: {why})")
                    }
                }
            }
            LadderRung::NoMaximalLevel => {
                write!(f, "none (no maximal level; ladder rung undefined)")
            }
        }
    }
}

pub fn ladder_report(phi: &RepAut) -> LadderRung {
    if is_almost_radiation(phi) {
        return LadderRung::AlmostRadiation;
    }
    match lambda_levels(phi) {
        LambdaLevels::OnlyTrivial => LadderRung::Generator,
        LambdaLevels::AllLevels => LadderRung::AlmostRadiation,
        LambdaLevels::RuleBased(_) => LadderRung::NoMaximalLevel,
        LambdaLevels::DivisorsOf(g) => {
            let evidence = match g.to_i64() {
                Some(gi) => match ladder_chain(phi, gi, (2, 3)) {
                    Ok(chain) => RungEvidence::Constructed(Box::new(chain)),
                    Err(e) => RungEvidence::NotConstructed(e.to_string()),
                },
                None => RungEvidence::NotConstructed("level does not fit a machine integer".into()),
            };
            LadderRung::Rung { level: g, evidence }
        }
    }
}

/// Everything `classify` reports about one automorphism.
#[derive(Clone, Debug)]
pub struct Classification {
    pub congruence_gcd: BigInt,
    pub levels: LambdaLevels,
    pub nu: PrimeSetDescriptor,
    pub almost_radiation: bool,
    pub generator: GeneratorVerdict,
    pub ladder: LadderRung,
}

pub fn classify(phi: &RepAut) -> Classification {
    Classification {
        congruence_gcd: congruence_gcd(phi),
        levels: lambda_levels(phi),
        nu: nu_set(phi),
        almost_radiation: is_almost_radiation(phi),
        generator: is_normal_generator(phi),
        ladder: ladder_report(phi),
    }
}
