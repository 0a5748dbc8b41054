//! Seeded generators for test corpora and the `selftest` command.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::io::WordDocument;
use crate::linalg::IntMatrix;
use crate::model::{Certificate, Claim, Environment, GroupWord, RepAut, Target};

pub const DEFAULT_SEED: u64 = 20_240_601;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let mut m = IntMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, BigInt::from(rng.gen_range(-bound..=bound)));
        }
    }
    m
}

/// Product of `steps` random elementary operations, with random row swaps and
/// sign changes mixed in.
pub fn random_unimodular(rng: &mut impl Rng, d: usize, steps: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(d);
    if d < 2 {
        if d == 1 && rng.gen_bool(0.5) {
            m.negate_row(0);
        }
        return m;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..d);
        let mut j = rng.gen_range(0..d - 1);
        if j >= i {
            j += 1;
        }
        match rng.gen_range(0..6) {
            0 => m.swap_rows(i, j),
            1 => m.negate_row(i),
            _ => {
                let q = BigInt::from(*[-2i64, -1, 1, 2].choose(rng).expect("nonempty"));
                m.add_row_multiple(i, j, &q);
            }
        }
    }
    m
}

/// A `d x d` unimodular block with scalar defect exactly `g` (`g >= 2`),
/// conjugate to `εI + g·N` for a small nilpotent or diagonal-shift `N`.
pub fn block_with_defect(rng: &mut impl Rng, d: usize, g: i64) -> IntMatrix {
    assert!(d >= 2 && g >= 2);
    let eps: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
    let mut s = IntMatrix::identity(d).scale(&BigInt::from(eps));
    let (i, j) = (rng.gen_range(1..d), rng.gen_range(0..d));
    let j = if j >= i { 0 } else { j };
    s.set(i, j, BigInt::from(if rng.gen_bool(0.5) { g } else { -g }));
    let p = random_unimodular(rng, d, 3);
    let p_inv = p.inverse_unimodular().expect("unimodular");
    &(&p * &s) * &p_inv
}

pub fn random_vector(rng: &mut impl Rng, len: usize, bound: i64) -> Vec<BigInt> {
    (0..len)
        .map(|_| BigInt::from(rng.gen_range(-bound..=bound)))
        .collect()
}

fn random_support(rng: &mut impl Rng, len: usize, bound: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..bound).collect();
    all.shuffle(rng);
    all.truncate(len);
    all
}

const SMALL_PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

pub fn random_finitary(rng: &mut impl Rng) -> RepAut {
    let n = rng.gen_range(1..=4);
    let support = random_support(rng, n, 12);
    RepAut::finitary(support, random_unimodular(rng, n, 6)).expect("unimodular")
}

/// Shape of a generated eventually uniform tail block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    Generic,
    Radiation,
    Defect(i64),
}

pub fn random_eventually_uniform(rng: &mut impl Rng, kind: BlockKind) -> RepAut {
    let d = match kind {
        BlockKind::Defect(_) => rng.gen_range(2..=3),
        _ => rng.gen_range(1..=3),
    };
    let block = match kind {
        BlockKind::Generic => random_unimodular(rng, d, 5),
        BlockKind::Radiation => {
            let s: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
            IntMatrix::identity(d).scale(&BigInt::from(s))
        }
        BlockKind::Defect(g) => block_with_defect(rng, d, g),
    };
    let window = d * rng.gen_range(0..=2);
    let head = random_unimodular(rng, window, 4);
    RepAut::eventually_uniform(head, block).expect("unimodular")
}

pub fn random_graded(rng: &mut impl Rng) -> RepAut {
    let mut pool = SMALL_PRIMES.to_vec();
    pool.shuffle(rng);
    let np = rng.gen_range(0..=2);
    let ne = rng.gen_range(0..=2);
    let prefix: Vec<u64> = pool[..np].to_vec();
    let excluded: BTreeSet<u64> = pool[np..np + ne].iter().copied().collect();
    let hw = 2 * rng.gen_range(0..=1);
    let head = random_unimodular(rng, hw, 3);
    let scale = BigInt::from(*[1i64, -1, 2, 3].choose(rng).expect("nonempty"));
    RepAut::graded_full(head, prefix, excluded, scale).expect("valid graded data")
}

/// Deterministic mix of all three variants: roughly a fifth finitary, a fifth
/// graded, and the rest eventually uniform with generic, radiation and
/// defect-`g` tails.
pub fn corpus(seed: u64, count: usize) -> Vec<RepAut> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| match r.gen_range(0..10) {
            0 | 1 => random_finitary(&mut r),
            2 | 3 => random_graded(&mut r),
            4 => random_eventually_uniform(&mut r, BlockKind::Radiation),
            5 | 6 => {
                let g = r.gen_range(2..=12);
                random_eventually_uniform(&mut r, BlockKind::Defect(g))
            }
            _ => random_eventually_uniform(&mut r, BlockKind::Generic),
        })
        .collect()
}

fn random_word(rng: &mut impl Rng, names: &[String], depth: u32) -> GroupWord {
    let leaf = GroupWord::named(names[rng.gen_range(0..names.len())].clone());
    if depth == 0 {
        return leaf;
    }
    match rng.gen_range(0..5) {
        0 => leaf,
        1 => GroupWord::inverse(random_word(rng, names, depth - 1)),
        2 => GroupWord::power(random_word(rng, names, depth - 1), rng.gen_range(-3..=3)),
        3 => GroupWord::conj(
            random_word(rng, names, depth - 1),
            random_word(rng, names, depth - 1),
        ),
        _ => {
            let n = rng.gen_range(2..=3);
            GroupWord::product((0..n).map(|_| random_word(rng, names, depth - 1)).collect())
        }
    }
}

fn random_environment(rng: &mut impl Rng) -> Environment {
    let mut env = Environment::new();
    let n = rng.gen_range(1..=3);
    for i in 0..n {
        let aut = match rng.gen_range(0..3) {
            0 => random_finitary(rng),
            1 => random_graded(rng),
            _ => random_eventually_uniform(rng, BlockKind::Generic),
        };
        env.insert(format!("a{i}"), aut);
    }
    env
}

pub fn random_word_document(rng: &mut impl Rng) -> WordDocument {
    let env = random_environment(rng);
    let names: Vec<String> = env.keys().cloned().collect();
    let word = random_word(rng, &names, 3);
    WordDocument::new(word, env)
}

/// A certificate with a random claim. The claim is not required to hold.
pub fn random_certificate(rng: &mut impl Rng) -> Certificate {
    let env = random_environment(rng);
    let names: Vec<String> = env.keys().cloned().collect();
    let word = random_word(rng, &names, 2);
    let claim = match rng.gen_range(0..4) {
        0 => Claim::WindowIdentity {
            target: Target::Automorphism {
                aut: random_eventually_uniform(rng, BlockKind::Generic),
            },
        },
        1 => {
            let n = rng.gen_range(1..=4);
            Claim::WindowIdentity {
                target: Target::Matrix {
                    matrix: random_unimodular(rng, n, 4),
                },
            }
        }
        2 => Claim::Order {
            order: rng.gen_range(1..=6),
        },
        _ => {
            let n = rng.gen_range(1..=4);
            Claim::ActionOnVector {
                vector: random_vector(rng, n, 5),
                image: random_vector(rng, n, 5),
            }
        }
    };
    let windows = vec![rng.gen_range(1..=4) * 4, rng.gen_range(5..=8) * 4];
    Certificate::new(claim, word, env, windows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{is_almost_radiation, scalar_defect};

    #[test]
    fn deterministic() {
        assert_eq!(corpus(7, 40), corpus(7, 40));
        assert_ne!(corpus(7, 40), corpus(8, 40));
    }

    #[test]
    fn defect_blocks() {
        let mut r = rng(1);
        for g in 2..=12 {
            for d in 2..=3 {
                let b = block_with_defect(&mut r, d, g);
                assert!(b.is_unimodular());
                assert_eq!(scalar_defect(&b).unwrap(), BigInt::from(g));
            }
        }
    }

    #[test]
    fn corpus_spans_variants() {
        let c = corpus(DEFAULT_SEED, 200);
        assert!(c.iter().any(|a| matches!(a, RepAut::Finitary(_))));
        assert!(c.iter().any(|a| matches!(a, RepAut::EventuallyUniform(_))));
        assert!(c.iter().any(|a| matches!(a, RepAut::Graded(_))));
        assert!(c.iter().any(is_almost_radiation));
    }
}
