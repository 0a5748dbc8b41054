//! Scaled-down invariant suite behind the `selftest` command.

use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::Rng;

use crate::arith::gcd_all;
use crate::classify::{
    is_almost_radiation, is_normal_generator, ladder_report, lambda_levels, scalar_defect,
    LadderRung, RungEvidence,
};
use crate::construct::{
    bezout_combine, conjugate_product_reduce, factor_block_unitriangular, order_n_shear, tau_power,
    wans_three, zaushko_commutator,
};
use crate::filters::counterexample_demo;
use crate::gen;
use crate::io::{
    parse_aut, parse_certificate, parse_word, serialize_aut, serialize_certificate, serialize_word,
};
use crate::model::{evaluate_word, RepAut};

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub area: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

type Check = fn(u64) -> Result<String, String>;

const CHECKS: [(&str, &str, Check); 10] = [
    ("order-n shear", "shear construction", shear),
    ("commutator identity", "block commutator", commutator),
    (
        "three-part sum",
        "decomposition into three automorphisms",
        three_parts,
    ),
    (
        "three conjugates of τ^m",
        "block-unitriangular factorization",
        three_conjugates,
    ),
    (
        "generator dichotomy",
        "normal generators and Λ-levels",
        dichotomy,
    ),
    ("conjugate-product gcd", "conjugate products", conjugate_gcd),
    ("coprime combination", "coprime powers of τ", coprime),
    ("ladder chains", "ladder relation", ladder),
    (
        "counterexample memberships",
        "countable-cofinality counterexample",
        counterexample,
    ),
    ("serialization round trip", "document formats", round_trip),
];

pub fn run(seed: u64) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|&(name, area, check)| {
            let start = Instant::now();
            let result = check(seed);
            let millis = start.elapsed().as_millis();
            let (passed, detail) = match result {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckOutcome {
                name,
                area,
                passed,
                detail,
                millis,
            }
        })
        .collect()
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn shear(_: u64) -> Result<String, String> {
    let mut count = 0;
    for n in 2..=8 {
        for m in 2..=10 {
            let t = order_n_shear(n, m).map_err(|e| e.to_string())?;
            let g = &t.gamma;
            ensure(g.pow(n as u64).unwrap().is_identity(), || {
                format!("γ^{n} ≠ I for m = {m}")
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} shears"))
}

fn commutator(seed: u64) -> Result<String, String> {
    let mut r = gen::rng(seed);
    for _ in 0..20 {
        let d = r.gen_range(1..=3);
        let rho = gen::random_unimodular(&mut r, d, 5);
        let w = zaushko_commutator(&rho).map_err(|e| e.to_string())?;
        ensure(
            w.certificate.verify().map_err(|e| e.to_string())?.holds,
            || format!("certificate failed for ρ = {rho:?}"),
        )?;
    }
    Ok("20 random ρ".into())
}

fn three_parts(seed: u64) -> Result<String, String> {
    let mut r = gen::rng(seed);
    for _ in 0..20 {
        let d = 2 * r.gen_range(1..=3);
        let f = gen::random_matrix(&mut r, d, d, 9);
        let w = wans_three(&f).map_err(|e| e.to_string())?;
        let sum = &(&w.heads[0] + &w.heads[1]) + &w.heads[2];
        ensure(sum == f, || "parts do not add up".into())?;
    }
    Ok("20 random f".into())
}

fn three_conjugates(seed: u64) -> Result<String, String> {
    let mut r = gen::rng(seed);
    for _ in 0..10 {
        let d = 2 * r.gen_range(1..=2);
        let z = gen::random_matrix(&mut r, d, d, 5);
        let m = [2, 3, 4, 6][r.gen_range(0..4)];
        let w = factor_block_unitriangular(m, &z).map_err(|e| e.to_string())?;
        ensure(w.word.top_level_conjugates() == 3, || {
            "not three conjugates".into()
        })?;
        ensure(
            w.certificate.verify().map_err(|e| e.to_string())?.holds,
            || "certificate failed".into(),
        )?;
    }
    Ok("10 random Z".into())
}

fn dichotomy(seed: u64) -> Result<String, String> {
    let corpus = gen::corpus(seed, 100);
    let mut generators = 0;
    for phi in &corpus {
        let levels = lambda_levels(phi);
        let expected = !is_almost_radiation(phi) && !(2..=60).any(|m| levels.contains(m));
        let got = is_normal_generator(phi).is_generator;
        ensure(got == expected, || format!("verdict {got} for {phi:?}"))?;
        generators += usize::from(got);
        if let RepAut::EventuallyUniform(e) = phi {
            let b = e.block().block();
            let g = scalar_defect(b).map_err(|e| e.to_string())?;
            for p in crate::arith::primes_up_to(50) {
                let bp = BigInt::from(p);
                let scalar = (0..p).any(|k| {
                    (0..b.rows()).all(|i| {
                        (0..b.cols()).all(|j| {
                            let want = if i == j {
                                BigInt::from(k)
                            } else {
                                BigInt::zero()
                            };
                            (b.get(i, j) - want).is_multiple_of(&bp)
                        })
                    })
                });
                ensure(scalar == g.is_multiple_of(&bp), || {
                    format!("defect {g} disagrees at {p}")
                })?;
            }
        }
    }
    Ok(format!("100 automorphisms, {generators} generators"))
}

fn conjugate_gcd(seed: u64) -> Result<String, String> {
    let mut r = gen::rng(seed);
    let mut done = 0;
    while done < 100 {
        let len = r.gen_range(1..=4);
        let pairs: Vec<(i64, i64)> = (0..len)
            .map(|_| (r.gen_range(-20..=20), r.gen_range(2..=30)))
            .collect();
        if pairs.iter().any(|&(k, m)| k.gcd(&m) != 1) {
            continue;
        }
        let c = conjugate_product_reduce(&pairs).map_err(|e| e.to_string())?;
        let direct = gcd_all(
            &pairs
                .iter()
                .map(|&(_, m)| BigInt::from(m))
                .collect::<Vec<_>>(),
        );
        ensure(c.m == direct, || format!("gcd mismatch for {pairs:?}"))?;
        done += 1;
    }
    Ok("100 tuples".into())
}

fn coprime(_: u64) -> Result<String, String> {
    let mut count = 0;
    for n1 in 2..=6i64 {
        for n2 in n1 + 1..=6 {
            if n1.gcd(&n2) != 1 {
                continue;
            }
            for m in 1..=4 {
                let w = bezout_combine(m, n1, n2).map_err(|e| e.to_string())?;
                let got = evaluate_word(&w.word, &w.certificate.environment, 4)
                    .map_err(|e| e.to_string())?;
                ensure(got == tau_power(m).window_matrix(4).unwrap(), || {
                    format!("({n1}, {n2}, {m})")
                })?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} combinations"))
}

fn ladder(seed: u64) -> Result<String, String> {
    let mut count = 0;
    for phi in gen::corpus(seed, 60) {
        let RepAut::EventuallyUniform(e) = &phi else {
            continue;
        };
        let g = scalar_defect(e.block().block()).map_err(|e| e.to_string())?;
        if g < BigInt::from(2) {
            continue;
        }
        match ladder_report(&phi) {
            LadderRung::Rung {
                level,
                evidence: RungEvidence::Constructed(chain),
            } if level == g => {
                let v = chain.verify().map_err(|e| e.to_string())?;
                ensure(v.holds, || format!("chain failed: {:?}", v.report.last()))?;
            }
            other => return Err(format!("expected rung {g}, got {other}")),
        }
        count += 1;
    }
    Ok(format!("{count} verified chains"))
}

fn counterexample(_: u64) -> Result<String, String> {
    let r = counterexample_demo(&[3, 5], 7).map_err(|e| e.to_string())?;
    ensure(r.all_verified(), || "a membership failed".into())?;
    Ok(format!("{} memberships", r.checks.len()))
}

fn round_trip(seed: u64) -> Result<String, String> {
    let mut r = gen::rng(seed);
    for _ in 0..100 {
        let a = gen::corpus(r.gen(), 1).pop().expect("one");
        let text = serialize_aut(&a);
        let back = parse_aut(&text).map_err(|e| e.to_string())?;
        ensure(back == a && serialize_aut(&back) == text, || {
            "automorphism changed".into()
        })?;
        let w = gen::random_word_document(&mut r);
        let text = serialize_word(&w);
        let back = parse_word(&text).map_err(|e| e.to_string())?;
        ensure(back == w && serialize_word(&back) == text, || {
            "word changed".into()
        })?;
        let c = gen::random_certificate(&mut r);
        let text = serialize_certificate(&c);
        let back = parse_certificate(&text).map_err(|e| e.to_string())?;
        ensure(back == c && serialize_certificate(&back) == text, || {
            "certificate changed".into()
        })?;
    }
    Ok("100 documents of each kind".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for outcome in run(gen::DEFAULT_SEED) {
            assert!(outcome.passed, "{}: {}", outcome.name, outcome.detail);
        }
    }
}
