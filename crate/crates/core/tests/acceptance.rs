//! Acceptance criteria. Each test prints one PASS/FAIL line; the tests share a
//! lock so the measured runtimes are not skewed by running in parallel.

use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use freeaut::arith::primes_up_to;
use freeaut::classify::{
    congruence_gcd, explicit_lambda_check, is_almost_radiation, is_normal_generator, ladder_report,
    lambda_levels, scalar_defect, LadderRung, LambdaLevels, RungEvidence,
};
use freeaut::construct::{
    bezout_combine, conjugate_product_reduce, factor_block_unitriangular, order_n_shear,
    wans_three, zaushko_commutator,
};
use freeaut::gen::{self, DEFAULT_SEED};
use freeaut::io::{
    parse_aut, parse_certificate, parse_word, serialize_aut, serialize_certificate, serialize_word,
};
use freeaut::linalg::IntMatrix;
use freeaut::model::{evaluate_word, RepAut};

static LOCK: Mutex<()> = Mutex::new(());

fn criterion(
    number: u32,
    name: &str,
    budget: Duration,
    body: impl FnOnce() -> Result<String, String>,
) {
    let _guard = LOCK.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let outcome = match result {
        Ok(detail) if elapsed <= budget => Ok(detail),
        Ok(detail) => Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}")),
        Err(e) => Err(e),
    };
    match &outcome {
        Ok(detail) => println!("criterion {number:>2} PASS  {name} ({detail}; {elapsed:.2?})"),
        Err(why) => println!("criterion {number:>2} FAIL  {name}: {why}"),
    }
    if let Err(why) = outcome {
        panic!("criterion {number} ({name}) failed: {why}");
    }
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn mat<const C: usize>(rows: &[[i64; C]]) -> IntMatrix {
    IntMatrix::from_rows(rows).unwrap()
}

fn block_diag_repeat(b: &IntMatrix, k: usize) -> IntMatrix {
    let blocks: Vec<&IntMatrix> = std::iter::repeat_n(b, k).collect();
    IntMatrix::block_diag(&blocks)
}

/// Window matrix of `τ^m` built from scratch: `x_n ↦ x_n + m y_n` on pairs
/// `(x_n, y_n) = (2n, 2n + 1)`.
fn tau_window(m: i64, n: usize) -> IntMatrix {
    let mut t = IntMatrix::identity(n);
    for j in (0..n).step_by(2) {
        t.set(j + 1, j, BigInt::from(m));
    }
    t
}

#[test]
fn criterion_01_shear_reproduction() {
    criterion(1, "shear reproduction", Duration::from_secs(1), || {
        for m in 2..=10 {
            let t = order_n_shear(3, m).map_err(err)?;
            let lambda = mat(&[[0, -1, 0, 0], [1, -1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
            let sigma = mat(&[[-m, 0, 1, 0], [0, 1, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]);
            ensure(t.lambda == lambda, || format!("λ differs at m = {m}"))?;
            ensure(t.sigma == sigma, || format!("σ differs at m = {m}"))?;
        }
        let mut count = 0;
        for n in 2..=8usize {
            for m in 2..=10i64 {
                let t = order_n_shear(n, m).map_err(err)?;
                let g = &t.gamma;
                let r = g.rows();
                let mut power = IntMatrix::identity(r);
                for j in 1..=n {
                    power = &power * g;
                    if j < n && n % j == 0 {
                        ensure(!power.is_identity(), || {
                            format!("γ^{j} = I for n = {n}, m = {m}")
                        })?;
                    }
                }
                ensure(power.is_identity(), || format!("γ^{n} ≠ I for m = {m}"))?;
                let mut want = vec![BigInt::zero(); r];
                want[0] = BigInt::one();
                want[n - 1] += m;
                want[n] -= m;
                ensure(g.column(0) == want, || {
                    format!("γe₁ wrong for n = {n}, m = {m}")
                })?;
                count += 1;
            }
        }
        Ok(format!("9 printed pairs, {count} shears"))
    });
}

#[test]
fn criterion_02_commutator_identity() {
    criterion(2, "commutator identity", Duration::from_secs(5), || {
        let mut r = gen::rng(DEFAULT_SEED);
        for case in 0..200 {
            let d = r.gen_range(1..=4);
            let rho_x = gen::random_unimodular(&mut r, d, 8);
            let w = zaushko_commutator(&rho_x).map_err(err)?;
            let id = IntMatrix::identity(d);
            // block order (x_0..x_{d-1}, y_0..y_{d-1})
            let rho = IntMatrix::block_diag(&[&rho_x, &id]);
            let rho_inv = IntMatrix::block_diag(&[&rho_x.inverse_unimodular().map_err(err)?, &id]);
            let mut tau = IntMatrix::identity(2 * d);
            tau.set_block(d, 0, &id);
            let mut tau_inv = IntMatrix::identity(2 * d);
            tau_inv.set_block(d, 0, &(-&id));
            let mut pi = IntMatrix::zeros(2 * d, 2 * d);
            pi.set_block(0, d, &id);
            pi.set_block(d, 0, &id);
            for k in [1, 2] {
                let n = 2 * d * k;
                let direct = [&pi, &rho_inv, &tau_inv, &rho, &tau, &pi]
                    .iter()
                    .map(|b| block_diag_repeat(b, k))
                    .fold(IntMatrix::identity(n), |acc, b| &acc * &b);
                let from_word =
                    evaluate_word(&w.word, &w.certificate.environment, n).map_err(err)?;
                ensure(from_word == direct, || {
                    format!("case {case}: word disagrees with product at window {n}")
                })?;
                for b in 0..k {
                    let o = 2 * d * b;
                    for i in 0..d {
                        let mut x = vec![BigInt::zero(); n];
                        x[o + i] = BigInt::one();
                        ensure(direct.column(o + i) == x, || {
                            format!("case {case}: x_{i} moved")
                        })?;
                        let mut y = vec![BigInt::zero(); n];
                        y[o + d + i] = BigInt::one();
                        y[o + i] += 1;
                        for row in 0..d {
                            y[o + row] -= rho_x.get(row, i);
                        }
                        ensure(direct.column(o + d + i) == y, || {
                            format!("case {case}: y_{i} image wrong")
                        })?;
                    }
                }
            }
            ensure(w.certificate.verify().map_err(err)?.holds, || {
                format!("case {case}: certificate")
            })?;
        }
        Ok("200 random ρ_X, windows 2d and 4d".into())
    });
}

#[test]
fn criterion_03_three_part_sum() {
    criterion(3, "three-part sum", Duration::from_secs(5), || {
        let mut r = gen::rng(DEFAULT_SEED);
        for case in 0..200 {
            let d = [2, 4, 6][r.gen_range(0..3)];
            let f = gen::random_matrix(&mut r, d, d, 9);
            let w = wans_three(&f).map_err(err)?;
            let heads = &(&w.heads[0] + &w.heads[1]) + &w.heads[2];
            ensure(heads == f, || {
                format!("case {case}: window parts do not add up")
            })?;
            let tails = &(&w.tails[0] + &w.tails[1]) + &w.tails[2];
            ensure(tails.is_zero(), || {
                format!("case {case}: tails do not cancel")
            })?;
            for (i, part) in w.parts.iter().enumerate() {
                let n = d + 4;
                let a = part.window_matrix(n).map_err(err)?;
                let b = part.window_matrix_inverse(n).map_err(err)?;
                ensure((&a * &b).is_identity() && (&b * &a).is_identity(), || {
                    format!("case {case}: part {i} inverse fails")
                })?;
                ensure(a.determinant().map_err(err)?.abs().is_one(), || {
                    format!("case {case}: part {i} det")
                })?;
            }
        }
        Ok("200 random f".into())
    });
}

#[test]
fn criterion_04_three_conjugates() {
    criterion(
        4,
        "three conjugates of τ^m",
        Duration::from_secs(10),
        || {
            let mut r = gen::rng(DEFAULT_SEED);
            for case in 0..100 {
                let d = 2 * r.gen_range(1..=2);
                let z = gen::random_matrix(&mut r, d, d, 6);
                let m = [2i64, 3, 4, 6][r.gen_range(0..4)];
                let w = factor_block_unitriangular(m, &z).map_err(err)?;
                ensure(w.word.top_level_conjugates() == 3, || {
                    format!("case {case}: not three conjugates")
                })?;
                for k in [1, 2] {
                    let n = 2 * d * k;
                    let mut beta = IntMatrix::identity(n);
                    beta.set_block(d, 0, &z.scale(&BigInt::from(m)));
                    let got = evaluate_word(&w.word, &w.certificate.environment, n).map_err(err)?;
                    ensure(got == beta, || {
                        format!("case {case}: product differs from β at window {n}")
                    })?;
                }
                let bm = BigInt::from(m);
                for (i, f) in w.factors.iter().enumerate() {
                    ensure(congruence_gcd(f).is_multiple_of(&bm), || {
                        format!("case {case}: factor {i} gcd")
                    })?;
                    let win = f.window_matrix(4 * d).map_err(err)?;
                    let off = &win - &IntMatrix::identity(4 * d);
                    ensure(off.entries().iter().all(|e| e.is_multiple_of(&bm)), || {
                        format!("case {case}: factor {i} not ≡ I mod {m}")
                    })?;
                }
            }
            Ok("100 random Z".into())
        },
    );
}

/// `B ≡ kI (mod p)` for some `k`, by trying every `k`.
fn scalar_mod(b: &IntMatrix, p: u64) -> bool {
    let bp = BigInt::from(p);
    (0..p).any(|k| {
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
    })
}

#[test]
fn criterion_05_generator_dichotomy() {
    criterion(5, "generator dichotomy", Duration::from_secs(10), || {
        let corpus = gen::corpus(DEFAULT_SEED, 500);
        let mut generators = 0;
        let mut variants = [0usize; 3];
        for (i, phi) in corpus.iter().enumerate() {
            variants[match phi {
                RepAut::Finitary(_) => 0,
                RepAut::EventuallyUniform(_) => 1,
                RepAut::Graded(_) => 2,
            }] += 1;
            let levels = lambda_levels(phi);
            let member = |m: u64| levels.contains(m);
            if !matches!(phi, RepAut::Graded(_)) {
                for m in 2..=60u64 {
                    let window = explicit_lambda_check(phi, m, 2).is_some();
                    ensure(window == member(m), || {
                        format!("#{i}: Λ({m}) membership disagrees with window")
                    })?;
                }
            }
            let expected = !is_almost_radiation(phi) && !(2..=60).any(member);
            let got = is_normal_generator(phi).is_generator;
            ensure(got == expected, || {
                format!("#{i}: verdict {got}, expected {expected}")
            })?;
            generators += usize::from(got);
            if let RepAut::EventuallyUniform(e) = phi {
                let b = e.block().block();
                let g = scalar_defect(b).map_err(err)?;
                for p in primes_up_to(50) {
                    ensure(
                        scalar_mod(b, p) == g.is_multiple_of(&BigInt::from(p)),
                        || format!("#{i}: defect {g} disagrees with brute force at {p}"),
                    )?;
                }
            }
        }
        ensure(variants.iter().all(|&c| c > 0), || {
            format!("corpus misses a variant: {variants:?}")
        })?;
        Ok(format!(
            "500 automorphisms ({} finitary, {} eventually uniform, {} graded), {generators} generators",
            variants[0], variants[1], variants[2]
        ))
    });
}

#[test]
fn criterion_06_conjugate_gcd() {
    criterion(6, "conjugate-product gcd", Duration::from_secs(2), || {
        let mut r = gen::rng(DEFAULT_SEED);
        let mut done = 0;
        while done < 500 {
            let len = r.gen_range(1..=5);
            let pairs: Vec<(i64, i64)> = (0..len)
                .map(|_| (r.gen_range(-30..=30), r.gen_range(2..=60)))
                .collect();
            if pairs.iter().any(|&(k, m)| k.gcd(&m) != 1) {
                continue;
            }
            let c = conjugate_product_reduce(&pairs).map_err(err)?;
            let coeff_gcd = c
                .coefficients
                .iter()
                .fold(BigInt::zero(), |acc, x| acc.gcd(x));
            let direct = pairs.iter().fold(0i64, |acc, &(_, m)| acc.gcd(&m));
            ensure(
                coeff_gcd == BigInt::from(direct) && c.m == coeff_gcd,
                || format!("{pairs:?}: {coeff_gcd} vs {direct}"),
            )?;
            done += 1;
        }
        Ok("500 coprime tuples".into())
    });
}

#[test]
fn criterion_07_coprime_combination() {
    criterion(7, "coprime combination", Duration::from_secs(2), || {
        let mut count = 0;
        for n1 in 1..=12i64 {
            for n2 in n1 + 1..=12 {
                if n1.gcd(&n2) != 1 {
                    continue;
                }
                for m in 1..=6 {
                    let w = bezout_combine(m, n1, n2).map_err(err)?;
                    let got = evaluate_word(&w.word, &w.certificate.environment, 4).map_err(err)?;
                    ensure(got == tau_window(m, 4), || format!("({n1}, {n2}, {m})"))?;
                    ensure(w.a * n1 + w.b * n2 == 1, || {
                        format!("({n1}, {n2}): exponents")
                    })?;
                    count += 1;
                }
            }
        }
        Ok(format!("{count} combinations"))
    });
}

#[test]
fn criterion_08_ladder_report() {
    criterion(8, "ladder report", Duration::from_secs(5), || {
        let (mut rungs, mut graded) = (0, 0);
        for (i, phi) in gen::corpus(DEFAULT_SEED, 500).iter().enumerate() {
            match phi {
                RepAut::EventuallyUniform(e) => {
                    let g = scalar_defect(e.block().block()).map_err(err)?;
                    if g < BigInt::from(2) {
                        continue;
                    }
                    match ladder_report(phi) {
                        LadderRung::Rung {
                            level,
                            evidence: RungEvidence::Constructed(chain),
                        } if level == g => {
                            let v = chain.verify().map_err(err)?;
                            ensure(v.holds, || {
                                format!("#{i}: chain fails: {:?}", v.report.last())
                            })?;
                            ensure(chain.level == g, || {
                                format!("#{i}: chain reaches {}", chain.level)
                            })?;
                        }
                        other => return Err(format!("#{i}: expected rung {g}, got {other}")),
                    }
                    let gu = u64::try_from(&g).map_err(err)?;
                    ensure(explicit_lambda_check(phi, gu, 3).is_some(), || {
                        format!("#{i}: explicit Λ({g}) check fails")
                    })?;
                    rungs += 1;
                }
                RepAut::Graded(gb) => {
                    // Finite evidence of unboundedness: every prime that is not
                    // excluded and divides no prefix entry is a level, checked
                    // on an explicit window.
                    let tail: Vec<u64> = primes_up_to(60)
                        .into_iter()
                        .filter(|&p| {
                            !gb.excluded().contains(&p) && gb.prefix().iter().all(|&m| m % p != 0)
                        })
                        .collect();
                    let unbounded = !tail.is_empty()
                        && tail
                            .iter()
                            .all(|&p| explicit_lambda_check(phi, p, 2).is_some());
                    let rule_unbounded = matches!(lambda_levels(phi), LambdaLevels::RuleBased(_));
                    ensure(unbounded == rule_unbounded, || {
                        format!("#{i}: level rule disagrees with windows")
                    })?;
                    let report = ladder_report(phi);
                    ensure(
                        matches!(report, LadderRung::NoMaximalLevel) == unbounded
                            && report.to_string().contains("no maximal level") == unbounded,
                        || format!("#{i}: report {report}"),
                    )?;
                    graded += 1;
                }
                RepAut::Finitary(_) => {}
            }
        }
        ensure(rungs > 0 && graded > 0, || {
            "corpus has no rung or graded cases".into()
        })?;
        Ok(format!("{rungs} verified rungs, {graded} graded reports"))
    });
}

#[test]
fn criterion_09_counterexample_demo() {
    criterion(9, "counterexample demo", Duration::from_secs(1), || {
        let out = Command::new(env!("CARGO_BIN_EXE_freeaut"))
            .args([
                "filters",
                "demo-counterexample",
                "--primes",
                "3,5",
                "--probe",
                "7",
            ])
            .output()
            .map_err(err)?;
        let stdout = String::from_utf8_lossy(&out.stdout);
        ensure(out.status.success(), || {
            format!("exit {:?}: {stdout}", out.status.code())
        })?;
        ensure(
            stdout.contains("memberships: verified") && !stdout.contains("FAILED"),
            || stdout.to_string(),
        )?;
        let checks = stdout.lines().filter(|l| l.starts_with("phi_")).count();
        ensure(checks == 6, || format!("{checks} membership lines"))?;
        Ok(format!("{checks} memberships, exit 0"))
    });
}

#[test]
fn criterion_10_serialization() {
    criterion(
        10,
        "serialization round trip",
        Duration::from_secs(5),
        || {
            let mut r = gen::rng(DEFAULT_SEED);
            for case in 0..1000 {
                let a = gen::corpus(r.gen(), 1).pop().expect("one");
                let text = serialize_aut(&a);
                let back = parse_aut(&text).map_err(err)?;
                ensure(back == a && serialize_aut(&back) == text, || {
                    format!("case {case}: .aut")
                })?;
                let w = gen::random_word_document(&mut r);
                let text = serialize_word(&w);
                let back = parse_word(&text).map_err(err)?;
                ensure(back == w && serialize_word(&back) == text, || {
                    format!("case {case}: .word")
                })?;
                let c = gen::random_certificate(&mut r);
                let text = serialize_certificate(&c);
                let back = parse_certificate(&text).map_err(err)?;
                ensure(back == c && serialize_certificate(&back) == text, || {
                    format!("case {case}: .cert")
                })?;
            }
            Ok("1000 documents of each kind".into())
        },
    );
}
