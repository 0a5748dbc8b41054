//! From an automorphism acting as `x ↦ kx + mz` on a tail of blocks down to a
//! `τ^m`-type element of its normal closure, one certified step at a time.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::reduce::bezout_exponents;
use super::{
    checked, conjugate_product_reduce, order_n_shear, order_reduce, tau_power_after, ConstructError,
};
use crate::arith::gcd_all;
use crate::classify::search_vectors;
use crate::linalg::{complete_to_basis, is_unimodular_set, serde_int, snf, IntMatrix};
use crate::model::{
    evaluate_symbolic, BlockSpec, Certificate, Environment, GroupWord, MalformedCertificate,
    RepAut, Verification, FORMAT_VERSION,
};

/// One certified link. Steps that `produce` a name establish that the named
/// automorphism lies in the normal closure of the input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub produces: Option<String>,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessChain {
    pub format_version: u32,
    /// Bound to the name `phi` in every step.
    pub input: RepAut,
    #[serde(with = "serde_int")]
    pub level: BigInt,
    pub steps: Vec<ChainStep>,
    pub target: RepAut,
}

pub const INPUT_NAME: &str = "phi";

impl WitnessChain {
    /// Rechecks every certificate and the bookkeeping between them: each
    /// producing step is a word in the normal closure of `phi` and the names
    /// produced before it, and every such name is bound to what it was
    /// certified to be.
    pub fn verify(&self) -> Result<Verification, MalformedCertificate> {
        if self.format_version != FORMAT_VERSION {
            return Err(MalformedCertificate::Version(self.format_version));
        }
        let mut known: BTreeMap<String, RepAut> = BTreeMap::new();
        known.insert(INPUT_NAME.to_string(), self.input.clone());
        let mut report = Vec::new();
        let mut last = None;
        let fail = |mut report: Vec<String>, line: String| {
            report.push(line);
            Ok(Verification {
                holds: false,
                report,
            })
        };
        for step in &self.steps {
            let cert = &step.certificate;
            for name in cert.word.names() {
                if let Some(v) = known.get(&name) {
                    if cert.environment.get(&name) != Some(v) {
                        return fail(
                            report,
                            format!(
                                "step `{}`: `{name}` is not bound to its certified value",
                                step.name
                            ),
                        );
                    }
                }
            }
            let v = cert.verify()?;
            if !v.holds {
                let why = v.report.last().cloned().unwrap_or_default();
                return fail(report, format!("step `{}`: {why}", step.name));
            }
            if let Some(p) = &step.produces {
                let gens: BTreeSet<String> = known.keys().cloned().collect();
                if !cert.word.in_normal_closure_of(&gens) {
                    return fail(
                        report,
                        format!(
                            "step `{}`: word is not in the normal closure of {gens:?}",
                            step.name
                        ),
                    );
                }
                let Some(target) = cert.target_aut() else {
                    return fail(
                        report,
                        format!(
                            "step `{}`: produces `{p}` without an automorphism target",
                            step.name
                        ),
                    );
                };
                if known.contains_key(p) {
                    return fail(
                        report,
                        format!("step `{}`: `{p}` is produced twice", step.name),
                    );
                }
                known.insert(p.clone(), target.clone());
                last = Some(p.clone());
            }
            report.push(format!("step `{}`: ok", step.name));
        }
        let final_value = last.and_then(|p| known.get(&p));
        if final_value != Some(&self.target) {
            return fail(
                report,
                "the last produced element is not the chain target".into(),
            );
        }
        report.push("target reached".into());
        Ok(Verification {
            holds: true,
            report,
        })
    }
}

/// Conjugation bringing a block into the shape `e₀ ↦ k e₀ + g w` with
/// `{e₀, w}` unimodular.
#[derive(Clone, Debug)]
pub struct Normalization {
    pub conjugator: Option<RepAut>,
    pub normalized: RepAut,
}

/// Identity on the first `head` coordinates, then `block` repeated; the
/// inverse of `block` is supplied and checked.
fn with_inverse_head(
    head: usize,
    block: IntMatrix,
    inverse: IntMatrix,
) -> Result<RepAut, ConstructError> {
    with_identity_head_spec(head, BlockSpec::with_inverse(block, inverse)?)
}

fn with_identity_head_spec(head: usize, block: BlockSpec) -> Result<RepAut, ConstructError> {
    Ok(if head == 0 {
        RepAut::uniform_spec(block)
    } else {
        RepAut::eventually_uniform_spec(IntMatrix::identity(head), block)?
    })
}

fn eventually_uniform_parts(phi: &RepAut) -> Result<(usize, &IntMatrix), ConstructError> {
    match phi {
        RepAut::EventuallyUniform(e) => Ok((e.window(), e.block().block())),
        other => Err(ConstructError::Shape(format!(
            "the pipeline needs an eventually uniform automorphism, got {}",
            other.variant_name()
        ))),
    }
}

/// `(k, m)` with `B e₀ = k e₀ + m w`, `w` primitive and supported off `e₀`.
fn first_column_shape(b: &IntMatrix) -> (BigInt, BigInt) {
    let col = b.column(0);
    (col[0].clone(), gcd_all(&col[1..]))
}

fn round_up(n: usize, step: usize) -> usize {
    n.div_ceil(step) * step
}

fn unit(len: usize, i: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); len];
    v[i] = BigInt::one();
    v
}

fn axpy(a: &[BigInt], c: &BigInt, b: &[BigInt]) -> Vec<BigInt> {
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

/// Finds a conjugate of `phi` whose tail block has first column `(c, g·w)`
/// with `w` primitive, searching one block and, for small blocks, two.
pub fn normalize_shear(phi: &RepAut, g: i64) -> Result<Normalization, ConstructError> {
    let (_, b) = eventually_uniform_parts(phi)?;
    if g < 2 {
        return Err(ConstructError::Argument(format!("level {g} is below 2")));
    }
    let bg = BigInt::from(g);
    if b.rows() >= 2 && first_column_shape(b).1 == bg {
        return Ok(Normalization {
            conjugator: None,
            normalized: phi.clone(),
        });
    }
    let d = b.rows();
    let mut candidates = vec![phi.clone()];
    if d <= 2 {
        let RepAut::EventuallyUniform(e) = phi else {
            unreachable!()
        };
        candidates.push(phi.reblock(round_up(e.window(), 2 * d), 2 * d)?);
    }
    for cand in candidates {
        let (window, block) = eventually_uniform_parts(&cand)?;
        let n = block.rows();
        if n < 2 {
            continue;
        }
        let c = block.get(0, 0).clone();
        for v in search_vectors(n) {
            let v: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
            if !gcd_all(&v).is_one() {
                continue;
            }
            let bv = block.mul_vec(&v)?;
            let diff = axpy(&bv, &-&c, &v);
            if diff.iter().any(|x| !x.is_multiple_of(&bg)) {
                continue;
            }
            let w: Vec<BigInt> = diff.iter().map(|x| x / &bg).collect();
            let pair = IntMatrix::from_columns(n, &[v.clone(), w])?;
            if !is_unimodular_set(&pair)? {
                continue;
            }
            let basis = complete_to_basis(&IntMatrix::from_columns(n, &[v])?)?;
            let q = basis.inverse_unimodular()?;
            let conjugator = with_inverse_head(window, q, basis)?;
            let mut env = Environment::new();
            env.insert(INPUT_NAME.into(), cand.clone());
            env.insert("F".into(), conjugator.clone());
            let normalized = evaluate_symbolic(
                &GroupWord::conj(GroupWord::named(INPUT_NAME), GroupWord::named("F")),
                &env,
            )?;
            let (_, nb) = eventually_uniform_parts(&normalized)?;
            if first_column_shape(nb).1 != bg {
                return Err(ConstructError::Check(
                    "normalization missed the level".into(),
                ));
            }
            return Ok(Normalization {
                conjugator: Some(conjugator),
                normalized,
            });
        }
    }
    Err(ConstructError::OutOfScope {
        step: "normalize".into(),
        reason: format!(
            "no vector in one or two blocks is moved to k·v + {g}·w with {{v, w}} unimodular"
        ),
    })
}

struct Builder {
    steps: Vec<ChainStep>,
    known: Environment,
}

impl Builder {
    fn bind(&self, word: &GroupWord, mut env: Environment) -> Environment {
        for n in word.names() {
            if let Some(v) = self.known.get(&n) {
                env.insert(n, v.clone());
            }
        }
        env
    }

    fn produce(
        &mut self,
        step: &str,
        name: &str,
        word: GroupWord,
        conjugators: Environment,
        target: RepAut,
    ) -> Result<(), ConstructError> {
        let env = self.bind(&word, conjugators);
        let cert = Certificate::window_identity(word, env, target.clone())?;
        let certificate = checked(cert, step)?;
        self.steps.push(ChainStep {
            name: step.into(),
            produces: Some(name.into()),
            certificate,
        });
        self.known.insert(name.into(), target);
        Ok(())
    }

    fn evaluate(
        &self,
        word: &GroupWord,
        conjugators: &Environment,
    ) -> Result<RepAut, ConstructError> {
        Ok(evaluate_symbolic(
            word,
            &self.bind(word, conjugators.clone()),
        )?)
    }

    fn action(
        &mut self,
        step: &str,
        name: &str,
        vector: Vec<BigInt>,
        image: Vec<BigInt>,
    ) -> Result<(), ConstructError> {
        let word = GroupWord::named(name);
        let env = self.bind(&word, Environment::new());
        let cert = checked(Certificate::action(word, env, vector, image)?, step)?;
        self.steps.push(ChainStep {
            name: step.into(),
            produces: None,
            certificate: cert,
        });
        Ok(())
    }

    fn auxiliary(&mut self, step: &str, cert: Certificate) -> Result<(), ConstructError> {
        let certificate = checked(cert, step)?;
        self.steps.push(ChainStep {
            name: step.into(),
            produces: None,
            certificate,
        });
        Ok(())
    }
}

/// The reduced element `ψ` with `ψx = x + m z`, as tail data.
struct Reduced {
    name: String,
    window: usize,
    block_size: usize,
    /// `z` in the coordinates of one tail block of `ψ`.
    z: Vec<BigInt>,
}

fn tail_of(aut: &RepAut) -> Result<(usize, IntMatrix, IntMatrix), ConstructError> {
    match aut {
        RepAut::EventuallyUniform(e) => Ok((
            e.window(),
            e.block().block().clone(),
            e.block().inverse().clone(),
        )),
        _ => Err(ConstructError::Check(
            "expected an eventually uniform element".into(),
        )),
    }
}

fn displacement(block: &IntMatrix, m: &BigInt) -> Option<Vec<BigInt>> {
    let col = block.column(0);
    let mut z = Vec::with_capacity(col.len());
    for (i, x) in col.iter().enumerate() {
        let v = if i == 0 { x - 1 } else { x.clone() };
        if !v.is_multiple_of(m) {
            return None;
        }
        z.push(v / m);
    }
    Some(z)
}

/// Swaps the non-leading coordinates of sub-block 0 and sub-block `s`.
fn swap_tails(d: usize, p: usize, s: usize) -> IntMatrix {
    let mut perm: Vec<usize> = (0..d * p).collect();
    for i in 1..d {
        perm.swap(i, s * d + i);
    }
    let mut m = IntMatrix::zeros(d * p, d * p);
    for (j, &i) in perm.iter().enumerate() {
        m.set(i, j, BigInt::one());
    }
    m
}

fn reduce_step(
    b: &mut Builder,
    current: &str,
    window: usize,
    block: &IntMatrix,
    k: &BigInt,
    m: &BigInt,
    mu: u64,
) -> Result<Reduced, ConstructError> {
    let d = block.rows();
    if (k - 1i32).is_multiple_of(m) {
        let z = displacement(block, m).expect("k ≡ 1 mod m");
        return Ok(Reduced {
            name: current.into(),
            window,
            block_size: d,
            z,
        });
    }
    let l = order_reduce(k, mu)? as usize;
    if let (Some(ki), Some(mi)) = (k.to_i64(), m.to_i64()) {
        let r = conjugate_product_reduce(&vec![(ki, mi); l])?;
        if r.m != *m {
            return Err(ConstructError::Check(
                "conjugate product changed the level".into(),
            ));
        }
    }
    for p in 2..=l.max(2) {
        let size = p * d;
        let head = round_up(window, size);
        let mut conjugators = Environment::new();
        let mut factors = Vec::new();
        for s in (1..=l).rev() {
            let shift = (s - 1) % p;
            if shift == 0 {
                factors.push(GroupWord::named(current));
            } else {
                let name = format!("S_{s}");
                let swap = swap_tails(d, p, shift);
                conjugators.insert(name.clone(), with_inverse_head(head, swap.clone(), swap)?);
                factors.push(GroupWord::conj(
                    GroupWord::named(current),
                    GroupWord::named(name),
                ));
            }
        }
        let word = GroupWord::product(factors);
        let psi = b.evaluate(&word, &conjugators)?;
        let (w_psi, b_psi, _) = tail_of(&psi)?;
        let Some(z) = displacement(&b_psi, m) else {
            continue;
        };
        if !gcd_all(&z[1..]).is_one() {
            continue;
        }
        b.produce("conjugate product", "psi", word, conjugators, psi)?;
        let len = w_psi + b_psi.rows();
        let mut image = unit(len, w_psi);
        for (i, zi) in z.iter().enumerate() {
            image[w_psi + i] += m * zi;
        }
        b.action("conjugate product action", "psi", unit(len, w_psi), image)?;
        return Ok(Reduced {
            name: "psi".into(),
            window: w_psi,
            block_size: b_psi.rows(),
            z,
        });
    }
    Err(ConstructError::OutOfScope {
        step: "conjugate product".into(),
        reason: format!("no grouping of {l} conjugates leaves a unimodular displacement"),
    })
}

fn shear_rank(n: usize) -> usize {
    if n == 2 {
        3
    } else {
        2 * n - 2
    }
}

fn super_block(n: usize, lpsi: usize) -> usize {
    let mut q = 2;
    while q * lpsi < 2 * shear_rank(n) || !(q * lpsi).is_multiple_of(2) {
        q += 1;
    }
    q * lpsi
}

/// Shear conjugation, extraction and spreading for one `n`; produces the
/// name of a `τ^{mn}`-type element with identity head of size `head`.
fn level_times_n(
    b: &mut Builder,
    red: &Reduced,
    m: &BigInt,
    n: usize,
    head: usize,
) -> Result<String, ConstructError> {
    let mi = m
        .to_i64()
        .ok_or_else(|| ConstructError::Argument("level too large".into()))?;
    let shear = order_n_shear(n, mi)?;
    let r = shear.rank();
    let lp = red.block_size;
    let size = super_block(n, lp);
    let (xa, xb) = (0usize, lp);

    // local vectors in one super-block
    let e_a = unit(size, xa);
    let e_b = unit(size, xb);
    let mut z_a = vec![BigInt::zero(); size];
    let mut z_b = vec![BigInt::zero(); size];
    for (i, zi) in red.z.iter().enumerate() {
        z_a[xa + i] = zi.clone();
        z_b[xb + i] = zi.clone();
    }
    let x_prime = axpy(&e_a, m, &e_b);
    let y_prime = axpy(&z_a, &BigInt::from(-1), &e_b);
    let four = IntMatrix::from_columns(
        size,
        &[x_prime.clone(), y_prime.clone(), e_b.clone(), z_b.clone()],
    )?;
    let completed = complete_to_basis(&four)?;
    let mut extras: Vec<Vec<BigInt>> = (4..size).map(|j| completed.column(j)).collect();
    extras.reverse();
    let (s0, sn1, sn) = shear.slots();
    let mut columns = Vec::with_capacity(size);
    for (x, y) in [(x_prime, y_prime), (e_b.clone(), z_b)] {
        let c = extras.pop().expect("room for the shear");
        let mut slots = vec![None; r];
        slots[s0] = Some(x);
        slots[sn1] = Some(axpy(&y, &BigInt::one(), &c));
        slots[sn] = Some(c);
        for s in slots.iter_mut().filter(|s| s.is_none()) {
            *s = Some(extras.pop().expect("room for the shear"));
        }
        columns.extend(slots.into_iter().map(Option::unwrap));
    }
    while let Some(c) = extras.pop() {
        columns.push(c);
    }
    let f = IntMatrix::from_columns(size, &columns)?;
    let f_inv = f.inverse_unimodular()?;
    let g_inv = shear.gamma_inverse();
    let inner = IntMatrix::block_diag(&[&g_inv, &g_inv, &IntMatrix::identity(size - 2 * r)]);
    let lambda_block = &(&f * &inner) * &f_inv;
    let g = shear.gamma.clone();
    let inner_inv = IntMatrix::block_diag(&[&g, &g, &IntMatrix::identity(size - 2 * r)]);
    let lambda_inv = &(&f * &inner_inv) * &f_inv;

    let lam = format!("lambda_{n}");
    let mut conj = Environment::new();
    conj.insert(
        lam.clone(),
        with_inverse_head(head, lambda_block, lambda_inv)?,
    );
    b.auxiliary(
        &format!("order of the shear (n = {n})"),
        Certificate::order(GroupWord::named(&lam), conj.clone(), n as u64)?,
    )?;
    let word = GroupWord::product(
        (1..=n as i64)
            .map(|i| {
                GroupWord::conj(
                    GroupWord::named(&red.name),
                    GroupWord::power(GroupWord::named(&lam), i),
                )
            })
            .collect(),
    );
    let phi1 = b.evaluate(&word, &conj)?;
    let p1 = format!("phi1_{n}");
    b.produce(
        &format!("shear power (n = {n})"),
        &p1,
        word,
        conj,
        phi1.clone(),
    )?;

    let mn = m * BigInt::from(n);
    let len = head + size;
    let mut image = unit(len, head + xa);
    image[head + xb] += &mn;
    b.action(
        &format!("shear power action on x (n = {n})"),
        &p1,
        unit(len, head + xa),
        image,
    )?;
    b.action(
        &format!("shear power action on y (n = {n})"),
        &p1,
        unit(len, head + xb),
        unit(len, head + xb),
    )?;

    // commutator with a transvection along x_b
    let (w1, _, b1_inv) = tail_of(&phi1)?;
    if w1 != head || b1_inv.rows() != size {
        return Err(ConstructError::Check(
            "unexpected block structure after the shear step".into(),
        ));
    }
    let minus = &b1_inv - &IntMatrix::identity(size);
    let keep: Vec<Vec<BigInt>> = (0..size)
        .filter(|&i| i != xb)
        .map(|i| minus.row(i).to_vec())
        .collect();
    let reduced = IntMatrix::from_big_rows(keep)?;
    let s = snf(&reduced);
    let content = reduced.content();
    if content.is_zero() {
        return Err(ConstructError::OutOfScope {
            step: format!("extraction (n = {n})"),
            reason: "the shear power is trivial off x_b".into(),
        });
    }
    if !mn.is_multiple_of(&content) {
        return Err(ConstructError::OutOfScope {
            step: format!("extraction (n = {n})"),
            reason: format!("commutator content {content} does not divide {mn}"),
        });
    }
    let rows_sum: Vec<BigInt> = (0..s.u.cols())
        .map(|j| (0..s.u.rows()).map(|i| s.u.get(i, j)).sum())
        .collect();
    let factor = &mn / &content;
    let mut coeff = Vec::with_capacity(size);
    let mut it = rows_sum.into_iter();
    for i in 0..size {
        coeff.push(if i == xb {
            BigInt::zero()
        } else {
            it.next().expect("row") * &factor
        });
    }
    let w = minus.vec_mul(&coeff)?;
    if gcd_all(&w) != mn {
        return Err(ConstructError::Check(
            "transvection coefficients have the wrong content".into(),
        ));
    }
    let mut t_block = IntMatrix::identity(size);
    let mut t_inv = IntMatrix::identity(size);
    for (j, c) in coeff.iter().enumerate() {
        *t_block.entry_mut(xb, j) += c;
        *t_inv.entry_mut(xb, j) -= c;
    }
    let t = format!("t_{n}");
    let mut conj = Environment::new();
    conj.insert(t.clone(), with_inverse_head(head, t_block, t_inv)?);
    let word = GroupWord::product(vec![
        GroupWord::named(&p1),
        GroupWord::conj(
            GroupWord::inverse(GroupWord::named(&p1)),
            GroupWord::named(&t),
        ),
    ]);
    let comm = b.evaluate(&word, &conj)?;
    let mut expected = IntMatrix::identity(size);
    for (j, c) in w.iter().enumerate() {
        *expected.entry_mut(xb, j) += c;
    }
    if tail_of(&comm)?.1 != expected {
        return Err(ConstructError::Check(
            "commutator is not the expected transvection".into(),
        ));
    }
    let c_name = format!("c_{n}");
    b.produce(&format!("commutator (n = {n})"), &c_name, word, conj, comm)?;

    // spread the transvection over every pair of the super-block
    let w0: Vec<BigInt> = w.iter().map(|x| x / &mn).collect();
    let row = IntMatrix::from_big_rows(vec![w0])?;
    let s = snf(&row);
    let unit_sign = s.u.get(0, 0).clone();
    let u: Vec<BigInt> = s.v.column(0).iter().map(|x| x * &unit_sign).collect();
    let coords = s.v_inv.mul_vec(&e_b)?;
    if !coords[0].is_zero() {
        return Err(ConstructError::Check("x_b is not in the kernel".into()));
    }
    let kernel = s.v.submatrix(0, size, 1, size);
    let kappa = IntMatrix::column_vector(&coords[1..]);
    let kernel_basis = &kernel * &complete_to_basis(&kappa)?;
    let mut conj = Environment::new();
    let mut factors = Vec::new();
    // every E_j permutes the columns of one basis [u, kernel basis]
    let mut base_cols = vec![u];
    base_cols.extend((0..size - 1).map(|c| kernel_basis.column(c)));
    let base = IntMatrix::from_columns(size, &base_cols)?;
    let base_inv = base.inverse_unimodular()?;
    for j in 0..size / 2 {
        let mut order = vec![None; size];
        order[2 * j] = Some(0);
        order[2 * j + 1] = Some(1);
        let mut rest = 2..size;
        for c in order.iter_mut().filter(|c| c.is_none()) {
            *c = rest.next();
        }
        let order: Vec<usize> = order.into_iter().map(Option::unwrap).collect();
        let e = IntMatrix::from_columns(
            size,
            &order
                .iter()
                .map(|&c| base_cols[c].clone())
                .collect::<Vec<_>>(),
        )?;
        let rows: Vec<Vec<BigInt>> = order.iter().map(|&c| base_inv.row(c).to_vec()).collect();
        let name = format!("D_{n}_{j}");
        conj.insert(
            name.clone(),
            with_inverse_head(head, IntMatrix::from_big_rows(rows)?, e)?,
        );
        factors.push(GroupWord::conj(
            GroupWord::named(&c_name),
            GroupWord::named(name),
        ));
    }
    let tau_name = format!("tau_mn_{n}");
    b.produce(
        &format!("spread transvection (n = {n})"),
        &tau_name,
        GroupWord::product(factors),
        conj,
        tau_power_after(&mn, head)?,
    )?;
    Ok(tau_name)
}

fn run(
    phi: &RepAut,
    normalization: Option<Normalization>,
    coprime: (usize, usize),
) -> Result<WitnessChain, ConstructError> {
    let (n1, n2) = coprime;
    let (a, bz) = bezout_exponents(n1 as i64, n2 as i64)?;
    let mut b = Builder {
        steps: Vec::new(),
        known: Environment::new(),
    };
    b.known.insert(INPUT_NAME.into(), phi.clone());
    let mut current = INPUT_NAME.to_string();
    let mut work = phi.clone();
    if let Some(Normalization {
        conjugator: Some(f),
        normalized,
    }) = normalization
    {
        let mut conj = Environment::new();
        conj.insert("F".into(), f);
        let word = GroupWord::conj(GroupWord::named(INPUT_NAME), GroupWord::named("F"));
        b.produce("normalize", "phi0", word, conj, normalized.clone())?;
        current = "phi0".into();
        work = normalized;
    }
    let (window, block) = eventually_uniform_parts(&work)?;
    let block = block.clone();
    if block.rows() < 2 {
        return Err(ConstructError::Shape(
            "tail blocks must have at least two coordinates".into(),
        ));
    }
    let (k, m) = first_column_shape(&block);
    let mu = m.to_u64().filter(|&v| v >= 2).ok_or_else(|| {
        ConstructError::Shape(format!(
            "tail block must send e₀ to k·e₀ + m·w with m >= 2 and w primitive; found m = {m}"
        ))
    })?;
    let red = reduce_step(&mut b, &current, window, &block, &k, &m, mu)?;

    let l1 = super_block(n1, red.block_size);
    let l2 = super_block(n2, red.block_size);
    let head = round_up(red.window, l1.lcm(&l2));
    let t1 = level_times_n(&mut b, &red, &m, n1, head)?;
    let t2 = level_times_n(&mut b, &red, &m, n2, head)?;
    let word = GroupWord::product(vec![
        GroupWord::power(GroupWord::named(t1), a),
        GroupWord::power(GroupWord::named(t2), bz),
    ]);
    let target = tau_power_after(&m, head)?;
    b.produce(
        "coprime combination",
        "tau_m",
        word,
        Environment::new(),
        target.clone(),
    )?;

    let chain = WitnessChain {
        format_version: FORMAT_VERSION,
        input: phi.clone(),
        level: m,
        steps: b.steps,
        target,
    };
    // every certificate was rechecked as it was added
    Ok(chain)
}

/// Chain for `phi` whose tail block sends the first coordinate to
/// `k x + m w` (`m >= 2`, `w` primitive and off `x`); ends in `τ^m` on the
/// tail, identity on a finite head.
pub fn km_pipeline(phi: &RepAut, coprime: (usize, usize)) -> Result<WitnessChain, ConstructError> {
    run(phi, None, coprime)
}

/// Chain ending in a `τ^g`-type element, after conjugating `phi` into a shape
/// where its tail shears by exactly `g`.
pub fn ladder_chain(
    phi: &RepAut,
    g: i64,
    coprime: (usize, usize),
) -> Result<WitnessChain, ConstructError> {
    let norm = normalize_shear(phi, g)?;
    run(phi, Some(norm), coprime)
}
