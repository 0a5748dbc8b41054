use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{Alignment, AutError, RepAut};
use crate::linalg::IntMatrix;

/// Named automorphisms a word refers to.
pub type Environment = BTreeMap<String, RepAut>;

/// Formal product of named automorphisms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum GroupWord {
    Named {
        name: String,
    },
    Inverse {
        of: Box<GroupWord>,
    },
    Power {
        base: Box<GroupWord>,
        exponent: i64,
    },
    /// `h * g * h^-1`
    Conj {
        g: Box<GroupWord>,
        h: Box<GroupWord>,
    },
    Product {
        factors: Vec<GroupWord>,
    },
}

impl GroupWord {
    pub fn named(name: impl Into<String>) -> Self {
        GroupWord::Named { name: name.into() }
    }

    pub fn inverse(of: GroupWord) -> Self {
        GroupWord::Inverse { of: Box::new(of) }
    }

    pub fn power(base: GroupWord, exponent: i64) -> Self {
        GroupWord::Power {
            base: Box::new(base),
            exponent,
        }
    }

    pub fn conj(g: GroupWord, h: GroupWord) -> Self {
        GroupWord::Conj {
            g: Box::new(g),
            h: Box::new(h),
        }
    }

    pub fn product(factors: Vec<GroupWord>) -> Self {
        GroupWord::Product { factors }
    }

    /// Every name the word mentions.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            GroupWord::Named { name } => {
                out.insert(name.clone());
            }
            GroupWord::Inverse { of } => of.collect_names(out),
            GroupWord::Power { base, .. } => base.collect_names(out),
            GroupWord::Conj { g, h } => {
                g.collect_names(out);
                h.collect_names(out);
            }
            GroupWord::Product { factors } => factors.iter().for_each(|f| f.collect_names(out)),
        }
    }

    /// Whether the word is syntactically an element of the normal closure of
    /// the `generators`: generator names only occur outside conjugator slots,
    /// and any other name only inside a conjugator slot.
    pub fn in_normal_closure_of(&self, generators: &BTreeSet<String>) -> bool {
        match self {
            GroupWord::Named { name } => generators.contains(name),
            GroupWord::Inverse { of } => of.in_normal_closure_of(generators),
            GroupWord::Power { base, .. } => base.in_normal_closure_of(generators),
            GroupWord::Conj { g, .. } => g.in_normal_closure_of(generators),
            GroupWord::Product { factors } => {
                factors.iter().all(|f| f.in_normal_closure_of(generators))
            }
        }
    }

    /// Number of `Conj` tokens at the top level of a product.
    pub fn top_level_conjugates(&self) -> usize {
        match self {
            GroupWord::Product { factors } => factors
                .iter()
                .filter(|f| matches!(f, GroupWord::Conj { .. }))
                .count(),
            GroupWord::Conj { .. } => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupWord::Named { name } => write!(f, "{name}"),
            GroupWord::Inverse { of } => write!(f, "({of})^-1"),
            GroupWord::Power { base, exponent } => write!(f, "({base})^{exponent}"),
            GroupWord::Conj { g, h } => write!(f, "[{h}]({g})[{h}]^-1"),
            GroupWord::Product { factors } => {
                if factors.is_empty() {
                    return write!(f, "id");
                }
                for (i, x) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, " * ")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
        }
    }
}

fn lookup<'a>(env: &'a Environment, name: &str) -> Result<&'a RepAut, AutError> {
    env.get(name)
        .ok_or_else(|| AutError::UnresolvedName(name.to_string()))
}

/// Joint alignment of every automorphism the word mentions.
pub fn word_alignment(w: &GroupWord, env: &Environment) -> Result<Alignment, AutError> {
    w.names().iter().try_fold(Alignment::any(), |acc, n| {
        Ok(acc.join(lookup(env, n)?.alignment()))
    })
}

struct Evaluator<'a> {
    env: &'a Environment,
    n: usize,
    cache: HashMap<(String, bool), IntMatrix>,
}

impl Evaluator<'_> {
    fn atom(&mut self, name: &str, inverse: bool) -> Result<IntMatrix, AutError> {
        let key = (name.to_string(), inverse);
        if let Some(m) = self.cache.get(&key) {
            return Ok(m.clone());
        }
        let a = lookup(self.env, name)?;
        let m = if inverse {
            a.window_matrix_inverse(self.n)?
        } else {
            a.window_matrix(self.n)?
        };
        self.cache.insert(key, m.clone());
        Ok(m)
    }

    fn eval(&mut self, w: &GroupWord, inverse: bool) -> Result<IntMatrix, AutError> {
        Ok(match w {
            GroupWord::Named { name } => self.atom(name, inverse)?,
            GroupWord::Inverse { of } => self.eval(of, !inverse)?,
            GroupWord::Power { base, exponent } => {
                let e = if inverse { -exponent } else { *exponent };
                let b = self.eval(base, e < 0)?;
                b.pow(e.unsigned_abs())?
            }
            GroupWord::Conj { g, h } => {
                let hm = self.eval(h, false)?;
                let hi = self.eval(h, true)?;
                let gm = self.eval(g, inverse)?;
                &(&hm * &gm) * &hi
            }
            GroupWord::Product { factors } => {
                let mut acc = IntMatrix::identity(self.n);
                if inverse {
                    for f in factors.iter().rev() {
                        acc = &acc * &self.eval(f, true)?;
                    }
                } else {
                    for f in factors {
                        acc = &acc * &self.eval(f, false)?;
                    }
                }
                acc
            }
        })
    }

    fn apply(
        &mut self,
        w: &GroupWord,
        inverse: bool,
        v: Vec<BigInt>,
    ) -> Result<Vec<BigInt>, AutError> {
        Ok(match w {
            GroupWord::Named { name } => self.atom(name, inverse)?.mul_vec(&v)?,
            GroupWord::Inverse { of } => self.apply(of, !inverse, v)?,
            GroupWord::Power { base, exponent } => {
                let e = if inverse { -exponent } else { *exponent };
                if e.unsigned_abs() > 16 {
                    self.eval(w, inverse)?.mul_vec(&v)?
                } else {
                    let mut v = v;
                    for _ in 0..e.unsigned_abs() {
                        v = self.apply(base, e < 0, v)?;
                    }
                    v
                }
            }
            GroupWord::Conj { g, h } => {
                let v = self.apply(h, true, v)?;
                let v = self.apply(g, inverse, v)?;
                self.apply(h, false, v)?
            }
            GroupWord::Product { factors } => {
                let mut v = v;
                if inverse {
                    for f in factors {
                        v = self.apply(f, true, v)?;
                    }
                } else {
                    for f in factors.iter().rev() {
                        v = self.apply(f, false, v)?;
                    }
                }
                v
            }
        })
    }
}

/// The `n x n` window matrix of the product, evaluated left to right.
pub fn evaluate_word(w: &GroupWord, env: &Environment, n: usize) -> Result<IntMatrix, AutError> {
    check_window(w, env, n)?;
    Evaluator {
        env,
        n,
        cache: HashMap::new(),
    }
    .eval(w, false)
}

/// Applies the word to a vector of length `n` without forming the full product.
pub fn apply_word(
    w: &GroupWord,
    env: &Environment,
    n: usize,
    v: &[BigInt],
) -> Result<Vec<BigInt>, AutError> {
    check_window(w, env, n)?;
    if v.len() != n {
        return Err(AutError::Argument(format!(
            "vector has length {}, window is {n}",
            v.len()
        )));
    }
    Evaluator {
        env,
        n,
        cache: HashMap::new(),
    }
    .apply(w, false, v.to_vec())
}

fn check_window(w: &GroupWord, env: &Environment, n: usize) -> Result<(), AutError> {
    let al = word_alignment(w, env)?;
    if !al.admits(n) {
        return Err(AutError::Window {
            requested: n,
            min: al.min,
            step: al.step,
        });
    }
    Ok(())
}

/// Evaluates the word symbolically, within the closure rules of `compose`.
pub fn evaluate_symbolic(w: &GroupWord, env: &Environment) -> Result<RepAut, AutError> {
    Ok(match w {
        GroupWord::Named { name } => lookup(env, name)?.clone(),
        GroupWord::Inverse { of } => evaluate_symbolic(of, env)?.invert(),
        GroupWord::Power { base, exponent } => {
            let mut b = evaluate_symbolic(base, env)?;
            if *exponent < 0 {
                b = b.invert();
            }
            let mut e = exponent.unsigned_abs();
            let mut acc = RepAut::identity();
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc.compose(&b)?;
                }
                e >>= 1;
                if e > 0 {
                    b = b.compose(&b)?;
                }
            }
            acc
        }
        GroupWord::Conj { g, h } => {
            let hv = evaluate_symbolic(h, env)?;
            let gv = evaluate_symbolic(g, env)?;
            hv.compose(&gv)?.compose(&hv.invert())?
        }
        GroupWord::Product { factors } => {
            let mut acc = RepAut::identity();
            for f in factors {
                acc = acc.compose(&evaluate_symbolic(f, env)?)?;
            }
            acc
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ivec, mat};

    fn env() -> Environment {
        let mut e = Environment::new();
        e.insert(
            "tau".into(),
            RepAut::uniform(mat(&[[1, 0], [1, 1]])).unwrap(),
        );
        e.insert(
            "sigma".into(),
            RepAut::finitary(vec![0, 1], mat(&[[0, 1], [1, 0]])).unwrap(),
        );
        e.insert(
            "phi".into(),
            RepAut::eventually_uniform(mat(&[[2, 1], [1, 1]]), mat(&[[1, 3], [0, 1]])).unwrap(),
        );
        e
    }

    #[test]
    fn power_zero_is_identity() {
        let w = GroupWord::power(GroupWord::named("tau"), 0);
        assert!(evaluate_word(&w, &env(), 4).unwrap().is_identity());
    }

    #[test]
    fn conjugation_by_swap() {
        let w = GroupWord::conj(GroupWord::named("tau"), GroupWord::named("sigma"));
        assert_eq!(
            evaluate_word(&w, &env(), 2).unwrap(),
            mat(&[[1, 1], [0, 1]])
        );
    }

    #[test]
    fn inverse_cancels() {
        let w = GroupWord::product(vec![
            GroupWord::named("phi"),
            GroupWord::inverse(GroupWord::named("phi")),
        ]);
        assert!(evaluate_word(&w, &env(), 6).unwrap().is_identity());
    }

    #[test]
    fn unresolved_and_misaligned() {
        let w = GroupWord::named("nope");
        assert!(matches!(
            evaluate_word(&w, &env(), 2),
            Err(AutError::UnresolvedName(_))
        ));
        let w = GroupWord::named("phi");
        assert!(matches!(
            evaluate_word(&w, &env(), 3),
            Err(AutError::Window { .. })
        ));
    }

    #[test]
    fn reassociation_and_action_agree() {
        let (a, b, c) = (
            GroupWord::named("tau"),
            GroupWord::named("phi"),
            GroupWord::named("sigma"),
        );
        let flat = GroupWord::product(vec![a.clone(), b.clone(), c.clone()]);
        let left = GroupWord::product(vec![
            GroupWord::product(vec![a.clone(), b.clone()]),
            c.clone(),
        ]);
        let right = GroupWord::product(vec![a, GroupWord::product(vec![b, c])]);
        let e = env();
        let m = evaluate_word(&flat, &e, 6).unwrap();
        assert_eq!(m, evaluate_word(&left, &e, 6).unwrap());
        assert_eq!(m, evaluate_word(&right, &e, 6).unwrap());
        let w = GroupWord::inverse(GroupWord::power(
            GroupWord::conj(flat.clone(), GroupWord::named("tau")),
            -3,
        ));
        let v = ivec(&[1, -2, 0, 5, 3, 1]);
        assert_eq!(
            apply_word(&w, &e, 6, &v).unwrap(),
            evaluate_word(&w, &e, 6).unwrap().mul_vec(&v).unwrap()
        );
        let sym = evaluate_symbolic(&w, &e).unwrap();
        assert_eq!(
            sym.window_matrix(6).unwrap(),
            evaluate_word(&w, &e, 6).unwrap()
        );
    }

    #[test]
    fn normal_closure_syntax() {
        let gens: BTreeSet<String> = ["phi".to_string()].into();
        let ok = GroupWord::product(vec![
            GroupWord::conj(GroupWord::named("phi"), GroupWord::named("sigma")),
            GroupWord::power(GroupWord::inverse(GroupWord::named("phi")), 3),
        ]);
        assert!(ok.in_normal_closure_of(&gens));
        let bad = GroupWord::product(vec![GroupWord::named("phi"), GroupWord::named("sigma")]);
        assert!(!bad.in_normal_closure_of(&gens));
    }
}
