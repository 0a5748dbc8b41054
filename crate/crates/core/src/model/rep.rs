use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::AutError;
use crate::arith::is_prime;
use crate::linalg::IntMatrix;

/// A `d x d` block together with its verified inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSpec {
    block: IntMatrix,
    inverse: IntMatrix,
}

impl BlockSpec {
    pub fn new(block: IntMatrix) -> Result<Self, AutError> {
        let inverse = invert_named(&block, "block")?;
        Ok(Self { block, inverse })
    }

    /// Accepts a claimed inverse after checking it.
    pub fn with_inverse(block: IntMatrix, inverse: IntMatrix) -> Result<Self, AutError> {
        if !block.is_square()
            || block.rows() != inverse.rows()
            || !inverse.is_square()
            || !(&block * &inverse).is_identity()
        {
            return Err(AutError::BadInverse { what: "block" });
        }
        Ok(Self { block, inverse })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            block: IntMatrix::identity(d),
            inverse: IntMatrix::identity(d),
        }
    }

    pub fn d(&self) -> usize {
        self.block.rows()
    }

    pub fn block(&self) -> &IntMatrix {
        &self.block
    }

    pub fn inverse(&self) -> &IntMatrix {
        &self.inverse
    }

    pub fn repeated(&self, k: usize) -> Self {
        Self {
            block: IntMatrix::repeat_block(&self.block, k),
            inverse: IntMatrix::repeat_block(&self.inverse, k),
        }
    }

    fn inverted(&self) -> Self {
        Self {
            block: self.inverse.clone(),
            inverse: self.block.clone(),
        }
    }
}

fn invert_named(m: &IntMatrix, what: &'static str) -> Result<IntMatrix, AutError> {
    if !m.is_square() {
        return Err(AutError::NotSquare {
            what,
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    m.inverse_unimodular().map_err(|_| AutError::NotUnimodular {
        what,
        det: m.determinant().unwrap_or_default(),
    })
}

/// Unimodular action on finitely many coordinates, identity elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finitary {
    support: Vec<usize>,
    matrix: IntMatrix,
    inverse: IntMatrix,
}

/// An arbitrary unimodular head on `[0, window)` followed by one block repeated
/// on every `d`-sized range of coordinates beyond it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventuallyUniform {
    window: usize,
    head: IntMatrix,
    head_inverse: IntMatrix,
    block: BlockSpec,
}

/// Pairs `(x_n, y_n) = (2n, 2n + 1)` with `x_n -> x_n + scale * P_n * y_n`, where
/// `P_n = m_0 * ... * m_n`. The multipliers are the prefix followed by the
/// increasing primes that are neither excluded nor divide a prefix multiplier.
/// Coordinates below `head_window` are governed by `head` instead.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedBlock {
    head_window: usize,
    head: IntMatrix,
    head_inverse: IntMatrix,
    prefix: Vec<u64>,
    excluded: BTreeSet<u64>,
    scale: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "crate::io::AutRecord", into = "crate::io::AutRecord")]
pub enum RepAut {
    Finitary(Finitary),
    EventuallyUniform(EventuallyUniform),
    Graded(GradedBlock),
}

/// Windows admissible for a representation: every `N >= min` with `N % step == 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Alignment {
    pub min: usize,
    pub step: usize,
}

impl Alignment {
    pub fn any() -> Self {
        Self { min: 0, step: 1 }
    }

    pub fn admits(&self, n: usize) -> bool {
        n >= self.min && n.is_multiple_of(self.step)
    }

    pub fn join(self, other: Self) -> Self {
        Self {
            min: self.min.max(other.min),
            step: self.step.lcm(&other.step),
        }
    }

    /// Smallest admissible window that is at least `n`.
    pub fn round_up(&self, n: usize) -> usize {
        let n = n.max(self.min);
        n.div_ceil(self.step) * self.step
    }

    /// The two windows used for certificates: the first admissible window
    /// holding at least two steps, and that plus two further steps.
    pub fn certificate_windows(&self) -> [usize; 2] {
        let first = self.round_up((2 * self.step).max(self.min + self.step));
        [first, first + 2 * self.step]
    }
}

impl Finitary {
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &IntMatrix {
        &self.inverse
    }
}

impl EventuallyUniform {
    pub fn window(&self) -> usize {
        self.window
    }

    pub fn head(&self) -> &IntMatrix {
        &self.head
    }

    pub fn head_inverse(&self) -> &IntMatrix {
        &self.head_inverse
    }

    pub fn block(&self) -> &BlockSpec {
        &self.block
    }

    pub fn d(&self) -> usize {
        self.block.d()
    }
}

impl GradedBlock {
    pub fn head_window(&self) -> usize {
        self.head_window
    }

    pub fn head(&self) -> &IntMatrix {
        &self.head
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn excluded(&self) -> &BTreeSet<u64> {
        &self.excluded
    }

    pub fn scale(&self) -> &BigInt {
        &self.scale
    }

    /// Whether `p` is one of the tail primes.
    pub fn is_tail_prime(&self, p: u64) -> bool {
        is_prime(p) && !self.excluded.contains(&p) && self.prefix.iter().all(|m| m % p != 0)
    }

    /// The first `count` multipliers `m_0, m_1, ...`.
    pub fn multipliers(&self, count: usize) -> Vec<u64> {
        let mut out: Vec<u64> = self.prefix.iter().copied().take(count).collect();
        let mut p = 1u64;
        while out.len() < count {
            p += 1;
            if self.is_tail_prime(p) {
                out.push(p);
            }
        }
        out
    }

    /// Increments `scale * P_n` for `n < count`.
    pub fn increments(&self, count: usize) -> Vec<BigInt> {
        let mut acc = self.scale.clone();
        self.multipliers(count)
            .into_iter()
            .map(|m| {
                acc *= m;
                acc.clone()
            })
            .collect()
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.prefix == other.prefix && self.excluded == other.excluded
    }
}

impl RepAut {
    pub fn identity() -> Self {
        RepAut::Finitary(Finitary {
            support: Vec::new(),
            matrix: IntMatrix::zeros(0, 0),
            inverse: IntMatrix::zeros(0, 0),
        })
    }

    /// Finitary automorphism; the support may be given in any order and the
    /// matrix is indexed accordingly.
    pub fn finitary(support: Vec<usize>, matrix: IntMatrix) -> Result<Self, AutError> {
        if matrix.rows() != support.len() || matrix.cols() != support.len() {
            return Err(AutError::Argument(format!(
                "support of size {} needs a square matrix of that size, got {}x{}",
                support.len(),
                matrix.rows(),
                matrix.cols()
            )));
        }
        let mut order: Vec<usize> = (0..support.len()).collect();
        order.sort_by_key(|&i| support[i]);
        if order.windows(2).any(|w| support[w[0]] == support[w[1]]) {
            return Err(AutError::Argument(
                "support has repeated coordinates".into(),
            ));
        }
        let n = support.len();
        let mut sorted = IntMatrix::zeros(n, n);
        for (a, &i) in order.iter().enumerate() {
            for (b, &j) in order.iter().enumerate() {
                sorted.set(a, b, matrix.get(i, j).clone());
            }
        }
        let inverse = invert_named(&sorted, "finitary matrix")?;
        Ok(RepAut::Finitary(Finitary {
            support: order.iter().map(|&i| support[i]).collect(),
            matrix: sorted,
            inverse,
        }))
    }

    /// Finitary automorphism on the coordinates `[0, n)`.
    pub fn finitary_prefix(matrix: IntMatrix) -> Result<Self, AutError> {
        Self::finitary((0..matrix.rows()).collect(), matrix)
    }

    pub fn uniform(block: IntMatrix) -> Result<Self, AutError> {
        Ok(Self::uniform_spec(BlockSpec::new(block)?))
    }

    pub fn uniform_spec(block: BlockSpec) -> Self {
        RepAut::EventuallyUniform(EventuallyUniform {
            window: 0,
            head: IntMatrix::zeros(0, 0),
            head_inverse: IntMatrix::zeros(0, 0),
            block,
        })
    }

    pub fn eventually_uniform(head: IntMatrix, block: IntMatrix) -> Result<Self, AutError> {
        let head_inverse = invert_named(&head, "window matrix")?;
        Self::eventually_uniform_parts(head, head_inverse, BlockSpec::new(block)?)
    }

    /// Eventually uniform automorphism whose block comes with a known inverse.
    pub fn eventually_uniform_spec(head: IntMatrix, block: BlockSpec) -> Result<Self, AutError> {
        let head_inverse = invert_named(&head, "window matrix")?;
        Self::eventually_uniform_parts(head, head_inverse, block)
    }

    fn eventually_uniform_parts(
        head: IntMatrix,
        head_inverse: IntMatrix,
        block: BlockSpec,
    ) -> Result<Self, AutError> {
        let window = head.rows();
        if block.d() == 0 {
            return Err(AutError::Argument(
                "block dimension must be positive".into(),
            ));
        }
        if !window.is_multiple_of(block.d()) {
            return Err(AutError::Argument(format!(
                "window {window} is not a multiple of the block size {}",
                block.d()
            )));
        }
        Ok(RepAut::EventuallyUniform(EventuallyUniform {
            window,
            head,
            head_inverse,
            block,
        }))
    }

    pub fn graded(prefix: Vec<u64>, excluded: BTreeSet<u64>) -> Result<Self, AutError> {
        Self::graded_full(IntMatrix::zeros(0, 0), prefix, excluded, BigInt::one())
    }

    /// Graded automorphism with an explicit head and scale.
    pub fn graded_full(
        head: IntMatrix,
        prefix: Vec<u64>,
        excluded: BTreeSet<u64>,
        scale: BigInt,
    ) -> Result<Self, AutError> {
        if let Some(m) = prefix.iter().find(|&&m| m < 2) {
            return Err(AutError::Argument(format!("multiplier {m} is below 2")));
        }
        if scale.is_zero() {
            return Err(AutError::Argument("graded scale must be nonzero".into()));
        }
        if !head.rows().is_multiple_of(2) {
            return Err(AutError::Argument("graded head window must be even".into()));
        }
        let head_inverse = invert_named(&head, "graded head")?;
        Ok(RepAut::Graded(GradedBlock {
            head_window: head.rows(),
            head,
            head_inverse,
            prefix,
            excluded,
            scale,
        }))
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            RepAut::Finitary(_) => "finitary",
            RepAut::EventuallyUniform(e) if e.window == 0 => "uniform",
            RepAut::EventuallyUniform(_) => "eventually_uniform",
            RepAut::Graded(_) => "graded",
        }
    }

    pub fn alignment(&self) -> Alignment {
        match self {
            RepAut::Finitary(f) => Alignment {
                min: f.support.last().map_or(0, |&m| m + 1),
                step: 1,
            },
            RepAut::EventuallyUniform(e) => Alignment {
                min: e.window,
                step: e.d(),
            },
            RepAut::Graded(g) => Alignment {
                min: g.head_window,
                step: 2,
            },
        }
    }

    /// Matrix of the restriction to coordinates `[0, n)`.
    pub fn window_matrix(&self, n: usize) -> Result<IntMatrix, AutError> {
        self.window_impl(n, false)
    }

    /// Window matrix of the inverse, without building the inverse representation.
    pub fn window_matrix_inverse(&self, n: usize) -> Result<IntMatrix, AutError> {
        self.window_impl(n, true)
    }

    fn window_impl(&self, n: usize, inverse: bool) -> Result<IntMatrix, AutError> {
        let al = self.alignment();
        if !al.admits(n) {
            return Err(AutError::Window {
                requested: n,
                min: al.min,
                step: al.step,
            });
        }
        let mut out = IntMatrix::identity(n);
        match self {
            RepAut::Finitary(f) => {
                let m = if inverse { &f.inverse } else { &f.matrix };
                for (a, &i) in f.support.iter().enumerate() {
                    for (b, &j) in f.support.iter().enumerate() {
                        out.set(i, j, m.get(a, b).clone());
                    }
                }
            }
            RepAut::EventuallyUniform(e) => {
                out.set_block(0, 0, if inverse { &e.head_inverse } else { &e.head });
                let b = if inverse {
                    e.block.inverse()
                } else {
                    e.block.block()
                };
                let mut at = e.window;
                while at < n {
                    out.set_block(at, at, b);
                    at += e.d();
                }
            }
            RepAut::Graded(g) => {
                out.set_block(0, 0, if inverse { &g.head_inverse } else { &g.head });
                let incs = g.increments(n / 2);
                for (pair, v) in incs.iter().enumerate().skip(g.head_window / 2) {
                    out.set(2 * pair + 1, 2 * pair, if inverse { -v } else { v.clone() });
                }
            }
        }
        Ok(out)
    }

    pub fn invert(&self) -> RepAut {
        match self {
            RepAut::Finitary(f) => RepAut::Finitary(Finitary {
                support: f.support.clone(),
                matrix: f.inverse.clone(),
                inverse: f.matrix.clone(),
            }),
            RepAut::EventuallyUniform(e) => RepAut::EventuallyUniform(EventuallyUniform {
                window: e.window,
                head: e.head_inverse.clone(),
                head_inverse: e.head.clone(),
                block: e.block.inverted(),
            }),
            RepAut::Graded(g) => RepAut::Graded(GradedBlock {
                head_window: g.head_window,
                head: g.head_inverse.clone(),
                head_inverse: g.head.clone(),
                prefix: g.prefix.clone(),
                excluded: g.excluded.clone(),
                scale: -&g.scale,
            }),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            RepAut::Finitary(f) => f.matrix.is_identity(),
            RepAut::EventuallyUniform(e) => e.head.is_identity() && e.block.block().is_identity(),
            RepAut::Graded(_) => false,
        }
    }

    /// Re-describes an eventually uniform automorphism with a larger window and
    /// a block size that is a multiple of the current one.
    pub fn reblock(&self, window: usize, d: usize) -> Result<RepAut, AutError> {
        let RepAut::EventuallyUniform(e) = self else {
            return Err(AutError::Argument(
                "only eventually uniform automorphisms can be re-blocked".into(),
            ));
        };
        if d == 0
            || !d.is_multiple_of(e.d())
            || !window.is_multiple_of(d)
            || !self.alignment().admits(window)
        {
            return Err(AutError::Argument(format!(
                "cannot re-block window {} / block {} to window {window} / block {d}",
                e.window,
                e.d()
            )));
        }
        let head = self.window_matrix(window)?;
        let head_inverse = self.window_matrix_inverse(window)?;
        Self::eventually_uniform_parts(head, head_inverse, e.block.repeated(d / e.d()))
    }

    /// A uniform automorphism described with `k`-fold blocks.
    pub fn direct_sum_and_reblock(&self, k: usize) -> Result<RepAut, AutError> {
        match self {
            RepAut::EventuallyUniform(e) if e.window == 0 => {
                if k < 1 {
                    return Err(AutError::Argument(
                        "re-block factor must be at least 1".into(),
                    ));
                }
                Ok(Self::uniform_spec(e.block.repeated(k)))
            }
            _ => Err(AutError::Argument(
                "direct sums are defined for uniform automorphisms".into(),
            )),
        }
    }

    /// Symbolic product `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &RepAut) -> Result<RepAut, AutError> {
        use RepAut::*;
        match (self, other) {
            (Finitary(a), Finitary(b)) => compose_finitary(a, b),
            (Graded(_), EventuallyUniform(_)) | (EventuallyUniform(_), Graded(_)) => {
                Err(AutError::CompositionUnsupported(
                    "graded and eventually uniform automorphisms".into(),
                ))
            }
            (Graded(a), Graded(b)) => {
                if !a.same_shape(b) {
                    return Err(AutError::CompositionUnsupported(
                        "graded automorphisms with different multipliers".into(),
                    ));
                }
                let w = a.head_window.max(b.head_window);
                let head = &self.window_matrix(w)? * &other.window_matrix(w)?;
                let scale = &a.scale + &b.scale;
                if scale.is_zero() {
                    return Self::finitary_prefix(head);
                }
                let head_inverse =
                    &other.window_matrix_inverse(w)? * &self.window_matrix_inverse(w)?;
                Ok(Graded(GradedBlock {
                    head_window: w,
                    head,
                    head_inverse,
                    prefix: a.prefix.clone(),
                    excluded: a.excluded.clone(),
                    scale,
                }))
            }
            (Graded(g), Finitary(_)) | (Finitary(_), Graded(g)) => {
                let w = self.alignment().join(other.alignment()).round_up(0);
                let head = &self.window_matrix(w)? * &other.window_matrix(w)?;
                let head_inverse =
                    &other.window_matrix_inverse(w)? * &self.window_matrix_inverse(w)?;
                Ok(Graded(GradedBlock {
                    head_window: w,
                    head,
                    head_inverse,
                    prefix: g.prefix.clone(),
                    excluded: g.excluded.clone(),
                    scale: g.scale.clone(),
                }))
            }
            _ => {
                let al = self.alignment().join(other.alignment());
                let d = al.step;
                let w = al.round_up(0);
                let head = &self.window_matrix(w)? * &other.window_matrix(w)?;
                let head_inverse =
                    &other.window_matrix_inverse(w)? * &self.window_matrix_inverse(w)?;
                let bs = tail_block(self, d);
                let bo = tail_block(other, d);
                let block = BlockSpec {
                    block: bs.block() * bo.block(),
                    inverse: bo.inverse() * bs.inverse(),
                };
                Self::eventually_uniform_parts(head, head_inverse, block)
            }
        }
    }

    /// Largest absolute entry across the stored matrices, for size reporting.
    pub fn max_abs_entry(&self) -> BigInt {
        match self {
            RepAut::Finitary(f) => f.matrix.max_abs(),
            RepAut::EventuallyUniform(e) => e.head.max_abs().max(e.block.block().max_abs()),
            RepAut::Graded(g) => g.head.max_abs().max(g.scale.abs()),
        }
    }

    /// Block size as a machine integer, for eventually uniform values.
    pub fn block_size(&self) -> Option<usize> {
        match self {
            RepAut::EventuallyUniform(e) => Some(e.d()),
            _ => None,
        }
    }

    pub fn as_uniform_block(&self) -> Option<&IntMatrix> {
        match self {
            RepAut::EventuallyUniform(e) if e.window == 0 => Some(e.block.block()),
            _ => None,
        }
    }

    pub fn scale_i64(&self) -> Option<i64> {
        match self {
            RepAut::Graded(g) => g.scale.to_i64(),
            _ => None,
        }
    }
}

/// Repeated tail block of a finitary or eventually uniform value, widened to `d`.
fn tail_block(a: &RepAut, d: usize) -> BlockSpec {
    match a {
        RepAut::EventuallyUniform(e) => e.block.repeated(d / e.d()),
        _ => BlockSpec::identity(d),
    }
}

fn compose_finitary(a: &Finitary, b: &Finitary) -> Result<RepAut, AutError> {
    let support: Vec<usize> = a
        .support
        .iter()
        .chain(&b.support)
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let embed = |f: &Finitary, inv: bool| {
        let n = support.len();
        let mut m = IntMatrix::identity(n);
        let pos: Vec<usize> = f
            .support
            .iter()
            .map(|s| support.binary_search(s).expect("support is a subset"))
            .collect();
        let src = if inv { &f.inverse } else { &f.matrix };
        for (x, &i) in pos.iter().enumerate() {
            for (y, &j) in pos.iter().enumerate() {
                m.set(i, j, src.get(x, y).clone());
            }
        }
        m
    };
    let matrix = &embed(a, false) * &embed(b, false);
    let inverse = &embed(b, true) * &embed(a, true);
    Ok(RepAut::Finitary(Finitary {
        support,
        matrix,
        inverse,
    }))
}
