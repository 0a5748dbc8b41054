use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::LinalgError;

/// Dense matrix of arbitrary-precision integers, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::EntryCount {
                rows,
                cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of machine integers. Ragged input is an error.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(LinalgError::Ragged { row: i });
            }
            data.extend(r.iter().map(|&v| BigInt::from(v)));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(LinalgError::Ragged { row: i });
            }
            data.extend(r);
        }
        Ok(Self {
            rows: n,
            cols,
            data,
        })
    }

    /// Column vector from entries.
    pub fn column_vector(v: &[BigInt]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(LinalgError::Ragged { row: j });
            }
            for (i, v) in c.iter().enumerate() {
                m.data[i * m.cols + j] = v.clone();
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape {
                op: "multiply",
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        let n = other.cols;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                let brow = other.row(k);
                let orow = &mut out.data[i * n..(i + 1) * n];
                if a.is_one() {
                    for (o, b) in orow.iter_mut().zip(brow) {
                        if !b.is_zero() {
                            *o += b;
                        }
                    }
                } else {
                    for (o, b) in orow.iter_mut().zip(brow) {
                        if !b.is_zero() {
                            *o += a * b;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, "subtract", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Self,
        op: &'static str,
        f: impl Fn(&BigInt, &BigInt) -> BigInt,
    ) -> Result<Self, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::Shape {
                op,
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::Shape {
                op: "apply",
                left: (self.rows, self.cols),
                right: (v.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = BigInt::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect())
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[BigInt]) -> Result<Vec<BigInt>, LinalgError> {
        if v.len() != self.rows {
            return Err(LinalgError::Shape {
                op: "apply",
                left: (1, v.len()),
                right: (self.rows, self.cols),
            });
        }
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (o, b) in out.iter_mut().zip(self.row(i)) {
                if !b.is_zero() {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u64) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    /// Copy of the block `[r0, r1) x [c0, c1)`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        let mut out = Self::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                out.set(i - r0, j - c0, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn top_left(&self, n: usize) -> Self {
        self.submatrix(0, n, 0, n)
    }

    /// Writes `block` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    pub fn block_diag(blocks: &[&Self]) -> Self {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(r, c);
        let (mut i, mut j) = (0, 0);
        for b in blocks {
            out.set_block(i, j, b);
            i += b.rows;
            j += b.cols;
        }
        out
    }

    /// `k` copies of a square block along the diagonal.
    pub fn repeat_block(block: &Self, k: usize) -> Self {
        let blocks: Vec<&Self> = std::iter::repeat_n(block, k).collect();
        Self::block_diag(&blocks)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[target] += q * row[src]`.
    pub fn add_row_multiple(&mut self, target: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = q * self.get(src, j);
            if !v.is_zero() {
                *self.entry_mut(target, j) += v;
            }
        }
    }

    /// `col[target] += q * col[src]`.
    pub fn add_col_multiple(&mut self, target: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = q * self.get(i, src);
            if !v.is_zero() {
                *self.entry_mut(i, target) += v;
            }
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = self.entry_mut(i, j);
            *v = -std::mem::take(v);
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = self.entry_mut(i, j);
            *v = -std::mem::take(v);
        }
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn determinant(&self) -> Result<BigInt, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = false;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = !sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        let d = a.get(n - 1, n - 1).clone();
        Ok(if sign { -d } else { d })
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square()
            && self
                .determinant()
                .map(|d| d.abs().is_one())
                .unwrap_or(false)
    }

    /// Inverse of a unimodular matrix, exact.
    pub fn inverse_unimodular(&self) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        // fraction-free Gauss-Jordan on [M | I]; ends with det * M^{-1} on the right
        let n = self.rows;
        if self.is_identity() {
            return Ok(self.clone());
        }
        let w = 2 * n;
        let mut a = IntMatrix::zeros(n, w);
        a.set_block(0, 0, self);
        a.set_block(0, n, &IntMatrix::identity(n));
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a.get(i, k).is_zero()) else {
                return Err(LinalgError::NotUnimodular {
                    det: BigInt::zero(),
                });
            };
            a.swap_rows(p, k);
            let pivot = a.get(k, k).clone();
            for i in (0..n).filter(|&i| i != k) {
                let f = a.get(i, k).clone();
                for j in (0..w).filter(|&j| j != k) {
                    let v = (a.get(i, j) * &pivot - &f * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
                a.set(i, k, BigInt::zero());
            }
            prev = pivot;
        }
        // every diagonal entry is now the determinant, up to the row swaps
        let det = a.get(0, 0).clone();
        if !det.abs().is_one() {
            return Err(LinalgError::NotUnimodular {
                det: self.determinant()?,
            });
        }
        let mut inv = a.submatrix(0, n, n, w);
        if det.is_negative() {
            inv = -&inv;
        }
        Ok(inv)
    }

    /// First `(row, col)` where two same-shaped matrices differ.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize)> {
        if self.rows != other.rows || self.cols != other.cols {
            return Some((0, 0));
        }
        (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |j| (i, j)))
            .find(|&(i, j)| self.get(i, j) != other.get(i, j))
    }

    /// gcd of all entries; zero for the zero matrix.
    pub fn content(&self) -> BigInt {
        crate::arith::gcd_all(&self.data)
    }

    /// Largest absolute value of an entry.
    pub fn max_abs(&self) -> BigInt {
        self.data
            .iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Entrywise reduction into `[0, m)`.
    pub fn mod_floor(&self, m: &BigInt) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.mod_floor(m)).collect(),
        }
    }

    /// Text form: a `rows cols` header line followed by one line per row.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self, LinalgError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(LinalgError::Parse {
            line: 1,
            message: "missing `rows cols` header".into(),
        })?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        let parse_dim = |s: &str| {
            s.parse::<usize>().map_err(|_| LinalgError::Parse {
                line: hline,
                message: format!("bad dimension `{s}`"),
            })
        };
        if dims.len() != 2 {
            return Err(LinalgError::Parse {
                line: hline,
                message: "header must be `rows cols`".into(),
            });
        }
        let (rows, cols) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
        let mut data = Vec::with_capacity(rows * cols);
        let mut seen = 0;
        for (ln, l) in lines {
            if seen == rows {
                return Err(LinalgError::Parse {
                    line: ln,
                    message: "more rows than declared".into(),
                });
            }
            let before = data.len();
            for tok in l.split_whitespace() {
                let v = BigInt::from_str(tok).map_err(|_| LinalgError::Parse {
                    line: ln,
                    message: format!("bad integer `{tok}`"),
                })?;
                data.push(v);
            }
            if data.len() - before != cols {
                return Err(LinalgError::Parse {
                    line: ln,
                    message: format!("expected {cols} entries, found {}", data.len() - before),
                });
            }
            seen += 1;
        }
        if seen != rows {
            return Err(LinalgError::Parse {
                line: text.lines().count().max(1),
                message: format!("expected {rows} rows, found {seen}"),
            });
        }
        Self::new(rows, cols, data)
    }
}

/// Literal helper for code and tests; panics on ragged rows.
pub fn mat<R: AsRef<[i64]>>(rows: &[R]) -> IntMatrix {
    IntMatrix::from_rows(rows).expect("ragged matrix literal")
}

/// Machine-integer vector to big integers.
pub fn ivec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(ToString::to_string).collect();
        let w = cells.iter().map(String::len).max().unwrap_or(1);
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>w$}", cells[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

impl FromStr for IntMatrix {
    type Err = LinalgError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_text(s)
    }
}

// Operator forms panic on shape mismatch; use the `checked_*` methods for untrusted shapes.
impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        self.checked_mul(rhs).expect("matrix shape mismatch")
    }
}

impl Add for &IntMatrix {
    type Output = IntMatrix;
    fn add(self, rhs: &IntMatrix) -> IntMatrix {
        self.checked_add(rhs).expect("matrix shape mismatch")
    }
}

impl Sub for &IntMatrix {
    type Output = IntMatrix;
    fn sub(self, rhs: &IntMatrix) -> IntMatrix {
        self.checked_sub(rhs).expect("matrix shape mismatch")
    }
}

impl Neg for &IntMatrix {
    type Output = IntMatrix;
    fn neg(self) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| -v).collect(),
        }
    }
}
