//! Exact integer and rational linear algebra on lattices.
//!
//! Everything here works over arbitrary-precision integers. A [`LatticeMap`]
//! is an integer matrix whose columns are indexed by the domain and rows by
//! the codomain, so composition is ordinary matrix multiplication.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("m - I is singular; the fixed torsion points form an infinite set")]
    Singular,
    #[error("matrix is not invertible over the integers")]
    NotUnimodular,
    #[error("value does not fit in a machine integer")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, LatticeError>;

/// Integer matrix with `codomain_rank` rows and `domain_rank` columns.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LatticeMap {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl LatticeMap {
    pub fn new(codomain_rank: usize, domain_rank: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != codomain_rank * domain_rank {
            return Err(LatticeError::Dimension(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                codomain_rank,
                domain_rank
            )));
        }
        Ok(LatticeMap { rows: codomain_rank, cols: domain_rank, entries })
    }

    pub fn zero(codomain_rank: usize, domain_rank: usize) -> Self {
        LatticeMap {
            rows: codomain_rank,
            cols: domain_rank,
            entries: vec![BigInt::zero(); codomain_rank * domain_rank],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn scalar(n: usize, k: i64) -> Self {
        let mut m = Self::identity(n);
        m.scale_mut(&BigInt::from(k));
        m
    }

    /// Builds a matrix from rows of machine integers. `cols` is needed when
    /// there are no rows.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LatticeError::Dimension(format!("row of length {} (expected {})", r.len(), cols)));
            }
            entries.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        Ok(LatticeMap { rows: rows.len(), cols, entries })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<i64>], rows: usize) -> Result<Self> {
        let cols = columns.len();
        let mut m = Self::zero(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(LatticeError::Dimension(format!("column of length {} (expected {})", c.len(), rows)));
            }
            for (i, x) in c.iter().enumerate() {
                m.entries[i * cols + j] = BigInt::from(*x);
            }
        }
        Ok(m)
    }

    pub fn from_big_columns(columns: &[Vec<BigInt>], rows: usize) -> Self {
        let cols = columns.len();
        let mut m = Self::zero(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m.entries[i * cols + j] = x.clone();
            }
        }
        m
    }

    pub fn codomain_rank(&self) -> usize {
        self.rows
    }

    pub fn domain_rank(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &LatticeMap) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(LatticeError::Dimension(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Panicking composition for internal use where ranks are known to agree.
    pub fn mul(&self, rhs: &LatticeMap) -> Self {
        self.compose(rhs).expect("rank mismatch in matrix product")
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "vector length does not match domain rank");
        (0..self.rows)
            .map(|i| {
                let mut s = BigInt::zero();
                for (j, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        s += self.get(i, j) * x;
                    }
                }
                s
            })
            .collect()
    }

    pub fn apply_i64(&self, v: &[i64]) -> Vec<i64> {
        let big: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        self.apply(&big).iter().map(|x| x.to_i64().expect("overflow applying lattice map")).collect()
    }

    pub fn add(&self, rhs: &LatticeMap) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(LatticeError::Dimension("sum of differently shaped maps".into()));
        }
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect();
        Ok(LatticeMap { rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, rhs: &LatticeMap) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(LatticeError::Dimension("difference of differently shaped maps".into()));
        }
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect();
        Ok(LatticeMap { rows: self.rows, cols: self.cols, entries })
    }

    pub fn scale_mut(&mut self, k: &BigInt) {
        for e in &mut self.entries {
            *e *= k;
        }
    }

    pub fn scaled(&self, k: i64) -> Self {
        let mut m = self.clone();
        m.scale_mut(&BigInt::from(k));
        m
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    /// Stacks `self` above `below`.
    pub fn vstack(&self, below: &LatticeMap) -> Result<Self> {
        if self.cols != below.cols {
            return Err(LatticeError::Dimension("vstack of maps with different domains".into()));
        }
        let mut entries = self.entries.clone();
        entries.extend(below.entries.iter().cloned());
        Ok(LatticeMap { rows: self.rows + below.rows, cols: self.cols, entries })
    }

    pub fn hstack(&self, right: &LatticeMap) -> Result<Self> {
        Ok(self.transpose().vstack(&right.transpose())?.transpose())
    }

    pub fn block_diagonal(blocks: &[LatticeMap]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zero(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &LatticeMap) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(LatticeError::Dimension("determinant of a non-square map".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| self.row(i)).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * a[n - 1][n - 1].clone())
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.det().map(|d| d.abs().is_one()).unwrap_or(false)
    }

    /// Rank over ℚ.
    pub fn rank(&self) -> usize {
        let snf = smith_normal_form(self);
        snf.invariant_factors().iter().filter(|d| !d.is_zero()).count()
    }

    /// Inverse over ℤ.
    pub fn inverse(&self) -> Result<Self> {
        let inv = self.rational_inverse().ok_or(LatticeError::NotUnimodular)?;
        rational_to_integer(&inv).ok_or(LatticeError::NotUnimodular)
    }

    /// Inverse over ℚ, if it exists.
    pub fn rational_inverse(&self) -> Option<RatMatrix> {
        if !self.is_square() {
            return None;
        }
        RatMatrix::from_lattice(self).inverse()
    }

    pub fn to_i64_rows(&self) -> Result<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_i64().ok_or(LatticeError::Overflow)).collect())
            .collect()
    }

    pub fn to_i64_columns(&self) -> Result<Vec<Vec<i64>>> {
        self.transpose().to_i64_rows()
    }
}

impl fmt::Debug for LatticeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LatticeMap{}x{}{}", self.rows, self.cols, self)
    }
}

impl fmt::Display for LatticeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Dense rational matrix; only used for small solves and inner products.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, entries: vec![BigRational::zero(); rows * cols] }
    }

    pub fn from_lattice(m: &LatticeMap) -> Self {
        RatMatrix {
            rows: m.rows,
            cols: m.cols,
            entries: m.entries.iter().map(|e| BigRational::from_integer(e.clone())).collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn mul(&self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, rhs.rows);
        let mut out = RatMatrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).fold(BigRational::zero(), |s, j| s + self.get(i, j) * &v[j]))
            .collect()
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMatrix::zero(n, n);
        for i in 0..n {
            inv.set(i, i, BigRational::one());
        }
        for c in 0..n {
            let p = (c..n).find(|&r| !a.get(r, c).is_zero())?;
            if p != c {
                for j in 0..n {
                    a.entries.swap(p * n + j, c * n + j);
                    inv.entries.swap(p * n + j, c * n + j);
                }
            }
            let piv = a.get(c, c).clone();
            for j in 0..n {
                let v = a.get(c, j) / &piv;
                a.set(c, j, v);
                let v = inv.get(c, j) / &piv;
                inv.set(c, j, v);
            }
            for r in 0..n {
                if r == c || a.get(r, c).is_zero() {
                    continue;
                }
                let f = a.get(r, c).clone();
                for j in 0..n {
                    let v = a.get(r, j) - &f * a.get(c, j);
                    a.set(r, j, v);
                    let v = inv.get(r, j) - &f * inv.get(c, j);
                    inv.set(r, j, v);
                }
            }
        }
        Some(inv)
    }

    /// Some solution of `self · x = b` over ℚ (free variables set to zero).
    pub fn solve(&self, b: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(b.len(), self.rows);
        let (m, n) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut rhs = b.to_vec();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..n {
            if r == m {
                break;
            }
            let Some(p) = (r..m).find(|&i| !a.get(i, c).is_zero()) else { continue };
            if p != r {
                for j in 0..n {
                    a.entries.swap(p * n + j, r * n + j);
                }
                rhs.swap(p, r);
            }
            let piv = a.get(r, c).clone();
            for j in 0..n {
                let v = a.get(r, j) / &piv;
                a.set(r, j, v);
            }
            rhs[r] = &rhs[r] / &piv;
            for i in 0..m {
                if i == r || a.get(i, c).is_zero() {
                    continue;
                }
                let f = a.get(i, c).clone();
                for j in 0..n {
                    let v = a.get(i, j) - &f * a.get(r, j);
                    a.set(i, j, v);
                }
                rhs[i] = &rhs[i] - &f * &rhs[r];
            }
            pivots.push(c);
            r += 1;
        }
        if rhs[r..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut x = vec![BigRational::zero(); n];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = rhs[i].clone();
        }
        Some(x)
    }
}

pub fn rational_to_integer(m: &RatMatrix) -> Option<LatticeMap> {
    let mut entries = Vec::with_capacity(m.entries.len());
    for e in &m.entries {
        if !e.is_integer() {
            return None;
        }
        entries.push(e.to_integer());
    }
    Some(LatticeMap { rows: m.rows, cols: m.cols, entries })
}

/// Result of [`smith_normal_form`]: `u · m · v = d`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: LatticeMap,
    pub d: LatticeMap,
    pub v: LatticeMap,
}

impl SmithForm {
    /// Diagonal entries of `d` (length `min(rows, cols)`).
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let k = self.d.rows.min(self.d.cols);
        (0..k).map(|i| self.d.get(i, i).clone()).collect()
    }
}

struct Work {
    a: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in self.a.iter_mut() {
            r.swap(i, j);
        }
        for r in self.v.iter_mut() {
            r.swap(i, j);
        }
    }

    /// row_i -= k * row_j
    fn row_axpy(&mut self, i: usize, j: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for c in 0..self.a[0].len() {
            let t = &self.a[j][c] * k;
            self.a[i][c] -= t;
        }
        for c in 0..self.u[0].len() {
            let t = &self.u[j][c] * k;
            self.u[i][c] -= t;
        }
    }

    /// col_i -= k * col_j
    fn col_axpy(&mut self, i: usize, j: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for r in self.a.iter_mut() {
            let t = &r[j] * k;
            r[i] -= t;
        }
        for r in self.v.iter_mut() {
            let t = &r[j] * k;
            r[i] -= t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -x.clone();
        }
        for x in self.u[i].iter_mut() {
            *x = -x.clone();
        }
    }
}

fn to_rows(m: &LatticeMap) -> Vec<Vec<BigInt>> {
    (0..m.rows).map(|i| m.row(i)).collect()
}

fn from_rows_big(rows: Vec<Vec<BigInt>>, cols: usize) -> LatticeMap {
    let r = rows.len();
    LatticeMap { rows: r, cols, entries: rows.into_iter().flatten().collect() }
}

/// Smith normal form: unimodular `u`, `v` and diagonal `d` with
/// `d[i][i] | d[i+1][i+1]`, all nonnegative, such that `u · m · v = d`.
pub fn smith_normal_form(m: &LatticeMap) -> SmithForm {
    let (rows, cols) = (m.rows, m.cols);
    let mut w = Work {
        a: to_rows(m),
        u: to_rows(&LatticeMap::identity(rows)),
        v: to_rows(&LatticeMap::identity(cols)),
    };
    if rows == 0 || cols == 0 {
        return SmithForm {
            u: LatticeMap::identity(rows),
            d: m.clone(),
            v: LatticeMap::identity(cols),
        };
    }
    let k = rows.min(cols);
    for t in 0..k {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !w.a[i][j].is_zero() {
                        let better = match best {
                            None => true,
                            Some((bi, bj)) => w.a[i][j].abs() < w.a[bi][bj].abs(),
                        };
                        if better {
                            best = Some((i, j));
                        }
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(w, rows, cols);
            };
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                if !w.a[i][t].is_zero() {
                    let q = w.a[i][t].div_floor(&w.a[t][t]);
                    w.row_axpy(i, t, &q);
                    if !w.a[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..cols {
                if !w.a[t][j].is_zero() {
                    let q = w.a[t][j].div_floor(&w.a[t][t]);
                    w.col_axpy(j, t, &q);
                    if !w.a[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let piv = w.a[t][t].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&w.a[i][j] % &piv).is_zero()));
            match bad {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    w.row_axpy(t, i, &minus_one);
                }
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
    }
    finish(w, rows, cols)
}

fn finish(w: Work, rows: usize, cols: usize) -> SmithForm {
    SmithForm {
        u: from_rows_big(w.u, rows),
        d: from_rows_big(w.a, cols),
        v: from_rows_big(w.v, cols),
    }
}

/// Row Hermite normal form of the row span of `m`: nonzero rows only, pivots
/// strictly moving right, pivots positive, entries above each pivot reduced
/// into `[0, pivot)`.
pub fn row_hermite_normal_form(m: &LatticeMap) -> LatticeMap {
    let cols = m.cols;
    let mut a = to_rows(m);
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        // Euclid down the column until at most one nonzero entry remains below r
        loop {
            let nz: Vec<usize> = (r..a.len()).filter(|&i| !a[i][c].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by(|&&i, &&j| a[i][c].abs().cmp(&a[j][c].abs())).unwrap();
            a.swap(r, p);
            let mut done = true;
            for i in r + 1..a.len() {
                if !a[i][c].is_zero() {
                    let q = a[i][c].div_floor(&a[r][c]);
                    for j in 0..cols {
                        let t = &a[r][j] * &q;
                        a[i][j] -= t;
                    }
                    if !a[i][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for x in a[r].iter_mut() {
                *x = -x.clone();
            }
        }
        for i in 0..r {
            let q = a[i][c].div_floor(&a[r][c]);
            if !q.is_zero() {
                for j in 0..cols {
                    let t = &a[r][j] * &q;
                    a[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    from_rows_big(a, cols)
}

/// Basis (as columns) of the integer kernel `{x ∈ ℤ^n : m x = 0}`. The
/// returned lattice is saturated.
pub fn integer_kernel(m: &LatticeMap) -> LatticeMap {
    let snf = smith_normal_form(m);
    let rank = snf.invariant_factors().iter().filter(|d| !d.is_zero()).count();
    let n = m.cols;
    let cols: Vec<Vec<BigInt>> = (rank..n).map(|j| snf.v.column(j)).collect();
    LatticeMap::from_big_columns(&cols, n)
}

/// Some integer solution of `a x = b` together with a kernel basis, or `None`
/// when no integer solution exists.
pub fn solve_integer(a: &LatticeMap, b: &[BigInt]) -> Option<(Vec<BigInt>, LatticeMap)> {
    assert_eq!(b.len(), a.rows);
    let snf = smith_normal_form(a);
    let ub = snf.u.apply(b);
    let diag = snf.invariant_factors();
    let n = a.cols;
    let mut y = vec![BigInt::zero(); n];
    for (i, c) in ub.iter().enumerate() {
        let d = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        if d.is_zero() {
            if !c.is_zero() {
                return None;
            }
        } else {
            if !(c % &d).is_zero() {
                return None;
            }
            y[i] = c / &d;
        }
    }
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    let x = snf.v.apply(&y);
    let cols: Vec<Vec<BigInt>> = (rank..n).map(|j| snf.v.column(j)).collect();
    Some((x, LatticeMap::from_big_columns(&cols, n)))
}

/// A sublattice of ℤ^n given by a basis in canonical column Hermite form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sublattice {
    ambient_rank: usize,
    basis: LatticeMap,
}

impl Sublattice {
    /// Sublattice spanned by the columns of `generators` (which may be
    /// dependent).
    pub fn from_generators(generators: &LatticeMap) -> Self {
        let hnf = row_hermite_normal_form(&generators.transpose());
        Sublattice { ambient_rank: generators.rows, basis: hnf.transpose() }
    }

    pub fn zero(ambient_rank: usize) -> Self {
        Sublattice { ambient_rank, basis: LatticeMap::zero(ambient_rank, 0) }
    }

    pub fn full(ambient_rank: usize) -> Self {
        Sublattice { ambient_rank, basis: LatticeMap::identity(ambient_rank) }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.cols
    }

    /// Basis vectors as the columns of an `ambient_rank × rank` map.
    pub fn basis(&self) -> &LatticeMap {
        &self.basis
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        solve_integer(&self.basis, v).is_some()
    }

    /// Smallest saturated sublattice containing `self`.
    pub fn saturation(&self) -> Sublattice {
        if self.rank() == 0 {
            return self.clone();
        }
        let annihilator = integer_kernel(&self.basis.transpose());
        let sat = integer_kernel(&annihilator.transpose());
        Sublattice::from_generators(&sat)
    }

    pub fn is_saturated(&self) -> bool {
        self.saturation() == *self
    }

    /// Index of `self` in its saturation.
    pub fn saturation_index(&self) -> BigInt {
        let snf = smith_normal_form(&self.basis);
        snf.invariant_factors().iter().fold(BigInt::one(), |acc, d| acc * d)
    }
}

/// ℤ^n modulo a saturated sublattice, with an explicit projection onto a free
/// lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientLattice {
    pub ambient_rank: usize,
    pub relations: Sublattice,
    pub projection: LatticeMap,
    /// Rank of the relation span before saturation.
    pub unsaturated_rank: usize,
}

impl QuotientLattice {
    pub fn rank(&self) -> usize {
        self.projection.rows
    }
}

fn check_generators(generators: &[LatticeMap]) -> Result<usize> {
    let Some(first) = generators.first() else {
        return Err(LatticeError::Dimension("no generators given; the ambient rank is unknown".into()));
    };
    let n = first.rows;
    for g in generators {
        if g.rows != n || g.cols != n {
            return Err(LatticeError::Dimension(format!(
                "generator is {}x{}, expected {}x{}",
                g.rows, g.cols, n, n
            )));
        }
    }
    Ok(n)
}

/// All vectors fixed by every generator, as a saturated sublattice.
pub fn fixed_sublattice(generators: &[LatticeMap]) -> Result<Sublattice> {
    let n = check_generators(generators)?;
    let id = LatticeMap::identity(n);
    let mut stacked = LatticeMap::zero(0, n);
    for g in generators {
        stacked = stacked.vstack(&g.sub(&id)?)?;
    }
    Ok(Sublattice::from_generators(&integer_kernel(&stacked)))
}

/// Coinvariants modulo torsion: ℤ^n divided by the saturation of the span of
/// all `g(x) − x`. The projection rows form the canonical basis of the
/// annihilator of the relations.
pub fn coinvariant_quotient(generators: &[LatticeMap]) -> Result<QuotientLattice> {
    let n = check_generators(generators)?;
    let id = LatticeMap::identity(n);
    let mut span = LatticeMap::zero(n, 0);
    for g in generators {
        span = span.hstack(&g.sub(&id)?)?;
    }
    let raw = Sublattice::from_generators(&span);
    let unsaturated_rank = raw.rank();
    let annihilator = Sublattice::from_generators(&integer_kernel(&span.transpose()));
    let projection = annihilator.basis().transpose();
    let relations = Sublattice::from_generators(&integer_kernel(&projection));
    Ok(QuotientLattice { ambient_rank: n, relations, projection, unsaturated_rank })
}

/// An element of (ℚ/ℤ)^n in lowest terms: numerators in `[0, denominator)`
/// and `gcd(numerators, denominator) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionVector {
    denominator: BigInt,
    numerators: Vec<BigInt>,
}

impl TorsionVector {
    pub fn new(numerators: Vec<BigInt>, denominator: BigInt) -> Self {
        assert!(denominator.is_positive(), "denominator must be positive");
        let mut nums: Vec<BigInt> = numerators.into_iter().map(|x| x.mod_floor(&denominator)).collect();
        let g = nums.iter().fold(denominator.clone(), |g, x| g.gcd(x));
        let den = &denominator / &g;
        for x in nums.iter_mut() {
            *x = &*x / &g;
        }
        TorsionVector { denominator: den, numerators: nums }
    }

    pub fn from_i64(numerators: &[i64], denominator: i64) -> Self {
        Self::new(numerators.iter().map(|&x| BigInt::from(x)).collect(), BigInt::from(denominator))
    }

    pub fn zero(rank: usize) -> Self {
        TorsionVector { denominator: BigInt::one(), numerators: vec![BigInt::zero(); rank] }
    }

    /// Reduction of a rational vector modulo ℤ^n.
    pub fn from_rationals(v: &[BigRational]) -> Self {
        let den = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let nums = v.iter().map(|x| x.numer() * (&den / x.denom())).collect();
        Self::new(nums, den)
    }

    pub fn rank(&self) -> usize {
        self.numerators.len()
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.numerators
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.denominator.is_one()
    }

    pub fn to_rationals(&self) -> Vec<BigRational> {
        self.numerators
            .iter()
            .map(|n| BigRational::new(n.clone(), self.denominator.clone()))
            .collect()
    }

    pub fn apply(&self, m: &LatticeMap) -> TorsionVector {
        TorsionVector::new(m.apply(&self.numerators), self.denominator.clone())
    }

    pub fn add(&self, other: &TorsionVector) -> TorsionVector {
        assert_eq!(self.rank(), other.rank());
        let den = self.denominator.lcm(&other.denominator);
        let a = &den / &self.denominator;
        let b = &den / &other.denominator;
        let nums = self
            .numerators
            .iter()
            .zip(&other.numerators)
            .map(|(x, y)| x * &a + y * &b)
            .collect();
        TorsionVector::new(nums, den)
    }

    pub fn neg(&self) -> TorsionVector {
        TorsionVector::new(self.numerators.iter().map(|x| -x).collect(), self.denominator.clone())
    }

    pub fn scale(&self, k: i64) -> TorsionVector {
        let k = BigInt::from(k);
        TorsionVector::new(self.numerators.iter().map(|x| x * &k).collect(), self.denominator.clone())
    }

    /// `⟨v, self⟩` in ℚ/ℤ for an integer vector `v`.
    pub fn pair(&self, v: &[i64]) -> Phase {
        assert_eq!(v.len(), self.rank());
        let s: BigInt = v.iter().zip(&self.numerators).map(|(a, x)| BigInt::from(*a) * x).sum();
        Phase::new(BigRational::new(s, self.denominator.clone()))
    }
}

impl fmt::Display for TorsionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, n) in self.numerators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if n.is_zero() {
                write!(f, "0")?;
            } else {
                write!(f, "{}/{}", n, self.denominator)?;
            }
        }
        write!(f, ")")
    }
}

/// An element of ℚ/ℤ, stored in `[0, 1)`. Used as the exponent of a formal
/// root of unity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(BigRational);

impl Phase {
    pub fn new(x: BigRational) -> Self {
        let f = x.floor();
        Phase(x - f)
    }

    pub fn zero() -> Self {
        Phase(BigRational::zero())
    }

    pub fn half() -> Self {
        Phase(BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Phase::new(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn add(&self, other: &Phase) -> Phase {
        Phase::new(&self.0 + &other.0)
    }

    pub fn neg(&self) -> Phase {
        Phase::new(-&self.0)
    }

    pub fn times(&self, k: i64) -> Phase {
        Phase::new(&self.0 * BigRational::from_integer(BigInt::from(k)))
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// All `x ∈ (ℚ/ℤ)^n` with `m x ≡ x (mod ℤ^n)`; there are exactly
/// `|det(m − I)|` of them.
pub fn solve_torsion_fixed(m: &LatticeMap) -> Result<Vec<TorsionVector>> {
    if !m.is_square() {
        return Err(LatticeError::Dimension("torsion fixed points of a non-square map".into()));
    }
    let n = m.rows;
    let a = m.sub(&LatticeMap::identity(n))?;
    let snf = smith_normal_form(&a);
    let diag = snf.invariant_factors();
    if diag.iter().any(|d| d.is_zero()) {
        return Err(LatticeError::Singular);
    }
    // x = v·y with y_i ∈ (1/d_i)ℤ / ℤ
    let den = diag.iter().fold(BigInt::one(), |l, d| l.lcm(d));
    let steps: Vec<BigInt> = diag.iter().map(|d| &den / d).collect();
    let sizes: Vec<usize> = diag
        .iter()
        .map(|d| d.to_usize().ok_or(LatticeError::Overflow))
        .collect::<Result<_>>()?;
    let total: usize = sizes.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    for _ in 0..total {
        let y: Vec<BigInt> = idx.iter().zip(&steps).map(|(&k, s)| BigInt::from(k) * s).collect();
        out.push(TorsionVector::new(snf.v.apply(&y), den.clone()));
        for i in 0..n {
            idx[i] += 1;
            if idx[i] < sizes[i] {
                break;
            }
            idx[i] = 0;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> LatticeMap {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        LatticeMap::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), cols).unwrap()
    }

    fn check_snf(a: &LatticeMap) -> SmithForm {
        let s = smith_normal_form(a);
        assert!(s.u.is_unimodular());
        assert!(s.v.is_unimodular());
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        for i in 0..s.d.codomain_rank() {
            for j in 0..s.d.domain_rank() {
                if i != j {
                    assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        let f = s.invariant_factors();
        for w in f.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!((&w[1] % &w[0]).is_zero());
            }
        }
        s
    }

    #[test]
    fn snf_identity() {
        let s = check_snf(&LatticeMap::identity(2));
        assert_eq!(s.d, LatticeMap::identity(2));
    }

    #[test]
    fn snf_diag_2_3() {
        let s = check_snf(&m(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.invariant_factors(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn snf_zero() {
        let s = check_snf(&LatticeMap::zero(2, 2));
        assert!(s.d.is_zero());
    }

    #[test]
    fn snf_rectangular() {
        check_snf(&m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]));
        check_snf(&m(&[&[3, 1, 4, 1], &[5, 9, 2, 6]]));
        check_snf(&m(&[&[0, 0], &[0, 7], &[0, 14]]));
    }

    #[test]
    fn determinant() {
        assert_eq!(m(&[&[2, 1], &[1, 1]]).det().unwrap(), BigInt::from(1));
        assert_eq!(m(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 5]]).det().unwrap(), BigInt::from(-5));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).det().unwrap(), BigInt::from(0));
    }

    #[test]
    fn fixed_sublattice_examples() {
        let id = fixed_sublattice(&[LatticeMap::identity(2)]).unwrap();
        assert_eq!(id, Sublattice::full(2));
        let swap = fixed_sublattice(&[m(&[&[0, 1], &[1, 0]])]).unwrap();
        assert_eq!(swap.basis(), &m(&[&[1], &[1]]));
        let neg = fixed_sublattice(&[LatticeMap::scalar(2, -1)]).unwrap();
        assert_eq!(neg.rank(), 0);
        assert!(fixed_sublattice(&[LatticeMap::identity(2), LatticeMap::identity(3)]).is_err());
    }

    #[test]
    fn coinvariant_examples() {
        let q = coinvariant_quotient(&[LatticeMap::identity(2)]).unwrap();
        assert_eq!(q.rank(), 2);
        let q = coinvariant_quotient(&[m(&[&[0, 1], &[1, 0]])]).unwrap();
        assert_eq!(q.rank(), 1);
        // (x, y) ↦ x + y up to sign
        let p = q.projection.to_i64_rows().unwrap();
        assert!(p == vec![vec![1, 1]] || p == vec![vec![-1, -1]]);
        let q = coinvariant_quotient(&[LatticeMap::scalar(2, -1)]).unwrap();
        assert_eq!(q.rank(), 0);
        // relations of the negation are 2ℤ^2 before saturation
        assert_eq!(q.unsaturated_rank, 2);
        assert_eq!(q.relations, Sublattice::full(2));
    }

    #[test]
    fn hnf_is_canonical() {
        let a = Sublattice::from_generators(&m(&[&[2, 4], &[0, 6]]));
        let b = Sublattice::from_generators(&m(&[&[2, 6, 8], &[0, 6, 6]]));
        assert_eq!(a, b);
        assert_eq!(a.saturation(), Sublattice::full(2));
        assert_eq!(a.saturation_index(), BigInt::from(12));
    }

    #[test]
    fn torsion_canonical_form() {
        let a = TorsionVector::from_i64(&[2, 4], 8);
        let b = TorsionVector::from_i64(&[-3, 2], 4);
        assert_eq!(a, b);
        assert_eq!(a.denominator(), &BigInt::from(4));
        assert!(TorsionVector::from_i64(&[3, 6], 3).is_zero());
    }

    #[test]
    fn torsion_fixed_examples() {
        // x ≡ 2x: only 0
        let s = solve_torsion_fixed(&LatticeMap::scalar(1, 2)).unwrap();
        assert_eq!(s, vec![TorsionVector::zero(1)]);
        // x ≡ 3x: 2x ∈ ℤ
        let mut s = solve_torsion_fixed(&LatticeMap::scalar(1, 3)).unwrap();
        s.sort();
        assert_eq!(s, vec![TorsionVector::zero(1), TorsionVector::from_i64(&[1], 2)]);
        // x ↦ 2·swap(x)
        let s = solve_torsion_fixed(&m(&[&[0, 2], &[2, 0]])).unwrap();
        assert_eq!(s.len(), 3);
        assert!(solve_torsion_fixed(&LatticeMap::identity(2)).is_err());
    }

    #[test]
    fn integer_solve() {
        let a = m(&[&[2, 0], &[0, 3]]);
        assert!(solve_integer(&a, &[BigInt::from(1), BigInt::from(0)]).is_none());
        let (x, k) = solve_integer(&a, &[BigInt::from(4), BigInt::from(9)]).unwrap();
        assert_eq!(x, vec![BigInt::from(2), BigInt::from(3)]);
        assert_eq!(k.domain_rank(), 0);
    }
}
