//! Small dense matrices over exact rings: symbolic (`Poly`) and rational (`Q`).

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::polyring::{MonomialOrder, Poly, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}x{1} times {2}x{3}")]
    Dimension(usize, usize, usize, usize),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("determinant only supported up to 4x4, got {0}x{0}")]
    TooLarge(usize),
    #[error("matrix is singular")]
    Singular,
    #[error("invalid permutation spec: {0}")]
    InvalidSpec(String),
    #[error("entry count {0} does not match {1}x{2}")]
    Shape(usize, usize, usize),
}

/// The exact commutative rings matrices are built over.
pub trait Ring: Clone + PartialEq + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn lift_q(&self, q: Q) -> Self;
}

impl Ring for Q {
    fn zero_like(&self) -> Q {
        Q::zero()
    }
    fn one_like(&self) -> Q {
        Q::one()
    }
    fn is_zero(&self) -> bool {
        Q::is_zero(self)
    }
    fn add(&self, o: &Q) -> Q {
        self + o
    }
    fn sub(&self, o: &Q) -> Q {
        self - o
    }
    fn mul(&self, o: &Q) -> Q {
        self * o
    }
    fn neg(&self) -> Q {
        -self
    }
    fn lift_q(&self, q: Q) -> Q {
        q
    }
}

impl Ring for Poly {
    fn zero_like(&self) -> Poly {
        Poly::zero_in(self.order())
    }
    fn one_like(&self) -> Poly {
        Poly::constant_in(self.order(), Q::one())
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn add(&self, o: &Poly) -> Poly {
        self + o
    }
    fn sub(&self, o: &Poly) -> Poly {
        self - o
    }
    fn mul(&self, o: &Poly) -> Poly {
        self * o
    }
    fn neg(&self) -> Poly {
        -self
    }
    fn lift_q(&self, q: Q) -> Poly {
        Poly::constant_in(self.order(), q)
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

pub type SymMatrix = Matrix<Poly>;
pub type RatMatrix = Matrix<Q>;

impl<T: Ring> Matrix<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<T>) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(MatrixError::Shape(entries.len(), rows, cols));
        }
        Ok(Matrix { rows, cols, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> T) -> Self {
        let mut f = f;
        let entries = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Matrix { rows, cols, entries }
    }

    /// Identity of size n with entries built from `unit`'s ring.
    pub fn identity_like(n: usize, unit: &T) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { unit.one_like() } else { unit.zero_like() })
    }

    /// 0/1 matrix lifted into the ring of `unit`.
    pub fn from_01(m: &Matrix<i64>, unit: &T) -> Self {
        Self::from_fn(m.rows, m.cols, |i, j| unit.lift_q(Q::from_i64(m.entries[i * m.cols + j])))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    /// 0-based access.
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    /// Block matrix from a row-major grid of blocks with consistent sizes.
    pub fn from_blocks(grid: &[Vec<&Matrix<T>>]) -> Result<Self, MatrixError> {
        let heights: Vec<usize> = grid.iter().map(|r| r[0].rows).collect();
        let widths: Vec<usize> = grid[0].iter().map(|b| b.cols).collect();
        for (bi, row) in grid.iter().enumerate() {
            if row.len() != widths.len() {
                return Err(MatrixError::Shape(row.len(), grid.len(), widths.len()));
            }
            for (bj, b) in row.iter().enumerate() {
                if b.rows != heights[bi] || b.cols != widths[bj] {
                    return Err(MatrixError::Dimension(b.rows, b.cols, heights[bi], widths[bj]));
                }
            }
        }
        let (rows, cols) = (heights.iter().sum(), widths.iter().sum());
        let mut entries = Vec::with_capacity(rows * cols);
        for (bi, row) in grid.iter().enumerate() {
            for r in 0..heights[bi] {
                for b in row {
                    entries.extend_from_slice(&b.entries[r * b.cols..(r + 1) * b.cols]);
                }
            }
        }
        Ok(Matrix { rows, cols, entries })
    }

    /// Block lower-triangular `[[a, 0], [b, c]]` from 2x2 blocks.
    pub fn lower_block(a: &Self, b: &Self, c: &Self) -> Self {
        let z = Self::from_fn(a.rows, c.cols, |_, _| a.entries[0].zero_like());
        Self::from_blocks(&[vec![a, &z], vec![b, c]]).expect("consistent block sizes")
    }

    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let z = a.entries[0].zero_like();
        let tr = Self::from_fn(a.rows, b.cols, |_, _| z.clone());
        let bl = Self::from_fn(b.rows, a.cols, |_, _| z.clone());
        Self::from_blocks(&[vec![a, &tr], vec![&bl, b]]).expect("consistent block sizes")
    }

    /// Sub-block starting at (r0, c0).
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn mul(&self, o: &Self) -> Result<Self, MatrixError> {
        if self.cols != o.rows {
            return Err(MatrixError::Dimension(self.rows, self.cols, o.rows, o.cols));
        }
        let cell = |k: usize| {
            let (i, j) = (k / o.cols, k % o.cols);
            let mut acc = self.get(i, 0).zero_like();
            for l in 0..self.cols {
                let (a, b) = (self.get(i, l), o.get(l, j));
                if !a.is_zero() && !b.is_zero() {
                    acc = acc.add(&a.mul(b));
                }
            }
            acc
        };
        let entries = (0..self.rows * o.cols).into_par_iter().map(cell).collect();
        Ok(Matrix { rows: self.rows, cols: o.cols, entries })
    }

    /// Determinant by cofactor expansion; 4x4 uses the Laplace expansion along
    /// the first two rows so the six products can run in parallel.
    pub fn det(&self) -> Result<T, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        match self.rows {
            1 => Ok(self.entries[0].clone()),
            2 => Ok(det2(self.get(0, 0), self.get(0, 1), self.get(1, 0), self.get(1, 1))),
            3 => {
                let mut acc = self.get(0, 0).zero_like();
                for j in 0..3 {
                    let (a, b) = ((j + 1) % 3, (j + 2) % 3);
                    let (a, b) = (a.min(b), a.max(b));
                    let minor = det2(self.get(1, a), self.get(1, b), self.get(2, a), self.get(2, b));
                    let term = self.get(0, j).mul(&minor);
                    acc = if j == 1 { acc.sub(&term) } else { acc.add(&term) };
                }
                Ok(acc)
            }
            4 => {
                const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
                let terms: Vec<T> = PAIRS
                    .par_iter()
                    .map(|&(a, b)| {
                        let (c, d) = complement(a, b);
                        let top = det2(self.get(0, a), self.get(0, b), self.get(1, a), self.get(1, b));
                        let bot = det2(self.get(2, c), self.get(2, d), self.get(3, c), self.get(3, d));
                        let t = top.mul(&bot);
                        // sign of the column permutation (a, b, c, d)
                        if (a + b + 1) % 2 == 0 { t } else { t.neg() }
                    })
                    .collect();
                let mut acc = self.get(0, 0).zero_like();
                for t in &terms {
                    acc = acc.add(t);
                }
                Ok(acc)
            }
            n => Err(MatrixError::TooLarge(n)),
        }
    }
}

fn det2<T: Ring>(a: &T, b: &T, c: &T, d: &T) -> T {
    a.mul(d).sub(&b.mul(c))
}

fn complement(a: usize, b: usize) -> (usize, usize) {
    let mut rest = (0..4).filter(|&k| k != a && k != b);
    (rest.next().unwrap(), rest.next().unwrap())
}

impl SymMatrix {
    pub fn identity(n: usize) -> Self {
        Self::identity_like(n, &Poly::one())
    }

    pub fn identity_in(n: usize, order: &Arc<MonomialOrder>) -> Self {
        Self::identity_like(n, &Poly::constant_in(order, Q::one()))
    }

    /// The generic matrix Y = (X_ij).
    pub fn main_variables() -> Self {
        Self::from_fn(4, 4, |i, j| Poly::x(i + 1, j + 1))
    }

    /// Matrix of named symbols, e.g. `symbols("c", 2)` gives (c_ij).
    pub fn symbols(prefix: &str, n: usize) -> Self {
        Self::from_fn(n, n, |i, j| Poly::sym(&format!("{prefix}{}{}", i + 1, j + 1)))
    }

    pub fn evaluate(&self, values: &std::collections::HashMap<usize, Q>) -> Result<RatMatrix, crate::polyring::PolyError> {
        let entries = self.entries.iter().map(|p| p.evaluate(values)).collect::<Result<Vec<_>, _>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, entries })
    }
}

impl RatMatrix {
    pub fn identity(n: usize) -> Self {
        Self::identity_like(n, &Q::one())
    }

    pub fn from_i64(rows: usize, cols: usize, v: &[i64]) -> Result<Self, MatrixError> {
        Self::new(rows, cols, v.iter().map(|&x| Q::from_i64(x)).collect())
    }

    pub fn diag(v: &[Q]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| if i == j { v[i].clone() } else { Q::zero() })
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Self, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let piv = (col..n).find(|&r| !a.get(r, col).is_zero()).ok_or(MatrixError::Singular)?;
            if piv != col {
                for j in 0..n {
                    a.entries.swap(piv * n + j, col * n + j);
                    inv.entries.swap(piv * n + j, col * n + j);
                }
            }
            let s = a.get(col, col).inv();
            for j in 0..n {
                let v = a.get(col, j) * &s;
                a.set(col, j, v);
                let v = inv.get(col, j) * &s;
                inv.set(col, j, v);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    let v = a.get(r, j) - &(&f * a.get(col, j));
                    a.set(r, j, v);
                    let v = inv.get(r, j) - &(&f * inv.get(col, j));
                    inv.set(r, j, v);
                }
            }
        }
        Ok(inv)
    }
}

impl<T: Ring + fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Permutation matrices used to interleave split period matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PermSpec {
    /// The 4x4 matrix swapping coordinates 2 and 3.
    J23_4,
    /// Change of basis from `{w_j, w'_j, eta_j, eta'_j}` to
    /// `{w_j, eta_j, w'_j, eta'_j}` for a product of dimensions `h` and
    /// `g - h`. Only the equal-dimension case is an involution.
    BlockSwap { h: usize, g: usize },
}

/// The permutation as a 0/1 integer matrix of size `2g`.
pub fn permutation_matrix(spec: PermSpec) -> Result<Matrix<i64>, MatrixError> {
    let (h, g) = match spec {
        PermSpec::J23_4 => (1, 2),
        PermSpec::BlockSwap { h, g } => (h, g),
    };
    if h == 0 || g != 2 * h {
        return Err(MatrixError::InvalidSpec(format!("J({h},{g}) needs g = 2h >= 2")));
    }
    let hp = g - h;
    // source position of each basis vector, listed in target order
    let mut src = Vec::with_capacity(2 * g);
    src.extend(0..h);
    src.extend(h + hp..2 * h + hp);
    src.extend(h..h + hp);
    src.extend(2 * h + hp..2 * g);
    let n = 2 * g;
    let mut e = vec![0i64; n * n];
    for (t, &s) in src.iter().enumerate() {
        e[t * n + s] = 1;
    }
    Ok(Matrix { rows: n, cols: n, entries: e })
}

impl Ring for i64 {
    fn zero_like(&self) -> i64 {
        0
    }
    fn one_like(&self) -> i64 {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add(&self, o: &i64) -> i64 {
        self + o
    }
    fn sub(&self, o: &i64) -> i64 {
        self - o
    }
    fn mul(&self, o: &i64) -> i64 {
        self * o
    }
    fn neg(&self) -> i64 {
        -self
    }
    fn lift_q(&self, q: Q) -> i64 {
        assert!(q.is_integer(), "non-integer entry");
        i64::try_from(q.numer()).expect("entry fits in i64")
    }
}

/// Symbolic convenience wrapper around [`Matrix::mul`].
pub fn mat_mul(a: &SymMatrix, b: &SymMatrix) -> Result<SymMatrix, MatrixError> {
    a.mul(b)
}

pub fn mat_det(a: &SymMatrix) -> Result<Poly, MatrixError> {
    a.det()
}

pub fn mat_inverse_rational(a: &RatMatrix) -> Result<RatMatrix, MatrixError> {
    a.inverse()
}
