//! Small dense exact-rational matrices and integer lattices.
//!
//! Dimensions here are tiny (a Bieberbach presentation in dimension 17 is the
//! largest thing the crate meets), so the implementations are the plain
//! textbook ones: Gaussian elimination over `BigRational`, Hermite normal form
//! over `BigInt`. No pivoting heuristics, no sparsity.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::Rational;
use crate::error::{Error, Result};

pub type Vector = Vec<Rational>;

/// Dense rational matrix, row major.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Matrix {
    pub rows: Vec<Vec<Rational>>,
}

impl Matrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Self {
        let width = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == width), "ragged matrix");
        Matrix { rows }
    }

    pub fn identity(n: usize) -> Self {
        let mut rows = vec![vec![BigRational::zero(); n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = BigRational::one();
        }
        Matrix { rows }
    }

    pub fn from_diagonal(diag: &[Rational]) -> Self {
        let n = diag.len();
        let mut m = Matrix::identity(n);
        for i in 0..n {
            m.rows[i][i] = diag[i].clone();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn transpose(&self) -> Matrix {
        let (m, n) = (self.nrows(), self.ncols());
        let mut rows = vec![vec![BigRational::zero(); m]; n];
        for i in 0..m {
            for j in 0..n {
                rows[j][i] = self.rows[i][j].clone();
            }
        }
        Matrix { rows }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.ncols(), other.nrows(), "dimension mismatch");
        let (m, k, n) = (self.nrows(), self.ncols(), other.ncols());
        let mut rows = vec![vec![BigRational::zero(); n]; m];
        for i in 0..m {
            for j in 0..n {
                let mut acc = BigRational::zero();
                for l in 0..k {
                    if !self.rows[i][l].is_zero() && !other.rows[l][j].is_zero() {
                        acc += &self.rows[i][l] * &other.rows[l][j];
                    }
                }
                rows[i][j] = acc;
            }
        }
        Matrix { rows }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vector {
        assert_eq!(self.ncols(), v.len(), "dimension mismatch");
        self.rows
            .iter()
            .map(|row| {
                let mut acc = BigRational::zero();
                for (a, x) in row.iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.rows[i][j] != self.rows[j][i] {
                    return false;
                }
            }
        }
        true
    }

    /// Determinant by fraction-free-ish Gaussian elimination over Q.
    pub fn det(&self) -> Rational {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.nrows();
        let mut a = self.rows.clone();
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return BigRational::zero();
            };
            if piv != col {
                a.swap(piv, col);
                det = -det;
            }
            det *= &a[col][col];
            let inv = a[col][col].recip();
            for r in (col + 1)..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = &a[r][col] * &inv;
                for c in col..n {
                    let delta = &f * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan; errors on singular input.
    pub fn inverse(&self) -> Result<Matrix> {
        assert!(self.is_square(), "inverse of non-square matrix");
        let n = self.nrows();
        let mut a = self.rows.clone();
        let mut b = Matrix::identity(n).rows;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Err(Error::DegenerateForm);
            };
            a.swap(piv, col);
            b.swap(piv, col);
            let inv = a[col][col].recip();
            for c in 0..n {
                a[col][c] = &a[col][c] * &inv;
                b[col][c] = &b[col][c] * &inv;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for c in 0..n {
                    let da = &f * &a[col][c];
                    a[r][c] -= da;
                    let db = &f * &b[col][c];
                    b[r][c] -= db;
                }
            }
        }
        Ok(Matrix { rows: b })
    }

    /// True when every entry is 0 off the diagonal and ±1 on it.
    pub fn is_sign_diagonal(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.nrows();
        for i in 0..n {
            for j in 0..n {
                let e = &self.rows[i][j];
                if i == j {
                    if e.abs() != BigRational::one() {
                        return false;
                    }
                } else if !e.is_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Matrix::identity(self.nrows())
    }
}

pub fn vec_add(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_is_zero(a: &[Rational]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn zero_vec(n: usize) -> Vector {
    vec![BigRational::zero(); n]
}

/// One solution of `m * y = rhs` over the rationals (free variables set to
/// zero), or None when inconsistent.
pub fn solve_linear(m: &Matrix, rhs: &[Rational]) -> Option<Vector> {
    let (nrows, ncols) = (m.nrows(), m.ncols());
    assert_eq!(nrows, rhs.len());
    let mut a = m.rows.clone();
    let mut b = rhs.to_vec();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0usize;
    for col in 0..ncols {
        let Some(p) = (row..nrows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(p, row);
        b.swap(p, row);
        let inv = a[row][col].recip();
        for c in 0..ncols {
            a[row][c] = &a[row][c] * &inv;
        }
        b[row] = &b[row] * &inv;
        for r in 0..nrows {
            if r == row || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..ncols {
                let d = &f * &a[row][c];
                a[r][c] -= d;
            }
            let d = &f * &b[row];
            b[r] -= d;
        }
        pivots.push((row, col));
        row += 1;
        if row == nrows {
            break;
        }
    }
    for r in row..nrows {
        if !b[r].is_zero() {
            return None;
        }
    }
    let mut y = zero_vec(ncols);
    for (r, c) in pivots {
        y[c] = b[r].clone();
    }
    Some(y)
}

// ---------------------------------------------------------------------------
// Integer lattices
// ---------------------------------------------------------------------------

/// Row-style Hermite normal form: echelon rows, positive pivots, entries above
/// a pivot reduced into [0, pivot). Zero rows are dropped.
fn hnf_rows(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut r = 0usize;
    for c in 0..ncols {
        // gcd-eliminate column c below row r
        loop {
            let mut best: Option<usize> = None;
            for i in r..rows.len() {
                if !rows[i][c].is_zero()
                    && best.is_none_or(|b| rows[i][c].abs() < rows[b][c].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            rows.swap(r, b);
            let mut others = false;
            for i in (r + 1)..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                for k in 0..ncols {
                    let d = &q * &rows[r][k];
                    rows[i][k] -= d;
                }
                others |= !rows[i][c].is_zero();
            }
            if !others {
                break;
            }
        }
        if r < rows.len() && !rows[r][c].is_zero() {
            if rows[r][c].is_negative() {
                for k in 0..ncols {
                    rows[r][k] = -rows[r][k].clone();
                }
            }
            for i in 0..r {
                let q = rows[i][c].div_floor(&rows[r][c]);
                if !q.is_zero() {
                    for k in 0..ncols {
                        let d = &q * &rows[r][k];
                        rows[i][k] -= d;
                    }
                }
            }
            r += 1;
        }
    }
    rows.truncate(r);
    rows
}

/// A finitely generated subgroup of Q^n, stored as `(1/den) * Z`-span of
/// integer rows in Hermite normal form. The representation is canonical, so
/// equality of lattices is structural equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    dim: usize,
    den: BigInt,
    rows: Vec<Vec<BigInt>>,
}

impl Lattice {
    pub fn empty(dim: usize) -> Self {
        Lattice {
            dim,
            den: BigInt::one(),
            rows: Vec::new(),
        }
    }

    pub fn standard(dim: usize) -> Self {
        let mut l = Lattice::empty(dim);
        for i in 0..dim {
            let mut v = zero_vec(dim);
            v[i] = BigRational::one();
            l.insert(&v);
        }
        l
    }

    pub fn from_rows(rows: &[Vector]) -> Self {
        let dim = rows.first().map_or(0, |r| r.len());
        let mut l = Lattice::empty(dim);
        for r in rows {
            l.insert(r);
        }
        l
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim
    }

    pub fn basis(&self) -> Vec<Vector> {
        let den = BigRational::from_integer(self.den.clone());
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| BigRational::from_integer(x.clone()) / &den)
                    .collect()
            })
            .collect()
    }

    fn renormalize(&mut self) {
        self.rows = hnf_rows(std::mem::take(&mut self.rows));
        let mut g = self.den.clone();
        for row in &self.rows {
            for x in row {
                g = g.gcd(x);
            }
        }
        if !g.is_one() && !g.is_zero() {
            self.den = &self.den / &g;
            for row in &mut self.rows {
                for x in row.iter_mut() {
                    *x = &*x / &g;
                }
            }
        }
    }

    /// Add a vector to the lattice. Returns true if the lattice grew.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        if self.contains(v) {
            return false;
        }
        let mut d = self.den.clone();
        for x in v {
            d = d.lcm(x.denom());
        }
        if d != self.den {
            let f = &d / &self.den;
            for row in &mut self.rows {
                for x in row.iter_mut() {
                    *x = &*x * &f;
                }
            }
            self.den = d;
        }
        let scaled: Vec<BigInt> = v
            .iter()
            .map(|x| {
                let s = x * BigRational::from_integer(self.den.clone());
                debug_assert!(s.is_integer());
                s.to_integer()
            })
            .collect();
        self.rows.push(scaled);
        self.renormalize();
        true
    }

    /// Membership test.
    pub fn contains(&self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        // den * v must be integral
        let mut w: Vec<BigInt> = Vec::with_capacity(self.dim);
        for x in v {
            let s = x * BigRational::from_integer(self.den.clone());
            if !s.is_integer() {
                return false;
            }
            w.push(s.to_integer());
        }
        for row in &self.rows {
            let c = pivot_col(row);
            if w[c].is_zero() {
                continue;
            }
            let (q, r) = w[c].div_rem(&row[c]);
            if !r.is_zero() {
                return false;
            }
            for k in 0..self.dim {
                let d = &q * &row[k];
                w[k] -= d;
            }
        }
        w.iter().all(|x| x.is_zero())
    }

    /// Canonical representative of `v + L` in the half-open fundamental box of
    /// the HNF basis. Coordinates outside pivot columns are untouched.
    pub fn reduce(&self, v: &[Rational]) -> Vector {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        let mut d = self.den.clone();
        for x in v {
            d = d.lcm(x.denom());
        }
        let f = &d / &self.den;
        let mut w: Vec<BigInt> = v
            .iter()
            .map(|x| (x * BigRational::from_integer(d.clone())).to_integer())
            .collect();
        for row in &self.rows {
            let c = pivot_col(row);
            let pivot = &row[c] * &f;
            let q = w[c].div_floor(&pivot);
            if q.is_zero() {
                continue;
            }
            for k in 0..self.dim {
                let delta = &q * &row[k] * &f;
                w[k] -= delta;
            }
        }
        w.into_iter()
            .map(|x| BigRational::new(x, d.clone()))
            .collect()
    }
}

fn pivot_col(row: &[BigInt]) -> usize {
    row.iter()
        .position(|x| !x.is_zero())
        .expect("no zero rows in HNF")
}

// ---------------------------------------------------------------------------
// Integer linear systems
// ---------------------------------------------------------------------------

/// Row HNF with a unimodular transform: returns (H, T) with H = T * A.
fn hnf_with_transform(a: Vec<Vec<BigInt>>) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let m = a.len();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut rows = a;
    let mut t: Vec<Vec<BigInt>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut r = 0usize;
    for c in 0..ncols {
        loop {
            let mut best: Option<usize> = None;
            for i in r..m {
                if !rows[i][c].is_zero()
                    && best.is_none_or(|b| rows[i][c].abs() < rows[b][c].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            rows.swap(r, b);
            t.swap(r, b);
            let mut others = false;
            for i in (r + 1)..m {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                for k in 0..ncols {
                    let d = &q * &rows[r][k];
                    rows[i][k] -= d;
                }
                for k in 0..m {
                    let d = &q * &t[r][k];
                    t[i][k] -= d;
                }
                others |= !rows[i][c].is_zero();
            }
            if !others {
                break;
            }
        }
        if r < m && !rows[r][c].is_zero() {
            if rows[r][c].is_negative() {
                for k in 0..ncols {
                    rows[r][k] = -rows[r][k].clone();
                }
                for k in 0..m {
                    t[r][k] = -t[r][k].clone();
                }
            }
            r += 1;
        }
    }
    (rows, t)
}

/// Solve `sum_i x_i * rows_i = target` for integer `x`, where `rows` and
/// `target` are rational. Returns one solution or None.
pub fn solve_integer_combination(rows: &[Vector], target: &[Rational]) -> Option<Vec<BigInt>> {
    let ncols = target.len();
    if rows.is_empty() {
        return if target.iter().all(|x| x.is_zero()) {
            Some(Vec::new())
        } else {
            None
        };
    }
    // common denominator scaling keeps the solution set unchanged
    let mut den = BigInt::one();
    for row in rows {
        for x in row {
            den = den.lcm(x.denom());
        }
    }
    for x in target {
        den = den.lcm(x.denom());
    }
    let scale = |v: &Vector| -> Vec<BigInt> {
        v.iter()
            .map(|x| (x * BigRational::from_integer(den.clone())).to_integer())
            .collect()
    };
    let a: Vec<Vec<BigInt>> = rows.iter().map(scale).collect();
    let mut w = scale(&target.to_vec());

    let (h, t) = hnf_with_transform(a);
    let m = rows.len();
    let mut y = vec![BigInt::zero(); m];
    for (i, row) in h.iter().enumerate() {
        if row.iter().all(|x| x.is_zero()) {
            break;
        }
        let c = pivot_col(row);
        if w[c].is_zero() {
            continue;
        }
        let (q, rem) = w[c].div_rem(&row[c]);
        if !rem.is_zero() {
            return None;
        }
        for k in 0..ncols {
            let d = &q * &row[k];
            w[k] -= d;
        }
        y[i] = q;
    }
    if !w.iter().all(|x| x.is_zero()) {
        return None;
    }
    // x = y * T
    let x: Vec<BigInt> = (0..m)
        .map(|j| {
            let mut acc = BigInt::zero();
            for (i, yi) in y.iter().enumerate() {
                if !yi.is_zero() {
                    acc += yi * &t[i][j];
                }
            }
            acc
        })
        .collect();
    Some(x)
}
