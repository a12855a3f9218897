//! Small dense linear algebra over complex numbers and over expressions:
//! determinants, solves, inverses, Pfaffians.
//!
//! Symbolic routines work on polynomial entries through [`Polynomial`] and
//! are limited to [`SYMBOLIC_SIZE_LIMIT`] unless every entry is constant,
//! in which case exact Gaussian-rational elimination is used at any size.

use std::collections::HashMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::{canonical, equals, Bindings, Expr, GaussRational, Polynomial};

pub const SYMBOLIC_SIZE_LIMIT: usize = 8;

/// Relative singularity threshold: `|det| ≤ SINGULAR_RTOL · Π_rows max|a_rj|`.
pub const SINGULAR_RTOL: f64 = 1e-9;

/// Square matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    size: usize,
    data: Vec<T>,
}

pub type NumericMatrix = Matrix<Complex64>;
pub type SymbolicMatrix = Matrix<Expr>;

impl<T: Clone> Matrix<T> {
    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(size * size);
        for r in 0..size {
            for c in 0..size {
                data.push(f(r, c));
            }
        }
        Self { size, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let size = rows.len();
        if rows.iter().any(|r| r.len() != size) {
            return Err(Error::Shape("matrix rows must all have length equal to the row count".into()));
        }
        Ok(Self { size, data: rows.into_iter().flatten().collect() })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.size + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.size + c] = v;
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.size.max(1)).map(|c| c.to_vec()).collect()
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { size: self.size, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.size, |r, c| self.get(c, r).clone())
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.data.iter().enumerate().map(move |(k, v)| (k / self.size, k % self.size, v))
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.size {
            let row: Vec<String> = (0..self.size).map(|c| self.data[r * self.size + c].to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl NumericMatrix {
    pub fn identity(size: usize) -> Self {
        Matrix::from_fn(size, |r, c| if r == c { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.size).map(|r| (0..self.size).map(|c| self.get(r, c) * v[c]).sum()).collect()
    }

    pub fn matmul(&self, other: &NumericMatrix) -> NumericMatrix {
        Matrix::from_fn(self.size, |r, c| (0..self.size).map(|k| self.get(r, k) * other.get(k, c)).sum())
    }

    /// Product of the row max-norms, the scale of the singularity test.
    pub fn row_scale(&self) -> f64 {
        (0..self.size).map(|r| (0..self.size).map(|c| self.get(r, c).norm()).fold(0.0, f64::max)).product()
    }
}

impl SymbolicMatrix {
    pub fn identity(size: usize) -> Self {
        Matrix::from_fn(size, |r, c| if r == c { Expr::one() } else { Expr::zero() })
    }

    pub fn evaluate(&self, env: &Bindings) -> Result<NumericMatrix> {
        let data = self.data.iter().map(|e| e.eval(env)).collect::<Result<Vec<_>>>()?;
        Ok(Matrix { size: self.size, data })
    }

    pub fn matmul(&self, other: &SymbolicMatrix) -> SymbolicMatrix {
        Matrix::from_fn(self.size, |r, c| {
            Expr::add((0..self.size).map(|k| Expr::mul([self.get(r, k).clone(), other.get(k, c).clone()])))
        })
    }

    /// Entrywise equality decided by [`equals`]; `Some(exact)` when all
    /// entries agree, `None` otherwise.
    pub fn equals(&self, other: &SymbolicMatrix) -> Option<bool> {
        if self.size != other.size {
            return None;
        }
        let mut exact = true;
        for (a, b) in self.data.iter().zip(&other.data) {
            let v = equals(a, b);
            if !v.equal {
                return None;
            }
            exact &= v.holds_exactly();
        }
        Some(exact)
    }

    pub fn is_symmetric(&self) -> bool {
        self.equals(&self.transpose()).is_some()
    }

    /// Entries as exact constants, if every entry is one.
    pub fn as_constant(&self) -> Option<Matrix<GaussRational>> {
        let data = self.data.iter().map(|e| canonical(e).ok()?.as_constant()).collect::<Option<Vec<_>>>()?;
        Some(Matrix { size: self.size, data })
    }

    fn polynomials(&self) -> Result<Matrix<Polynomial>> {
        let data = self.data.iter().map(canonical).collect::<Result<Vec<_>>>()?;
        Ok(Matrix { size: self.size, data })
    }
}

/// Numeric determinant by partial-pivoting elimination.
pub fn det_numeric(a: &NumericMatrix) -> Complex64 {
    let n = a.size;
    let mut m = a.data.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| m[x * n + col].norm().total_cmp(&m[y * n + col].norm())).unwrap();
        if m[pivot * n + col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            for c in 0..n {
                m.swap(pivot * n + c, col * n + c);
            }
            det = -det;
        }
        let p = m[col * n + col];
        det *= p;
        for r in col + 1..n {
            let factor = m[r * n + col] / p;
            if factor.norm() == 0.0 {
                continue;
            }
            for c in col..n {
                let v = m[col * n + c];
                m[r * n + c] -= factor * v;
            }
        }
    }
    det
}

/// Whether `a` counts as singular under the scale-aware threshold.
pub fn is_singular(a: &NumericMatrix) -> bool {
    det_numeric(a).norm() <= SINGULAR_RTOL * a.row_scale()
}

/// Numeric rank: singular values below `1e-9 · σ_max` count as zero.
pub fn numeric_rank(a: &NumericMatrix) -> usize {
    if a.size == 0 {
        return 0;
    }
    let m = DMatrix::from_row_slice(a.size, a.size, &a.data);
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > 1e-9 * max).count()
}

/// Exact determinant of a matrix of polynomial entries.
pub fn det_symbolic(a: &SymbolicMatrix) -> Result<Expr> {
    if let Some(c) = a.as_constant() {
        return Ok(Expr::Const(det_exact(&c)));
    }
    if a.size > SYMBOLIC_SIZE_LIMIT {
        return Err(Error::SizeLimitExceeded { size: a.size, limit: SYMBOLIC_SIZE_LIMIT });
    }
    let p = a.polynomials()?;
    let rows: Vec<usize> = (0..a.size).collect();
    let cols: Vec<usize> = (0..a.size).collect();
    Ok(minor_det(&p, &rows, &cols).to_expr())
}

/// Determinant of the submatrix on `rows × cols` by Laplace expansion
/// along rows, memoised over the set of remaining columns.
fn minor_det(p: &Matrix<Polynomial>, rows: &[usize], cols: &[usize]) -> Polynomial {
    let k = rows.len();
    let mut memo: HashMap<u32, Polynomial> = HashMap::new();
    fn go(
        p: &Matrix<Polynomial>,
        rows: &[usize],
        cols: &[usize],
        mask: u32,
        memo: &mut HashMap<u32, Polynomial>,
    ) -> Polynomial {
        let depth = rows.len() - mask.count_ones() as usize;
        if depth == rows.len() {
            return Polynomial::one();
        }
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let row = rows[depth];
        let mut acc = Polynomial::zero();
        let mut position = 0usize;
        for (ci, &col) in cols.iter().enumerate() {
            let bit = 1u32 << ci;
            if mask & bit == 0 {
                continue;
            }
            let entry = p.get(row, col);
            if !entry.is_zero() {
                let sub = go(p, rows, cols, mask & !bit, memo);
                if !sub.is_zero() {
                    let term = entry.mul(&sub);
                    acc = if position % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
                }
            }
            position += 1;
        }
        memo.insert(mask, acc.clone());
        acc
    }
    let full = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
    go(p, rows, cols, full, &mut memo)
}

/// Exact determinant of a constant matrix by fraction elimination.
pub fn det_exact(a: &Matrix<GaussRational>) -> GaussRational {
    let n = a.size;
    let mut m = a.data.clone();
    let mut det = GaussRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r * n + col].is_zero()) else {
            return GaussRational::zero();
        };
        if pivot != col {
            for c in 0..n {
                m.swap(pivot * n + c, col * n + c);
            }
            det = -det;
        }
        let p = m[col * n + col].clone();
        det = &det * &p;
        let inv = p.recip().expect("nonzero pivot");
        for r in col + 1..n {
            if m[r * n + col].is_zero() {
                continue;
            }
            let factor = &m[r * n + col] * &inv;
            for c in col..n {
                let v = &factor * &m[col * n + c];
                m[r * n + c] = &m[r * n + c] - &v;
            }
        }
    }
    det
}

/// Exact inverse of a constant matrix by Gauss–Jordan elimination.
pub fn inverse_exact(a: &Matrix<GaussRational>) -> Result<Matrix<GaussRational>> {
    let n = a.size;
    let mut m = a.data.clone();
    let mut inv: Vec<GaussRational> =
        (0..n * n).map(|k| if k / n == k % n { GaussRational::one() } else { GaussRational::zero() }).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r * n + col].is_zero()).ok_or(Error::SingularMatrix)?;
        if pivot != col {
            for c in 0..n {
                m.swap(pivot * n + c, col * n + c);
                inv.swap(pivot * n + c, col * n + c);
            }
        }
        let p_inv = m[col * n + col].recip().expect("nonzero pivot");
        for c in 0..n {
            m[col * n + c] = &m[col * n + c] * &p_inv;
            inv[col * n + c] = &inv[col * n + c] * &p_inv;
        }
        for r in 0..n {
            if r == col || m[r * n + col].is_zero() {
                continue;
            }
            let factor = m[r * n + col].clone();
            for c in 0..n {
                let v = &factor * &m[col * n + c];
                m[r * n + c] = &m[r * n + c] - &v;
                let w = &factor * &inv[col * n + c];
                inv[r * n + c] = &inv[r * n + c] - &w;
            }
        }
    }
    Ok(Matrix { size: n, data: inv })
}

/// Symbolic inverse: exact for constant matrices of any size, adjugate over
/// determinant for polynomial matrices up to [`SYMBOLIC_SIZE_LIMIT`].
pub fn inverse_symbolic(a: &SymbolicMatrix) -> Result<SymbolicMatrix> {
    if let Some(c) = a.as_constant() {
        return Ok(inverse_exact(&c)?.map(|v| Expr::Const(v.clone())));
    }
    if a.size > SYMBOLIC_SIZE_LIMIT {
        return Err(Error::SizeLimitExceeded { size: a.size, limit: SYMBOLIC_SIZE_LIMIT });
    }
    let p = a.polynomials()?;
    let n = a.size;
    let all: Vec<usize> = (0..n).collect();
    let det = minor_det(&p, &all, &all);
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let det_expr = det.to_expr();
    let mut out = SymbolicMatrix::identity(n);
    for r in 0..n {
        for c in 0..n {
            // inverse[r][c] = (−1)^{r+c} · minor(c, r) / det
            let rows: Vec<usize> = all.iter().copied().filter(|&k| k != c).collect();
            let cols: Vec<usize> = all.iter().copied().filter(|&k| k != r).collect();
            let mut cof = minor_det(&p, &rows, &cols);
            if (r + c) % 2 == 1 {
                cof = cof.neg();
            }
            let entry = match det.as_constant() {
                Some(d) => cof.scale(&d.recip().expect("nonzero determinant")).to_expr(),
                None if cof.is_zero() => Expr::zero(),
                None => Expr::div(cof.to_expr(), det_expr.clone()),
            };
            out.set(r, c, entry);
        }
    }
    Ok(out)
}

/// Solve `a·x = rhs` by LU with partial pivoting and one step of
/// residual correction.
pub fn solve(a: &NumericMatrix, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = a.size;
    if rhs.len() != n {
        return Err(Error::Shape(format!("rhs has length {}, matrix size {n}", rhs.len())));
    }
    if is_singular(a) {
        return Err(Error::SingularMatrix);
    }
    let lu = Lu::factor(a)?;
    let mut x = lu.solve(rhs);
    let ax = a.mul_vec(&x);
    let residual: Vec<Complex64> = rhs.iter().zip(&ax).map(|(b, v)| b - v).collect();
    let dx = lu.solve(&residual);
    for (xi, d) in x.iter_mut().zip(dx) {
        *xi += d;
    }
    Ok(x)
}

/// Numeric inverse through [`solve`] on the unit vectors.
pub fn inverse_numeric(a: &NumericMatrix) -> Result<NumericMatrix> {
    let n = a.size;
    let mut out = NumericMatrix::identity(n);
    for c in 0..n {
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[c] = Complex64::new(1.0, 0.0);
        let col = solve(a, &e)?;
        for (r, v) in col.into_iter().enumerate() {
            out.set(r, c, v);
        }
    }
    Ok(out)
}

struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(a: &NumericMatrix) -> Result<Self> {
        let n = a.size;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let pivot = (col..n).max_by(|&x, &y| lu[x * n + col].norm().total_cmp(&lu[y * n + col].norm())).unwrap();
            if lu[pivot * n + col].norm() == 0.0 {
                return Err(Error::SingularMatrix);
            }
            if pivot != col {
                for c in 0..n {
                    lu.swap(pivot * n + c, col * n + c);
                }
                perm.swap(pivot, col);
            }
            let p = lu[col * n + col];
            for r in col + 1..n {
                let f = lu[r * n + col] / p;
                lu[r * n + col] = f;
                for c in col + 1..n {
                    let v = lu[col * n + c];
                    lu[r * n + c] -= f * v;
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut y: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            for c in 0..r {
                let v = self.lu[r * n + c] * y[c];
                y[r] -= v;
            }
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                let v = self.lu[r * n + c] * y[c];
                y[r] -= v;
            }
            y[r] /= self.lu[r * n + r];
        }
        y
    }
}

/// Pfaffian by expansion along the first row, memoised over the set of
/// remaining indices.
fn pfaffian_generic<T: Clone>(
    size: usize,
    entry: impl Fn(usize, usize) -> T,
    zero: T,
    one: T,
    is_zero: impl Fn(&T) -> bool,
    add: impl Fn(&T, &T) -> T,
    sub: impl Fn(&T, &T) -> T,
    mul: impl Fn(&T, &T) -> T,
) -> T {
    fn go<T: Clone>(
        mask: u32,
        memo: &mut HashMap<u32, T>,
        ctx: &(
            &dyn Fn(usize, usize) -> T,
            T,
            T,
            &dyn Fn(&T) -> bool,
            &dyn Fn(&T, &T) -> T,
            &dyn Fn(&T, &T) -> T,
            &dyn Fn(&T, &T) -> T,
        ),
    ) -> T {
        if mask == 0 {
            return ctx.2.clone();
        }
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let first = mask.trailing_zeros() as usize;
        let rest = mask & !(1u32 << first);
        let mut acc = ctx.1.clone();
        let mut position = 0usize;
        let mut bits = rest;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let a = (ctx.0)(first, j);
            if !(ctx.3)(&a) {
                let sub = go(rest & !(1u32 << j), memo, ctx);
                let term = (ctx.6)(&a, &sub);
                acc = if position % 2 == 0 { (ctx.4)(&acc, &term) } else { (ctx.5)(&acc, &term) };
            }
            position += 1;
        }
        memo.insert(mask, acc.clone());
        acc
    }
    let ctx: (
        &dyn Fn(usize, usize) -> T,
        T,
        T,
        &dyn Fn(&T) -> bool,
        &dyn Fn(&T, &T) -> T,
        &dyn Fn(&T, &T) -> T,
        &dyn Fn(&T, &T) -> T,
    ) = (&entry, zero, one, &is_zero, &add, &sub, &mul);
    let full = if size == 32 { u32::MAX } else { (1u32 << size) - 1 };
    go(full, &mut HashMap::new(), &ctx)
}

pub fn pfaffian_numeric(a: &NumericMatrix) -> Result<Complex64> {
    let n = a.size;
    if n % 2 == 1 {
        return Err(Error::OddSize(n));
    }
    if n > 30 {
        return Err(Error::SizeLimitExceeded { size: n, limit: 30 });
    }
    let scale = a.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for r in 0..n {
        for c in 0..n {
            if (a.get(r, c) + a.get(c, r)).norm() > 1e-12 * scale {
                return Err(Error::NotAntisymmetric);
            }
        }
    }
    let z = Complex64::new(0.0, 0.0);
    Ok(pfaffian_generic(
        n,
        |r, c| *a.get(r, c),
        z,
        Complex64::new(1.0, 0.0),
        |v| v.norm() == 0.0,
        |x, y| x + y,
        |x, y| x - y,
        |x, y| x * y,
    ))
}

pub fn pfaffian_symbolic(a: &SymbolicMatrix) -> Result<Expr> {
    let n = a.size;
    if n % 2 == 1 {
        return Err(Error::OddSize(n));
    }
    if n > SYMBOLIC_SIZE_LIMIT {
        return Err(Error::SizeLimitExceeded { size: n, limit: SYMBOLIC_SIZE_LIMIT });
    }
    let p = a.polynomials()?;
    for r in 0..n {
        for c in 0..n {
            if !p.get(r, c).add(p.get(c, r)).is_zero() {
                return Err(Error::NotAntisymmetric);
            }
        }
    }
    Ok(pfaffian_generic(
        n,
        |r, c| p.get(r, c).clone(),
        Polynomial::zero(),
        Polynomial::one(),
        Polynomial::is_zero,
        Polynomial::add,
        Polynomial::sub,
        Polynomial::mul,
    )
    .to_expr())
}
