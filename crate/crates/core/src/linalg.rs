//! Small dense linear algebra: Cholesky, cyclic Jacobi and the generalized
//! symmetric eigenproblem. Dimensions in this crate stay at or below 8.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::math::{abs, sqrt, Real};

/// Cap on cyclic Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Off-diagonal Frobenius tolerance, relative to `max(1, ‖A‖_F)`.
pub const JACOBI_TOLERANCE: f64 = 1e-12;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_row_slice(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Self { rows, cols, data: data.to_vec() }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `aᵀ M b`.
    pub fn bilinear(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                s += a[i] * self[(i, j)] * b[j];
            }
        }
        s
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + other[(i, j)])
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - other[(i, j)])
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| s * self[(i, j)])
    }

    /// `½(M + Mᵀ)`.
    pub fn symmetrize(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(abs(*v)))
    }

    pub fn frobenius(&self) -> f64 {
        sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Lower Cholesky factor `L` with `M = L Lᵀ`.
    pub fn cholesky(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 1e-14 * scale) {
                return Err(Error::SingularMetric);
            }
            let djj = sqrt(d);
            l[(j, j)] = djj;
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(l)
    }

    /// Inverse of a symmetric positive definite matrix through its Cholesky factor.
    pub fn inverse_spd(&self) -> Result<Matrix> {
        let l = self.cholesky()?;
        let linv = lower_inverse(&l);
        Ok(linv.transpose().mul(&linv))
    }

    /// General inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        invert_generic(self.rows, &self.data)
            .map(|data| Matrix { rows: self.rows, cols: self.cols, data })
            .ok_or(Error::SingularMetric)
    }

    pub fn determinant(&self) -> f64 {
        assert!(self.is_square(), "determinant of non-square matrix");
        determinant_generic(self.rows, &self.data)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Inverse of a nonsingular lower-triangular matrix.
pub fn lower_inverse(l: &Matrix) -> Matrix {
    let n = l.rows();
    let mut inv = Matrix::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = 1.0 / l[(j, j)];
        for i in (j + 1)..n {
            let mut s = 0.0;
            for k in j..i {
                s += l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / l[(i, i)];
        }
    }
    inv
}

/// Gauss-Jordan inverse of an `n×n` row-major matrix over any [`Real`].
/// Pivoting compares the real parts only.
pub fn invert_generic<T: Real>(n: usize, a: &[T]) -> Option<Vec<T>> {
    let mut m: Vec<T> = a.to_vec();
    let mut inv: Vec<T> = vec![T::zero(); n * n];
    for i in 0..n {
        inv[i * n + i] = T::one();
    }
    let scale = a.iter().fold(0.0f64, |s, v| s.max(abs(v.value())));
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if abs(m[r * n + col].value()) > abs(m[piv * n + col].value()) {
                piv = r;
            }
        }
        if abs(m[piv * n + col].value()) <= 1e-300_f64.max(1e-15 * scale) {
            return None;
        }
        if piv != col {
            for c in 0..n {
                m.swap(piv * n + c, col * n + c);
                inv.swap(piv * n + c, col * n + c);
            }
        }
        let p = m[col * n + col];
        for c in 0..n {
            m[col * n + c] = m[col * n + c] / p;
            inv[col * n + c] = inv[col * n + c] / p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r * n + col];
            for c in 0..n {
                m[r * n + c] = m[r * n + c] - f * m[col * n + c];
                inv[r * n + c] = inv[r * n + c] - f * inv[col * n + c];
            }
        }
    }
    Some(inv)
}

/// Determinant by Gaussian elimination with partial pivoting on real parts.
pub fn determinant_generic<T: Real>(n: usize, a: &[T]) -> T {
    match n {
        0 => return T::one(),
        1 => return a[0],
        2 => return a[0] * a[3] - a[1] * a[2],
        _ => {}
    }
    let mut m: Vec<T> = a.to_vec();
    let mut det = T::one();
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if abs(m[r * n + col].value()) > abs(m[piv * n + col].value()) {
                piv = r;
            }
        }
        if m[piv * n + col].value() == 0.0 {
            // Fall back to cofactor expansion so derivative parts survive.
            return cofactor_determinant(n, a);
        }
        if piv != col {
            for c in 0..n {
                m.swap(piv * n + c, col * n + c);
            }
            det = -det;
        }
        let p = m[col * n + col];
        det = det * p;
        for r in (col + 1)..n {
            let f = m[r * n + col] / p;
            for c in col..n {
                m[r * n + c] = m[r * n + c] - f * m[col * n + c];
            }
        }
    }
    det
}

fn cofactor_determinant<T: Real>(n: usize, a: &[T]) -> T {
    if n == 1 {
        return a[0];
    }
    if n == 2 {
        return a[0] * a[3] - a[1] * a[2];
    }
    let mut det = T::zero();
    let mut minor = vec![T::zero(); (n - 1) * (n - 1)];
    for j in 0..n {
        let mut idx = 0;
        for r in 1..n {
            for c in 0..n {
                if c != j {
                    minor[idx] = a[r * n + c];
                    idx += 1;
                }
            }
        }
        let term = a[j] * cofactor_determinant(n - 1, &minor);
        det = if j % 2 == 0 { det + term } else { det - term };
    }
    det
}

/// Symmetric eigen-decomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order (stable for ties) and the matching
/// eigenvectors as columns.
pub fn sym_eigen(a: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    let n = a.rows();
    let mut m = a.symmetrize();
    let mut v = Matrix::identity(n);
    let tol = JACOBI_TOLERANCE * a.frobenius().max(1.0);
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(&m);
        if off <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = {
                    let s = if theta >= 0.0 { 1.0 } else { -1.0 };
                    s / (abs(theta) + sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&m) > tol {
        return Err(Error::EigenFailure);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap_or(core::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

fn off_diagonal_norm(m: &Matrix) -> f64 {
    let n = m.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)] * m[(i, j)];
            }
        }
    }
    sqrt(s)
}

/// Eigenvalues of `H v = λ G v` for symmetric `H` and SPD `G`, ascending.
///
/// Reduces to `L⁻¹ H L⁻ᵀ` with `G = L Lᵀ`.
pub fn generalized_sym_eigenvalues(h: &Matrix, g: &Matrix) -> Result<Vec<f64>> {
    let (values, _) = generalized_sym_eigen(h, g)?;
    Ok(values)
}

/// Like [`generalized_sym_eigenvalues`], also returning `G`-orthonormal
/// eigenvectors as columns.
pub fn generalized_sym_eigen(h: &Matrix, g: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let l = g.cholesky()?;
    let linv = lower_inverse(&l);
    let reduced = linv.mul(&h.symmetrize()).mul(&linv.transpose());
    let (values, y) = sym_eigen(&reduced)?;
    Ok((values, linv.transpose().mul(&y)))
}
