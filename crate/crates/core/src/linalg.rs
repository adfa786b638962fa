//! Small dense linear algebra: row-major matrices, Cholesky, Householder
//! least squares and the cyclic Jacobi symmetric eigensolver.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        Self { rows, cols, data }
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
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

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `selfᵀ · other`
    pub fn t_matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "t_matmul shape mismatch");
        let mut out = Matrix::zeros(self.cols, other.cols);
        for r in 0..self.rows {
            let a_row = self.row(r);
            let b_row = other.row(r);
            for (i, a) in a_row.iter().enumerate() {
                if *a == 0.0 {
                    continue;
                }
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "mul_vec shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Matrix::from_vec(self.rows, self.cols, data)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Matrix::from_vec(self.rows, self.cols, data)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix::from_vec(self.rows, self.cols, self.data.iter().map(|a| a * s).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| f64::max(m, v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Columns `range` as a new matrix.
    pub fn columns(&self, range: core::ops::Range<usize>) -> Matrix {
        Matrix::from_fn(self.rows, range.len(), |i, j| self[(i, range.start + j)])
    }

    /// Rows `range` as a new matrix.
    pub fn row_range(&self, range: core::ops::Range<usize>) -> Matrix {
        Matrix::from_vec(
            range.len(),
            self.cols,
            self.data[range.start * self.cols..range.end * self.cols].to_vec(),
        )
    }

    /// Selects the given rows, in order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix::from_vec(idx.len(), self.cols, data)
    }

    /// Selects the given columns, in order.
    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])])
    }

    /// Horizontal concatenation.
    pub fn hstack(parts: &[&Matrix]) -> Matrix {
        let rows = parts.first().map_or(0, |m| m.rows);
        let cols: usize = parts.iter().map(|m| m.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        for i in 0..rows {
            let mut c = 0;
            for m in parts {
                assert_eq!(m.rows, rows, "hstack row mismatch");
                out.row_mut(i)[c..c + m.cols].copy_from_slice(m.row(i));
                c += m.cols;
            }
        }
        out
    }

    pub fn symmetrize(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    /// Lower-triangular Cholesky factor `L` with `L Lᵀ = self`.
    pub fn cholesky(&self) -> Result<Matrix> {
        assert!(self.is_square(), "cholesky of non-square matrix");
        let n = self.rows;
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite);
            }
            let d = libm::sqrt(d);
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(l)
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Matrix> {
        assert!(self.is_square(), "inverse of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for c in 0..n {
            let mut p = c;
            for r in c + 1..n {
                if a[(r, c)].abs() > a[(p, c)].abs() {
                    p = r;
                }
            }
            if a[(p, c)].abs() <= 1e-13 * scale {
                return Err(Error::Singular);
            }
            if p != c {
                a.swap_rows(p, c);
                inv.swap_rows(p, c);
            }
            let d = a[(c, c)];
            for j in 0..n {
                a[(c, j)] /= d;
                inv[(c, j)] /= d;
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a[(r, c)];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[(r, j)] -= f * a[(c, j)];
                    inv[(r, j)] -= f * inv[(c, j)];
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn determinant_spd(&self) -> Result<f64> {
        let l = self.cholesky()?;
        Ok((0..self.rows).map(|i| l[(i, i)] * l[(i, i)]).product())
    }

    /// Natural log of the determinant of a symmetric positive definite matrix.
    pub fn ln_det_spd(&self) -> Result<f64> {
        let l = self.cholesky()?;
        Ok((0..self.rows).map(|i| 2.0 * libm::log(l[(i, i)])).sum())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(D::Error::custom("ragged matrix rows"));
        }
        Ok(Matrix::from_rows(&rows))
    }
}

/// Householder QR factorization of a tall matrix, used for least squares.
pub struct Qr {
    qr: Matrix,
    tau: Vec<f64>,
    rank_ok: bool,
}

impl Qr {
    pub fn new(x: &Matrix) -> Qr {
        let (n, k) = (x.rows, x.cols);
        assert!(n >= k, "QR needs at least as many rows as columns");
        let mut qr = x.clone();
        let mut tau = vec![0.0; k];
        let mut col_norms = Vec::with_capacity(k);
        for j in 0..k {
            col_norms.push(libm::sqrt((0..n).map(|i| x[(i, j)] * x[(i, j)]).sum::<f64>()));
        }
        for j in 0..k {
            let norm = libm::sqrt((j..n).map(|i| qr[(i, j)] * qr[(i, j)]).sum::<f64>());
            if norm == 0.0 {
                continue;
            }
            let alpha = if qr[(j, j)] > 0.0 { -norm } else { norm };
            let v0 = qr[(j, j)] - alpha;
            // v = (1, x[j+1..]/v0), tau = -v0/alpha
            for i in j + 1..n {
                qr[(i, j)] /= v0;
            }
            tau[j] = -v0 / alpha;
            qr[(j, j)] = alpha;
            for c in j + 1..k {
                let mut s = qr[(j, c)];
                for i in j + 1..n {
                    s += qr[(i, j)] * qr[(i, c)];
                }
                s *= tau[j];
                qr[(j, c)] -= s;
                for i in j + 1..n {
                    let vij = qr[(i, j)];
                    qr[(i, c)] -= s * vij;
                }
            }
        }
        let rank_ok = (0..k).all(|j| {
            let reference = col_norms[j].max(f64::MIN_POSITIVE);
            qr[(j, j)].abs() > 1e-10 * reference && col_norms[j] > 0.0
        });
        Qr { qr, tau, rank_ok }
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank_ok
    }

    /// Least-squares coefficients `B` minimizing `‖X B − Y‖`.
    pub fn solve(&self, y: &Matrix) -> Result<Matrix> {
        if !self.rank_ok {
            return Err(Error::Collinear);
        }
        let (n, k) = (self.qr.rows, self.qr.cols);
        assert_eq!(y.rows, n, "least-squares row mismatch");
        let mut qty = y.clone();
        for j in 0..k {
            for c in 0..qty.cols {
                let mut s = qty[(j, c)];
                for i in j + 1..n {
                    s += self.qr[(i, j)] * qty[(i, c)];
                }
                s *= self.tau[j];
                qty[(j, c)] -= s;
                for i in j + 1..n {
                    qty[(i, c)] -= s * self.qr[(i, j)];
                }
            }
        }
        let mut b = Matrix::zeros(k, y.cols);
        for c in 0..y.cols {
            for j in (0..k).rev() {
                let mut s = qty[(j, c)];
                for l in j + 1..k {
                    s -= self.qr[(j, l)] * b[(l, c)];
                }
                b[(j, c)] = s / self.qr[(j, j)];
            }
        }
        Ok(b)
    }

    /// Diagonal of `(XᵀX)⁻¹ = R⁻¹R⁻ᵀ`.
    pub fn xtx_inverse_diagonal(&self) -> Result<Vec<f64>> {
        if !self.rank_ok {
            return Err(Error::Collinear);
        }
        let k = self.qr.cols;
        // R⁻¹ is upper triangular; row sums of squares give the diagonal.
        let mut rinv = Matrix::zeros(k, k);
        for c in 0..k {
            for j in (0..=c).rev() {
                let mut s = if j == c { 1.0 } else { 0.0 };
                for l in j + 1..=c {
                    s -= self.qr[(j, l)] * rinv[(l, c)];
                }
                rinv[(j, c)] = s / self.qr[(j, j)];
            }
        }
        Ok((0..k)
            .map(|i| rinv.row(i).iter().map(|v| v * v).sum())
            .collect())
    }
}

/// Least squares with residuals.
pub fn least_squares(x: &Matrix, y: &Matrix) -> Result<(Matrix, Matrix)> {
    if x.rows < x.cols {
        return Err(Error::InsufficientObservations {
            available: x.rows,
            required: x.cols,
        });
    }
    let qr = Qr::new(x);
    let b = qr.solve(y)?;
    let resid = y.sub(&x.matmul(&b));
    Ok((b, resid))
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Unit eigenvectors as columns, matching `values`.
    pub vectors: Matrix,
}

/// Cyclic Jacobi rotations until the off-diagonal mass vanishes.
pub fn symmetric_eigen(a: &Matrix) -> SymmetricEigen {
    assert!(a.is_square(), "eigen of non-square matrix");
    let n = a.rows;
    let mut m = a.symmetrize();
    let mut v = Matrix::identity(n);
    let total: f64 = m.data.iter().map(|x| x * x).sum();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off <= 1e-30 * total.max(f64::MIN_POSITIVE) || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
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
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]).then(i.cmp(&j)));
    SymmetricEigen {
        values: order.iter().map(|&i| m[(i, i)]).collect(),
        vectors: v.select_cols(&order),
    }
}
