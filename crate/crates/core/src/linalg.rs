//! Dense complex matrices and the handful of Hermitian decompositions the
//! rest of the crate needs. Matrices here are small (at most a few dozen
//! rows), so everything is plain row-major storage and cyclic Jacobi.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Shorthand used throughout the crate.
pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Eigenvalues below this are clipped to zero when taking square roots.
pub const PSD_CLIP: f64 = 1e-9;
/// Eigenvalues below this mean the input was not PSD at all.
pub const PSD_REJECT: f64 = -1e-6;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch("matrix must be nonempty".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub(crate) fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| ZERO)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn diag(entries: &[C64]) -> Result<Self> {
        let n = entries.len();
        let mut m = Self::zeros(n.max(1), n.max(1));
        if n == 0 {
            return Err(Error::ShapeMismatch("empty diagonal".into()));
        }
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("diagonal entries"));
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(l, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        Self::from_fn(rows, cols, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigen-decomposition of a Hermitian matrix: `H = V diag(values) V*`,
/// eigenvalues ascending, eigenvectors in the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Cyclic complex Jacobi. The input must be square and Hermitian up to
/// rounding; only its Hermitian part is used.
pub fn hermitian_eigen(h: &CMatrix) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::ShapeMismatch("eigen-decomposition needs a square matrix".into()));
    }
    let n = h.rows;
    let mut a = CMatrix::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok(HermitianEigen { values: vec![0.0; n], vectors: v });
    }

    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                // Phase the (p, q) block to a real symmetric one, then rotate.
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let upp = C64::new(c, 0.0);
                let upq = C64::new(s, 0.0);
                let uqp = -phase.conj() * s;
                let uqq = phase.conj() * c;

                for k in 0..n {
                    let x = a[(k, p)];
                    let y = a[(k, q)];
                    a[(k, p)] = x * upp + y * uqp;
                    a[(k, q)] = x * upq + y * uqq;
                }
                for k in 0..n {
                    let x = a[(p, k)];
                    let y = a[(q, k)];
                    a[(p, k)] = upp.conj() * x + uqp.conj() * y;
                    a[(q, k)] = upq.conj() * x + uqq.conj() * y;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let x = v[(k, p)];
                    let y = v[(k, q)];
                    v[(k, p)] = x * upp + y * uqp;
                    v[(k, q)] = x * upq + y * uqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Largest singular value, via the top eigenvalue of the smaller Gram matrix.
pub fn operator_norm(m: &CMatrix) -> f64 {
    let gram = if m.rows >= m.cols {
        m.adjoint().matmul(m)
    } else {
        m.matmul(&m.adjoint())
    }
    .expect("gram shapes always agree");
    let top = hermitian_eigen(&gram)
        .expect("gram matrix is square")
        .values
        .last()
        .copied()
        .unwrap_or(0.0);
    top.max(0.0).sqrt()
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_function(h: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    let eig = hermitian_eigen(h)?;
    let n = h.rows;
    let fv: Vec<f64> = eig.values.iter().map(|&x| f(x)).collect();
    let v = &eig.vectors;
    Ok(CMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|l| v[(i, l)] * fv[l] * v[(j, l)].conj()).sum()
    }))
}

/// Principal square root of a Hermitian PSD matrix. Eigenvalues down to
/// `PSD_REJECT` are treated as rounding noise and clipped to zero.
pub fn hermitian_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let eig = hermitian_eigen(m)?;
    if let Some(&lowest) = eig.values.first() {
        if lowest < PSD_REJECT {
            return Err(Error::NotPsd { eigenvalue: lowest });
        }
    }
    hermitian_function(m, |x| if x < PSD_CLIP { x.max(0.0).sqrt() } else { x.sqrt() })
}

/// Spectral condition number of a Hermitian PD matrix (infinite if singular).
pub fn condition_number(h: &CMatrix) -> Result<f64> {
    let eig = hermitian_eigen(h)?;
    let lo = eig.values.first().copied().unwrap_or(0.0);
    let hi = eig.values.last().copied().unwrap_or(0.0);
    if lo <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(hi / lo)
}

/// Cholesky factor `L` with `H = L L*`. Fails with `RankDeficient` when a
/// pivot is not safely positive.
pub fn cholesky(h: &CMatrix) -> Result<CMatrix> {
    if !h.is_square() {
        return Err(Error::ShapeMismatch("cholesky needs a square matrix".into()));
    }
    let n = h.rows;
    let scale = (0..n).map(|i| h[(i, i)].re.abs()).fold(0.0, f64::max);
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = h[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 1e-14 * scale) {
            return Err(Error::RankDeficient);
        }
        let d = d.sqrt();
        l[(j, j)] = C64::new(d, 0.0);
        for i in j + 1..n {
            let mut s = h[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Solves `H x = b` for Hermitian PD `H` given its Cholesky factor.
pub fn cholesky_solve(l: &CMatrix, b: &[C64]) -> Vec<C64> {
    let n = l.rows;
    let mut y = vec![ZERO; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    let mut x = vec![ZERO; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[(k, i)].conj() * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_and_diagonal_norms() {
        assert!((operator_norm(&CMatrix::identity(3)) - 1.0).abs() < 1e-14);
        let d = CMatrix::diag(&[c(2.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert!((operator_norm(&d) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn shear_like_matrix_norm_at_two() {
        // [[1,-1],[z,0]] at z = 2; M*M has eigenvalues (6 ± sqrt(20)) / 2.
        let m = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(-1.0, 0.0)], vec![c(2.0, 0.0), c(0.0, 0.0)]]).unwrap();
        let want = ((6.0 + 20f64.sqrt()) / 2.0).sqrt();
        assert!((operator_norm(&m) - want).abs() < 1e-12 * want);
    }

    #[test]
    fn sqrt_of_diagonal() {
        let m = CMatrix::diag(&[c(4.0, 0.0), c(9.0, 0.0)]).unwrap();
        let s = hermitian_sqrt(&m).unwrap();
        assert!((s[(0, 0)] - c(2.0, 0.0)).norm() < 1e-12);
        assert!((s[(1, 1)] - c(3.0, 0.0)).norm() < 1e-12);
        assert!(s[(0, 1)].norm() < 1e-12);
        let i = hermitian_sqrt(&CMatrix::identity(4)).unwrap();
        assert!(i.sub(&CMatrix::identity(4)).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn sqrt_rejects_negative_spectrum() {
        let m = CMatrix::diag(&[c(1.0, 0.0), c(-1e-3, 0.0)]).unwrap();
        assert!(matches!(hermitian_sqrt(&m), Err(Error::NotPsd { .. })));
        // rounding-level negatives are clipped
        let m = CMatrix::diag(&[c(1.0, 0.0), c(-1e-10, 0.0)]).unwrap();
        assert!(hermitian_sqrt(&m).is_ok());
    }

    #[test]
    fn eigen_reconstructs_complex_hermitian() {
        let h = CMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(1.0, 1.0), c(0.0, -0.5)],
            vec![c(1.0, -1.0), c(-1.0, 0.0), c(0.3, 0.2)],
            vec![c(0.0, 0.5), c(0.3, -0.2), c(0.5, 0.0)],
        ])
        .unwrap();
        let eig = hermitian_eigen(&h).unwrap();
        let back = hermitian_function(&h, |x| x).unwrap();
        assert!(back.sub(&h).unwrap().frobenius_norm() < 1e-12);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        let trace: f64 = (0..3).map(|i| h[(i, i)].re).sum();
        assert!((eig.values.iter().sum::<f64>() - trace).abs() < 1e-12);
    }

    #[test]
    fn cholesky_solves() {
        let h = CMatrix::from_rows(&[vec![c(4.0, 0.0), c(1.0, 2.0)], vec![c(1.0, -2.0), c(6.0, 0.0)]]).unwrap();
        let l = cholesky(&h).unwrap();
        let b = vec![c(1.0, 0.0), c(0.0, 1.0)];
        let x = cholesky_solve(&l, &b);
        let hx = h.mul_vec(&x).unwrap();
        assert!((hx[0] - b[0]).norm() + (hx[1] - b[1]).norm() < 1e-13);
    }

    #[test]
    fn constructors_reject_bad_input() {
        assert!(CMatrix::new(2, 2, vec![ZERO; 3]).is_err());
        assert!(CMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
    }
}
