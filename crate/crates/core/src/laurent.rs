//! Matrix-valued Laurent polynomials in one complex variable.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};

/// `Σ_h z^h M_h` with all `M_h` of one shape. Zero coefficients are dropped
/// on construction, so `min_power`/`max_power` always refer to nonzero terms.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentMatrix {
    rows: usize,
    cols: usize,
    terms: BTreeMap<i32, CMatrix>,
}

impl LaurentMatrix {
    pub fn new(rows: usize, cols: usize, terms: impl IntoIterator<Item = (i32, CMatrix)>) -> Result<Self> {
        let mut map: BTreeMap<i32, CMatrix> = BTreeMap::new();
        for (power, m) in terms {
            if m.rows() != rows || m.cols() != cols {
                return Err(Error::ShapeMismatch(format!(
                    "term z^{power} is {}x{}, expected {rows}x{cols}",
                    m.rows(),
                    m.cols()
                )));
            }
            let merged = match map.remove(&power) {
                Some(prev) => prev.add(&m)?,
                None => m,
            };
            map.insert(power, merged);
        }
        map.retain(|_, m| m.as_slice().iter().any(|&z| z != ZERO));
        if map.is_empty() {
            return Err(Error::InvalidInput("Laurent matrix has no nonzero term".into()));
        }
        Ok(Self { rows, cols, terms: map })
    }

    pub fn constant(m: CMatrix) -> Result<Self> {
        Self::new(m.rows(), m.cols(), [(0, m)])
    }

    /// Diagonal map `Σ_i coeff_i z^{power_i} |i⟩⟨i|`.
    pub fn diagonal(entries: &[(i32, C64)]) -> Result<Self> {
        let n = entries.len();
        let terms = entries.iter().enumerate().map(|(i, &(p, c))| {
            let mut m = CMatrix::zeros(n, n);
            m[(i, i)] = c;
            (p, m)
        });
        Self::new(n, n, terms.collect::<Vec<_>>())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn min_power(&self) -> i32 {
        *self.terms.keys().next().expect("nonempty by construction")
    }

    pub fn max_power(&self) -> i32 {
        *self.terms.keys().next_back().expect("nonempty by construction")
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &CMatrix)> {
        self.terms.iter().map(|(&p, m)| (p, m))
    }

    /// Multiplies every coefficient by `s`.
    pub fn scale(&self, s: C64) -> Result<Self> {
        Self::new(self.rows, self.cols, self.terms().map(|(p, m)| (p, m.scale(s))).collect::<Vec<_>>())
    }

    /// Multiplies by `z^shift`.
    pub fn shift(&self, shift: i32) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            terms: self.terms.iter().map(|(&p, m)| (p + shift, m.clone())).collect(),
        }
    }

    /// Evaluates the polynomial at `z`.
    pub fn eval(&self, z: C64) -> Result<CMatrix> {
        if z == ZERO && self.min_power() < 0 {
            return Err(Error::ZeroAtNegativePower);
        }
        let mut out = CMatrix::zeros(self.rows, self.cols);
        for (&p, m) in &self.terms {
            out = out.add(&m.scale(z.powi(p)))?;
        }
        Ok(out)
    }

    /// Degree of the common polynomial factor of all entries, ignoring powers
    /// of `z` (which vanish only at the origin). A positive degree means the
    /// map is zero somewhere on the punctured plane.
    pub fn common_root_degree(&self) -> usize {
        let lo = self.min_power();
        let mut gcd: Option<Vec<C64>> = None;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let mut poly = vec![ZERO; (self.max_power() - lo + 1) as usize];
                for (&p, m) in &self.terms {
                    poly[(p - lo) as usize] = m[(i, j)];
                }
                let poly = strip_origin_roots(trim(poly));
                if poly.is_empty() {
                    continue;
                }
                gcd = Some(match gcd {
                    None => poly,
                    Some(g) => poly_gcd(g, poly),
                });
                if gcd.as_ref().is_some_and(|g| g.len() == 1) {
                    return 0;
                }
            }
        }
        gcd.map_or(0, |g| g.len().saturating_sub(1))
    }
}

const GCD_TOL: f64 = 1e-9;

/// Drops negligible leading (highest-degree) coefficients.
fn trim(mut p: Vec<C64>) -> Vec<C64> {
    let scale = p.iter().map(|z| z.norm()).fold(0.0, f64::max);
    while p.last().is_some_and(|z| z.norm() <= GCD_TOL * scale.max(1e-300)) {
        p.pop();
    }
    p
}

fn strip_origin_roots(mut p: Vec<C64>) -> Vec<C64> {
    let scale = p.iter().map(|z| z.norm()).fold(0.0, f64::max);
    while p.len() > 1 && p[0].norm() <= GCD_TOL * scale {
        p.remove(0);
    }
    p
}

/// Euclid on coefficient vectors (lowest degree first), with monic scaling to
/// keep remainders comparable against the tolerance.
fn poly_gcd(mut a: Vec<C64>, mut b: Vec<C64>) -> Vec<C64> {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let lead = *b.last().unwrap();
        b.iter_mut().for_each(|z| *z /= lead);
        let mut r = a.clone();
        while r.len() >= b.len() && !r.is_empty() {
            let q = *r.last().unwrap();
            let off = r.len() - b.len();
            for (i, &bi) in b.iter().enumerate() {
                r[off + i] -= q * bi;
            }
            r.pop();
            r = trim_relative(r, &a);
        }
        a = b;
        b = r;
    }
    a
}

fn trim_relative(mut r: Vec<C64>, reference: &[C64]) -> Vec<C64> {
    let scale = reference.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    while r.last().is_some_and(|z| z.norm() <= GCD_TOL * scale) {
        r.pop();
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn constant_polynomial() {
        let l = LaurentMatrix::constant(CMatrix::identity(2)).unwrap();
        assert_eq!(l.eval(c(5.0, 2.0)).unwrap(), CMatrix::identity(2));
    }

    #[test]
    fn cancelling_terms_at_i() {
        let l = LaurentMatrix::new(2, 2, [(-1, CMatrix::identity(2)), (1, CMatrix::identity(2))]).unwrap();
        assert!(l.eval(c(0.0, 1.0)).unwrap().frobenius_norm() < 1e-15);
        assert_eq!(l.eval(ZERO), Err(Error::ZeroAtNegativePower));
    }

    #[test]
    fn merges_and_drops_zero_terms() {
        let l = LaurentMatrix::new(
            1,
            1,
            [
                (2, CMatrix::identity(1)),
                (2, CMatrix::identity(1).scale(c(-1.0, 0.0))),
                (0, CMatrix::identity(1)),
            ],
        )
        .unwrap();
        assert_eq!((l.min_power(), l.max_power()), (0, 0));
    }

    #[test]
    fn common_roots() {
        // (z - 1) I has a common root at 1
        let l = LaurentMatrix::new(2, 2, [(0, CMatrix::identity(2).scale(c(-1.0, 0.0))), (1, CMatrix::identity(2))]).unwrap();
        assert_eq!(l.common_root_degree(), 1);
        // z^{-1} I only vanishes at infinity/origin
        let l = LaurentMatrix::new(2, 2, [(-1, CMatrix::identity(2))]).unwrap();
        assert_eq!(l.common_root_degree(), 0);
        // [[1,-1],[z,0]] never vanishes
        let l = LaurentMatrix::new(
            2,
            2,
            [
                (0, CMatrix::from_rows(&[vec![c(1.0, 0.0), c(-1.0, 0.0)], vec![ZERO, ZERO]]).unwrap()),
                (1, CMatrix::from_rows(&[vec![ZERO, ZERO], vec![c(1.0, 0.0), ZERO]]).unwrap()),
            ],
        )
        .unwrap();
        assert_eq!(l.common_root_degree(), 0);
        // (z-2)(z+1) and (z-2) share (z-2)
        let a = vec![c(-2.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)];
        let b = vec![c(-2.0, 0.0), c(1.0, 0.0)];
        let g = poly_gcd(a, b);
        assert_eq!(g.len(), 2);
        assert!((g[0] / g[1] - c(-2.0, 0.0)).norm() < 1e-12);
    }
}
