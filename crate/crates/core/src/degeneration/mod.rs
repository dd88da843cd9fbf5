//! Degenerations `(A_1(z) ⊗ … ⊗ A_k(z)) ψ = φ + O(z)` and their validation.

mod combinatorial;
mod hypergraph;
pub mod library;

use std::collections::BTreeMap;

pub use combinatorial::{combinatorial_exponent, from_combinatorial, CombinatorialSpec};
pub use hypergraph::{edge_connectivity, hypergraph_ghz_exponent, Hypergraph};

use crate::error::{Error, Result};
use crate::laurent::LaurentMatrix;
use crate::linalg::{operator_norm, CMatrix, C64};
use crate::state::{tensor_apply, MultipartiteState};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Floor applied to factor norms before taking logarithms, so zeros of a map
/// give a large negative log instead of -inf.
pub const NORM_FLOOR: f64 = 1e-12;

/// Anything with a product norm `‖A(z)‖` and an error degree. Exponent and
/// finite-n routines only see a degeneration through this trait, which also
/// lets tests plug in synthetic norm profiles.
pub trait NormModel: Sync {
    /// `log₂ ‖A_1(z) ⊗ … ⊗ A_k(z)‖`, with each factor floored at `NORM_FLOOR`.
    fn log2_norm(&self, z: C64) -> f64;

    fn error_degree(&self) -> usize;
}

/// A validated degeneration.
#[derive(Debug, Clone)]
pub struct Degeneration {
    maps: Vec<LaurentMatrix>,
    psi: MultipartiteState,
    phi: MultipartiteState,
    error_degree: usize,
}

/// Outcome of expanding `(⊗ A_j(z)) ψ` and comparing against `φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub is_degeneration: bool,
    pub error_degree: usize,
    pub max_negative_residual: f64,
    pub constant_term_error: f64,
    /// Some map has a positive power of z.
    pub has_positive_powers: bool,
    /// Some map has a negative power of z. Without these the degeneration
    /// collapses to a restriction at z = 0.
    pub has_negative_powers: bool,
    /// Minimum of the product norm over a 32x32 log-polar grid.
    pub nowhere_zero_min_grid_norm: f64,
    /// Parties whose map has a common root on the punctured plane.
    pub vanishing_factors: Vec<usize>,
}

impl ValidationReport {
    pub fn is_restriction(&self) -> bool {
        !self.has_negative_powers
    }

    pub fn is_nowhere_zero(&self) -> bool {
        self.vanishing_factors.is_empty() && self.nowhere_zero_min_grid_norm > NORM_FLOOR
    }
}

/// Coefficients of the vector-valued Laurent polynomial `(⊗ A_j(z)) ψ`.
pub fn expand(maps: &[LaurentMatrix], psi: &MultipartiteState) -> Result<BTreeMap<i32, Vec<C64>>> {
    if maps.len() != psi.parties() {
        return Err(Error::ShapeMismatch(format!("{} maps for {} parties", maps.len(), psi.parties())));
    }
    let mut dims = psi.dims().to_vec();
    let mut poly: BTreeMap<i32, Vec<C64>> = BTreeMap::from([(0, psi.amplitudes().to_vec())]);
    for (j, map) in maps.iter().enumerate() {
        if map.cols() != dims[j] {
            return Err(Error::ShapeMismatch(format!(
                "map {j} has {} columns, psi has local dimension {}",
                map.cols(),
                dims[j]
            )));
        }
        let mut next: BTreeMap<i32, Vec<C64>> = BTreeMap::new();
        for (&p, v) in &poly {
            for (h, m) in map.terms() {
                let maps_j: Vec<CMatrix> = (0..dims.len())
                    .map(|l| if l == j { m.clone() } else { CMatrix::identity(dims[l]) })
                    .collect();
                let refs: Vec<&CMatrix> = maps_j.iter().collect();
                let (_, out) = tensor_apply(&refs, &dims, v)?;
                match next.get_mut(&(p + h)) {
                    Some(acc) => acc.iter_mut().zip(&out).for_each(|(a, b)| *a += b),
                    None => {
                        next.insert(p + h, out);
                    }
                }
            }
        }
        dims[j] = map.rows();
        poly = next;
    }
    Ok(poly)
}

/// Checks the degeneration conditions with absolute tolerance `tol` on
/// coefficient norms.
pub fn validate(
    maps: &[LaurentMatrix],
    psi: &MultipartiteState,
    phi: &MultipartiteState,
    tol: f64,
) -> Result<ValidationReport> {
    if maps.len() != phi.parties() {
        return Err(Error::ShapeMismatch(format!("{} maps for {} target parties", maps.len(), phi.parties())));
    }
    for (j, map) in maps.iter().enumerate() {
        if map.rows() != phi.dims()[j] {
            return Err(Error::ShapeMismatch(format!(
                "map {j} has {} rows, phi has local dimension {}",
                map.rows(),
                phi.dims()[j]
            )));
        }
    }
    let poly = expand(maps, psi)?;
    let coef_norm = |v: &[C64]| crate::linalg::norm(v);

    let max_negative_residual = poly.range(..0).map(|(_, v)| coef_norm(v)).fold(0.0, f64::max);
    let constant_term_error = match poly.get(&0) {
        Some(v) => v.iter().zip(phi.amplitudes()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt(),
        None => 1.0,
    };
    let error_degree = poly
        .range(1..)
        .filter(|(_, v)| coef_norm(v) > tol)
        .map(|(&p, _)| p as usize)
        .max()
        .unwrap_or(0);

    let nowhere_zero_min_grid_norm = grid_min_norm(maps);
    let vanishing_factors = maps
        .iter()
        .enumerate()
        .filter(|(_, m)| m.common_root_degree() > 0)
        .map(|(j, _)| j)
        .collect();

    Ok(ValidationReport {
        is_degeneration: max_negative_residual <= tol && constant_term_error <= tol,
        error_degree,
        max_negative_residual,
        constant_term_error,
        has_positive_powers: maps.iter().any(|m| m.max_power() > 0),
        has_negative_powers: maps.iter().any(|m| m.min_power() < 0),
        nowhere_zero_min_grid_norm,
        vanishing_factors,
    })
}

fn grid_min_norm(maps: &[LaurentMatrix]) -> f64 {
    let mut best = f64::INFINITY;
    for a in 0..32 {
        let r = (2f64).powf(-4.0 + 8.0 * a as f64 / 31.0);
        for b in 0..32 {
            let z = C64::from_polar(r, std::f64::consts::TAU * b as f64 / 32.0);
            let norm: f64 = maps
                .iter()
                .map(|m| m.eval(z).map(|e| operator_norm(&e)).unwrap_or(f64::INFINITY))
                .product();
            best = best.min(norm);
        }
    }
    best
}

impl Degeneration {
    /// Validates and builds a degeneration.
    pub fn new(maps: Vec<LaurentMatrix>, psi: MultipartiteState, phi: MultipartiteState, tol: f64) -> Result<Self> {
        let report = validate(&maps, &psi, &phi, tol)?;
        if !report.is_degeneration {
            return Err(Error::NotDegeneration {
                negative_residual: report.max_negative_residual,
                constant_error: report.constant_term_error,
            });
        }
        Ok(Self { maps, psi, phi, error_degree: report.error_degree })
    }

    pub fn k(&self) -> usize {
        self.maps.len()
    }

    pub fn maps(&self) -> &[LaurentMatrix] {
        &self.maps
    }

    pub fn psi(&self) -> &MultipartiteState {
        &self.psi
    }

    pub fn phi(&self) -> &MultipartiteState {
        &self.phi
    }

    pub fn error_degree(&self) -> usize {
        self.error_degree
    }

    pub fn report(&self, tol: f64) -> ValidationReport {
        validate(&self.maps, &self.psi, &self.phi, tol).expect("shapes checked on construction")
    }

    /// `A_j(z)` for every party.
    pub fn eval(&self, z: C64) -> Result<Vec<CMatrix>> {
        self.maps.iter().map(|m| m.eval(z)).collect()
    }

    /// `‖A_j(z)‖` for every party.
    pub fn factor_norms(&self, z: C64) -> Result<Vec<f64>> {
        Ok(self.eval(z)?.iter().map(operator_norm).collect())
    }

    /// `‖A_1(z) ⊗ … ⊗ A_k(z)‖ = Π_j ‖A_j(z)‖`.
    pub fn product_norm(&self, z: C64) -> Result<f64> {
        Ok(self.factor_norms(z)?.iter().product())
    }

    /// True when both positive and negative powers of z occur among the maps.
    pub fn has_both_power_signs(&self) -> bool {
        self.maps.iter().any(|m| m.min_power() < 0) && self.maps.iter().any(|m| m.max_power() > 0)
    }
}

/// Free-function form of [`Degeneration::product_norm`].
pub fn product_norm(deg: &Degeneration, z: C64) -> Result<f64> {
    deg.product_norm(z)
}

impl NormModel for Degeneration {
    fn log2_norm(&self, z: C64) -> f64 {
        match self.factor_norms(z) {
            Ok(norms) => norms.iter().map(|n| n.max(NORM_FLOOR).log2()).sum(),
            Err(_) => f64::INFINITY,
        }
    }

    fn error_degree(&self) -> usize {
        self.error_degree
    }
}
