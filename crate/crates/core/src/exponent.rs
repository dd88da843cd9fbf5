//! Single-letter exponents. Every achievable exponent here has the form
//! `2 sup_{z ∈ supp σ} [log₂‖A(z)‖ + e ∫ log₂(|t|/|z - t|) dσ(t)]` for some
//! probability measure σ; the evaluators differ in how σ is chosen.
//! All values are in bits per copy.

use std::f64::consts::{LN_2, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::degeneration::NormModel;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::measure::{Component, PlanarMeasure};
use crate::optimize::{nelder_mead_2d, RadiusBracket};

pub use crate::measure::circle_log_integral;

/// Angular quadrature size for circle averages and Fourier coefficients.
pub const CIRCLE_NODES: usize = 512;
/// Angular samples when taking a supremum over a circle.
pub const SUP_NODES: usize = 2048;
/// Largest padded error degree tried by the Fourier construction.
pub const MAX_PADDED_DEGREE: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentMethod {
    NormMinimum,
    Symmetric,
    CircleAverage,
    FourierCircle,
    Measure,
    Capacity,
    Combinatorial,
}

/// Data that reproduces an exponent value.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Certificate {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Minimizer of the product norm, as `[re, im]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmin: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub padded_degree: Option<usize>,
    /// `ρ̂_m` for `m = 1..M`, as `[re, im]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fourier_coefficients: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentResult {
    pub value: f64,
    pub method: ExponentMethod,
    pub certificate: Certificate,
}

/// Whether `‖A(re^{iφ})‖` is independent of φ up to relative `tol`, checked
/// on 64 angles for each of 32 radii with `log₂ r ∈ [-4, 4]`.
pub fn is_centrally_symmetric<M: NormModel + ?Sized>(model: &M, tol: f64) -> bool {
    (0..32).into_par_iter().all(|a| {
        let r = (-4.0 + 8.0 * a as f64 / 31.0).exp2();
        let logs: Vec<f64> = (0..64).map(|b| model.log2_norm(C64::from_polar(r, TAU * b as f64 / 64.0))).collect();
        let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
        1.0 - (lo - hi).exp2() < tol
    })
}

fn objective_with_degree<M: NormModel + ?Sized>(model: &M, sigma: &PlanarMeasure, z: C64, degree: f64) -> Result<f64> {
    let integral = sigma.log_modulus_mean() - sigma.log_integral(z)?;
    Ok(model.log2_norm(z) + degree * integral / LN_2)
}

/// `log₂‖A(z)‖ + e ∫ log₂(|t|/|z - t|) dσ(t)`.
pub fn measure_objective<M: NormModel + ?Sized>(model: &M, sigma: &PlanarMeasure, z: C64) -> Result<f64> {
    objective_with_degree(model, sigma, z, model.error_degree() as f64)
}

fn sup_over_support<M: NormModel + ?Sized>(model: &M, sigma: &PlanarMeasure, degree: f64) -> Result<(f64, C64)> {
    let samples = sigma.support_samples(SUP_NODES);
    let values: Vec<Result<f64>> = samples.par_iter().map(|&z| objective_with_degree(model, sigma, z, degree)).collect();
    let mut best = (f64::NEG_INFINITY, C64::new(0.0, 0.0));
    for (v, &z) in values.into_iter().zip(&samples) {
        let v = v?;
        if v > best.0 {
            best = (v, z);
        }
    }
    Ok(best)
}

/// `2 sup_{z ∈ supp σ}` of [`measure_objective`]: an achievable exponent for
/// any atom-free σ.
pub fn measure_exponent<M: NormModel + ?Sized>(model: &M, sigma: &PlanarMeasure) -> Result<ExponentResult> {
    if sigma.has_atoms() {
        return Err(Error::AtomSingularity);
    }
    let (sup, _) = sup_over_support(model, sigma, model.error_degree() as f64)?;
    Ok(ExponentResult { value: 2.0 * sup, method: ExponentMethod::Measure, certificate: Certificate::default() })
}

/// `2 log₂ min_z ‖A(z)‖`, a lower bound on every achievable exponent. Grid
/// search over 64 log-radii and 64 angles, then a Nelder–Mead polish.
pub fn norm_min_lower_bound<M: NormModel + ?Sized>(model: &M) -> ExponentResult {
    norm_min_lower_bound_in(model, RadiusBracket::default())
}

pub fn norm_min_lower_bound_in<M: NormModel + ?Sized>(model: &M, bracket: RadiusBracket) -> ExponentResult {
    let (lo, hi) = (bracket.log2_lo, bracket.log2_hi);
    let f = |p: [f64; 2]| model.log2_norm(C64::from_polar(p[0].clamp(lo, hi).exp2(), p[1]));
    let grid: Vec<([f64; 2], f64)> = (0..64 * 64)
        .into_par_iter()
        .map(|idx| {
            let p = [lo + (hi - lo) * (idx / 64) as f64 / 63.0, TAU * (idx % 64) as f64 / 64.0];
            (p, f(p))
        })
        .collect();
    let start = grid.iter().fold(grid[0], |best, &cand| if cand.1 < best.1 { cand } else { best });
    let (p, value) = nelder_mead_2d(f, start.0, (hi - lo) / 63.0, 1e-13, 4000);
    let (p, value) = if value <= start.1 { (p, value) } else { start };
    let z = C64::from_polar(p[0].clamp(lo, hi).exp2(), p[1]);
    ExponentResult {
        value: 2.0 * value,
        method: ExponentMethod::NormMinimum,
        certificate: Certificate { radius: Some(z.norm()), argmin: Some([z.re, z.im]), ..Default::default() },
    }
}

/// For norms depending only on `|z|`, the uniform circle at the minimizing
/// radius attains the lower bound, so the exponent is `2 log₂ min_r ‖A(r)‖`.
pub fn symmetric_exponent<M: NormModel + ?Sized>(model: &M) -> Result<ExponentResult> {
    symmetric_exponent_in(model, RadiusBracket::default())
}

pub fn symmetric_exponent_in<M: NormModel + ?Sized>(model: &M, bracket: RadiusBracket) -> Result<ExponentResult> {
    if !is_centrally_symmetric(model, 1e-6) {
        return Err(Error::NotSymmetric);
    }
    let (x, value) = bracket.minimize(|x| model.log2_norm(C64::new(x.exp2(), 0.0)), 1e-10);
    Ok(ExponentResult {
        value: 2.0 * value,
        method: ExponentMethod::Symmetric,
        certificate: Certificate { radius: Some(x.exp2()), ..Default::default() },
    })
}

/// `(1/2π) ∫ log₂‖A(Re^{iφ})‖ dφ` by the 512-point periodic trapezoid.
pub fn circle_average<M: NormModel + ?Sized>(model: &M, radius: f64) -> f64 {
    (0..CIRCLE_NODES)
        .map(|j| model.log2_norm(C64::from_polar(radius, TAU * j as f64 / CIRCLE_NODES as f64)))
        .sum::<f64>()
        / CIRCLE_NODES as f64
}

/// `2 inf_R` of the normalized circle average of `log₂‖A‖`.
pub fn circle_average_bound<M: NormModel + ?Sized>(model: &M) -> ExponentResult {
    circle_average_bound_in(model, RadiusBracket::default())
}

pub fn circle_average_bound_in<M: NormModel + ?Sized>(model: &M, bracket: RadiusBracket) -> ExponentResult {
    let (x, value) = bracket.minimize(|x| circle_average(model, x.exp2()), 1e-10);
    ExponentResult {
        value: 2.0 * value,
        method: ExponentMethod::CircleAverage,
        certificate: Certificate { radius: Some(x.exp2()), ..Default::default() },
    }
}

/// Fourier coefficients `Â_m = (1/2π)∫ -ln‖A(Re^{iφ})‖ e^{-imφ} dφ` for
/// `m = 1..=max_mode`.
pub fn log_norm_fourier<M: NormModel + ?Sized>(model: &M, radius: f64, max_mode: usize) -> Vec<C64> {
    let samples: Vec<f64> = (0..CIRCLE_NODES)
        .map(|j| -model.log2_norm(C64::from_polar(radius, TAU * j as f64 / CIRCLE_NODES as f64)) * LN_2)
        .collect();
    (1..=max_mode)
        .map(|m| {
            samples
                .iter()
                .enumerate()
                .map(|(j, &v)| C64::from_polar(v, -TAU * (m * j) as f64 / CIRCLE_NODES as f64))
                .sum::<C64>()
                / CIRCLE_NODES as f64
        })
        .collect()
}

/// Smallest error degree `≥ degree` for which `ρ̂_m = 2|m|Â_m/e` is a valid
/// density (total modulus of nonzero modes at most one).
pub fn padded_degree(coefficients: &[C64], degree: usize) -> usize {
    let need: f64 = 4.0 * coefficients.iter().enumerate().map(|(i, a)| (i + 1) as f64 * a.norm()).sum::<f64>();
    degree.max((need - 1e-12).ceil().max(0.0) as usize)
}

/// Builds the circle density whose logarithmic potential cancels the
/// non-constant Fourier modes of `ln‖A‖` on `|z| = radius` and returns the
/// resulting achievable exponent. Enlarging e (padding with zero terms) is
/// allowed to make the density nonnegative.
pub fn fourier_circle_exponent<M: NormModel + ?Sized>(model: &M, radius: f64, max_mode: usize) -> Result<ExponentResult> {
    let max_mode = max_mode.min(CIRCLE_NODES / 2 - 1);
    let a_hat = log_norm_fourier(model, radius, max_mode);
    let e = padded_degree(&a_hat, model.error_degree().max(1));
    if e > MAX_PADDED_DEGREE {
        return Err(Error::Infeasible(MAX_PADDED_DEGREE));
    }
    let rho: Vec<C64> = a_hat.iter().enumerate().map(|(i, a)| a * (2.0 * (i + 1) as f64 / e as f64)).collect();
    let sigma = PlanarMeasure::new(vec![(1.0, Component::FourierCircle { radius, coefficients: rho.clone() })])
        .map_err(|_| Error::Infeasible(e))?;
    let (sup, _) = sup_over_support(model, &sigma, e as f64)?;
    Ok(ExponentResult {
        value: 2.0 * sup,
        method: ExponentMethod::FourierCircle,
        certificate: Certificate {
            radius: Some(radius),
            padded_degree: Some(e),
            fourier_coefficients: Some(rho.iter().map(|c| [c.re, c.im]).collect()),
            ..Default::default()
        },
    })
}

/// `2e ∬ log₂(1/(w(z)w(t)|z - t|)) dσ dσ` with `w(z) = (‖A(z)‖^{1/e}|z|)^{-1/2}`.
/// The inner integral is exact; the outer one uses `quad_nodes` angles per
/// circle. Bounds the measure exponent of the same σ from below.
pub fn capacity_lower_bound<M: NormModel + ?Sized>(model: &M, sigma: &PlanarMeasure, quad_nodes: usize) -> Result<f64> {
    if sigma.has_atoms() {
        return Err(Error::AtomSingularity);
    }
    let e = model.error_degree() as f64;
    let nodes = sigma.quadrature(quad_nodes);
    let terms: Vec<Result<f64>> = nodes
        .par_iter()
        .map(|&(z, w)| {
            let inner = sigma.log_integral(z)?;
            Ok(w * (2.0 * model.log2_norm(z) * LN_2 + 2.0 * e * z.norm().ln() - 2.0 * e * inner))
        })
        .collect();
    let mut total = 0.0;
    for t in terms {
        total += t?;
    }
    Ok(total / LN_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degeneration::{from_combinatorial, library, Degeneration};
    use crate::quadrature::log_kernel_coefficient;

    fn combinatorial() -> Degeneration {
        from_combinatorial(&library::ghz_to_w_combinatorial()).unwrap().0
    }

    /// `log₂‖A(z)‖ = 1 + cos(arg z) + |log₂|z||` with error degree 1.
    struct Wobble;

    impl NormModel for Wobble {
        fn log2_norm(&self, z: C64) -> f64 {
            1.0 + z.arg().cos() + z.norm().log2().abs()
        }
        fn error_degree(&self) -> usize {
            1
        }
    }

    struct Constant(f64, usize);

    impl NormModel for Constant {
        fn log2_norm(&self, _: C64) -> f64 {
            self.0.log2()
        }
        fn error_degree(&self) -> usize {
            self.1
        }
    }

    #[test]
    fn symmetry_detection() {
        assert!(is_centrally_symmetric(&combinatorial(), 1e-9));
        assert!(is_centrally_symmetric(&library::ghz_to_w(3).unwrap(), 1e-9));
        assert!(!is_centrally_symmetric(&Wobble, 1e-6));
        assert_eq!(symmetric_exponent(&Wobble).unwrap_err(), Error::NotSymmetric);
    }

    #[test]
    fn measure_objective_examples() {
        let circle = PlanarMeasure::uniform_circle(1.0).unwrap();
        for z in [C64::new(0.2, 0.1), C64::new(0.0, 1.0), C64::new(-0.5, 0.5)] {
            assert!((measure_objective(&Constant(3.0, 2), &circle, z).unwrap() - 3f64.log2()).abs() < 1e-14);
        }
        let deg = combinatorial();
        let v = measure_objective(&deg, &circle, C64::from_polar(1.0, 0.3)).unwrap();
        assert!((v - (2.0 / 3f64.sqrt()).log2()).abs() < 1e-12);
        let atom = PlanarMeasure::atom(C64::new(1.0, 0.0)).unwrap();
        let z = C64::new(2.0, 0.0);
        assert!((measure_objective(&deg, &atom, z).unwrap() - deg.log2_norm(z)).abs() < 1e-12);
        assert_eq!(measure_objective(&deg, &atom, C64::new(1.0, 0.0)), Err(Error::AtomSingularity));
    }

    #[test]
    fn measure_objective_rotation_invariance() {
        let deg = combinatorial();
        let sigma = PlanarMeasure::new(vec![
            (0.6, Component::FourierCircle { radius: 1.2, coefficients: vec![C64::new(0.1, 0.2), C64::new(-0.1, 0.05)] }),
            (0.4, Component::UniformCircle { radius: 0.8 }),
        ])
        .unwrap();
        let z = C64::new(0.3, 0.9);
        let angle = 0.77;
        let a = measure_objective(&deg, &sigma, z).unwrap();
        let b = measure_objective(&deg, &sigma.rotated(angle), z * C64::from_polar(1.0, angle)).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn combinatorial_lower_bound_and_symmetric_value() {
        let deg = combinatorial();
        let want = 2.0 * (2.0 / 3f64.sqrt()).log2();
        let lb = norm_min_lower_bound(&deg);
        assert!((lb.value - want).abs() < 1e-9, "{}", lb.value);
        let sym = symmetric_exponent(&deg).unwrap();
        assert!((sym.value - want).abs() < 1e-9);
        assert!((sym.certificate.radius.unwrap() - 1.0).abs() < 1e-6);
        assert!(norm_min_lower_bound(&Constant(1.0, 1)).value.abs() < 1e-15);
    }

    #[test]
    fn circle_average_of_wobble() {
        let r = circle_average_bound(&Wobble);
        assert!((r.value - 2.0).abs() < 1e-8);
        assert!((r.certificate.radius.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn kernel_coefficients() {
        for m in 1..=16 {
            let c = log_kernel_coefficient(m);
            assert!((c - 1.0 / (2.0 * m as f64)).abs() < 1e-9, "m={m}: {c}");
        }
        assert!(log_kernel_coefficient(0).abs() < 1e-9);
    }

    #[test]
    fn fourier_padding_for_wobble() {
        let a = log_norm_fourier(&Wobble, 1.0, 8);
        assert!((a[0] - C64::new(-LN_2 / 2.0, 0.0)).norm() < 1e-12);
        assert!(a[1..].iter().all(|c| c.norm() < 1e-12));
        // |ρ̂_1| + |ρ̂_{-1}| = 2 ln 2 / e is above one at e = 1.
        assert_eq!(padded_degree(&a, 1), 2);
        let r = fourier_circle_exponent(&Wobble, 1.0, 8).unwrap();
        assert_eq!(r.certificate.padded_degree, Some(2));
        assert!((r.value - 2.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn fourier_on_symmetric_matches_circle_average() {
        let deg = library::ghz_to_w(3).unwrap();
        let avg = circle_average_bound(&deg);
        let f = fourier_circle_exponent(&deg, avg.certificate.radius.unwrap(), 32).unwrap();
        assert!((f.value - avg.value).abs() < 1e-6);
    }

    #[test]
    fn capacity_bounds() {
        let circle = PlanarMeasure::uniform_circle(1.0).unwrap();
        let c = capacity_lower_bound(&Constant(3.0, 2), &circle, 256).unwrap();
        assert!((c - 2.0 * 3f64.log2()).abs() < 1e-12);
        let deg = combinatorial();
        let sym = symmetric_exponent(&deg).unwrap().value;
        let cap = capacity_lower_bound(&deg, &circle, 256).unwrap();
        assert!(cap <= sym + 1e-6 && cap >= sym - 1e-3, "{cap} vs {sym}");
        let sup = measure_exponent(&deg, &circle).unwrap().value;
        assert!(cap <= sup + 1e-6);
    }
}
