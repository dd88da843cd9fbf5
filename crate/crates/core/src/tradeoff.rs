//! Converting only a fraction R of the copies. Each party applies the
//! two-outcome instrument `{A_j/‖A_j‖, √(I - A_j*A_j/‖A_j‖²)}` and the flag
//! strings `b ∈ {0,1}^k` split ψ into branches whose squared norms sum to one.
//! Branch `1…1` carries the degeneration; the others are discarded.
//!
//! Flag strings are stored as bit masks with bit j set when party j (0-based)
//! applied the rescaled map.

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::Serialize;

use crate::degeneration::{Degeneration, NormModel};
use crate::error::{Error, Result};
use crate::exponent::{is_centrally_symmetric, SUP_NODES};
use crate::linalg::{hermitian_sqrt, operator_norm, CMatrix, C64};
use crate::measure::PlanarMeasure;
use crate::optimize::RadiusBracket;
use crate::state::tensor_apply;

/// `-R log₂ R - (1-R) log₂(1-R)`, with `0 log 0 = 0`.
pub fn binary_entropy(rate: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(rate) + term(1.0 - rate)
}

/// `D(P‖Q) = Σ P log₂(P/Q)` for finitely supported P and a nonnegative Q
/// (not necessarily normalized).
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::ShapeMismatch(format!("{} vs {} outcomes", p.len(), q.len())));
    }
    let mut total = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return Err(Error::AbsoluteContinuityViolated);
        }
        total += pi * (pi / qi).log2();
    }
    Ok(total)
}

/// Binary divergence `d(q‖p)`.
pub fn bernoulli_divergence(q: f64, p: f64) -> Result<f64> {
    kl_divergence(&[q, 1.0 - q], &[p, 1.0 - p])
}

/// Bit string for a flag mask, party 1 first.
pub fn flag_string(mask: usize, k: usize) -> String {
    (0..k).map(|j| if mask >> j & 1 == 1 { '1' } else { '0' }).collect()
}

/// Per party: (rescaled map, Kraus complement).
fn instrument(deg: &Degeneration, z: C64) -> Result<Vec<(CMatrix, CMatrix)>> {
    deg.eval(z)?
        .into_iter()
        .map(|a| {
            let norm = operator_norm(&a);
            let one = a.scale(C64::new(1.0 / norm, 0.0));
            let gram = one.adjoint().matmul(&one)?;
            let zero = hermitian_sqrt(&CMatrix::identity(gram.rows()).sub(&gram)?)?;
            Ok((one, zero))
        })
        .collect()
}

/// `‖ψ_b(z)‖²` for every flag mask `b`.
pub fn branch_norms(deg: &Degeneration, z: C64) -> Result<Vec<f64>> {
    let ops = instrument(deg, z)?;
    let k = deg.k();
    let psi = deg.psi();
    (0..1usize << k)
        .map(|mask| {
            let maps: Vec<&CMatrix> = (0..k).map(|j| if mask >> j & 1 == 1 { &ops[j].0 } else { &ops[j].1 }).collect();
            let (_, out) = tensor_apply(&maps, psi.dims(), psi.amplitudes())?;
            Ok(out.iter().map(|a| a.norm_sqr()).sum())
        })
        .collect()
}

/// `‖(⊗ A_j(z)) ψ‖² / ‖A(z)‖²`, the all-ones branch.
pub fn success_branch(deg: &Degeneration, z: C64) -> Result<f64> {
    let maps = deg.eval(z)?;
    let norm: f64 = maps.iter().map(operator_norm).product();
    let refs: Vec<&CMatrix> = maps.iter().collect();
    let (_, out) = tensor_apply(&refs, deg.psi().dims(), deg.psi().amplitudes())?;
    Ok(out.iter().map(|a| a.norm_sqr()).sum::<f64>() / (norm * norm))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TradeoffMethod {
    SymmetricClosedForm,
    FixedP,
    TimeSharing,
}

/// A point `(R, r)` of the rate/exponent plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateExponentPoint {
    pub rate: f64,
    /// Bits per copy.
    pub exponent: f64,
    pub method: TradeoffMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

/// Flag statistics: probability `rate` of `1…1` and the conditional law of
/// the other strings, indexed by mask (the all-ones entry must be zero).
#[derive(Debug, Clone, PartialEq)]
pub struct FlagDistribution {
    pub rate: f64,
    pub cond: Vec<f64>,
}

impl FlagDistribution {
    pub fn new(rate: f64, cond: Vec<f64>) -> Result<Self> {
        if !(0.0..=1.0).contains(&rate) {
            return Err(Error::InvalidInput(format!("rate {rate} outside [0, 1]")));
        }
        if !cond.len().is_power_of_two() || cond.len() < 2 {
            return Err(Error::ShapeMismatch("conditional law must cover all flag strings".into()));
        }
        if cond.iter().any(|&p| !(p >= 0.0)) || cond[cond.len() - 1] != 0.0 {
            return Err(Error::InvalidInput("conditional law must be nonnegative and vanish on 1…1".into()));
        }
        let total: f64 = cond.iter().sum();
        if rate < 1.0 && (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("conditional law sums to {total}")));
        }
        Ok(Self { rate, cond })
    }

    /// Uniform over the `2^k - 1` discarded strings.
    pub fn uniform(rate: f64, k: usize) -> Result<Self> {
        let n = 1usize << k;
        let mut cond = vec![1.0 / (n - 1) as f64; n];
        cond[n - 1] = 0.0;
        Self::new(rate, cond)
    }
}

/// `P_cond ∝ ‖ψ_b(z)‖²` over the discarded strings, the optimal choice at a
/// fixed z.
pub fn branch_proportional_distribution(deg: &Degeneration, rate: f64, z: C64) -> Result<FlagDistribution> {
    let mut q = branch_norms(deg, z)?;
    let last = q.len() - 1;
    q[last] = 0.0;
    let total: f64 = q.iter().sum();
    if !(total > 0.0) {
        return Err(Error::SupportMismatch);
    }
    FlagDistribution::new(rate, q.iter().map(|v| v / total).collect())
}

/// Symmetric closed form, precomputing the symmetry checks once.
pub struct SymmetricTradeoff<'a> {
    deg: &'a Degeneration,
    bracket: RadiusBracket,
}

impl<'a> SymmetricTradeoff<'a> {
    /// Requires the product norm and every branch norm to depend on `|z|` only.
    pub fn new(deg: &'a Degeneration) -> Result<Self> {
        if !is_centrally_symmetric(deg, 1e-6) || !branches_symmetric(deg)? {
            return Err(Error::NotSymmetric);
        }
        Ok(Self { deg, bracket: RadiusBracket::default() })
    }

    pub fn with_bracket(self, bracket: RadiusBracket) -> Self {
        Self { bracket, ..self }
    }

    fn failure_log(&self, radius: f64) -> f64 {
        let b = success_branch(self.deg, C64::new(radius, 0.0)).unwrap_or(1.0);
        (1.0 - b).max(0.0).log2()
    }

    /// `-h(R) + inf_r [2R log₂‖A(r)‖ - (1-R) log₂(1 - ‖ψ_{1…1}(r)‖²)]`.
    pub fn exponent(&self, rate: f64) -> Result<RateExponentPoint> {
        if rate == 0.0 {
            return Err(Error::DegenerateRate);
        }
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::InvalidInput(format!("rate {rate} outside (0, 1]")));
        }
        let f = |x: f64| {
            let r = x.exp2();
            let norm_term = 2.0 * rate * self.deg.log2_norm(C64::new(r, 0.0));
            if rate == 1.0 {
                norm_term
            } else {
                norm_term - (1.0 - rate) * self.failure_log(r)
            }
        };
        let (x, value) = self.bracket.minimize(f, 1e-10);
        Ok(RateExponentPoint {
            rate,
            exponent: value - binary_entropy(rate),
            method: TradeoffMethod::SymmetricClosedForm,
            radius: Some(x.exp2()),
        })
    }

    /// `-sup_r log₂(‖A(r)‖^{-2} + 1 - ‖ψ_{1…1}(r)‖²)`, the exponent optimized
    /// jointly over the rate.
    pub fn best_exponent(&self) -> (f64, f64) {
        let f = |x: f64| {
            let r = x.exp2();
            let a = -2.0 * self.deg.log2_norm(C64::new(r, 0.0));
            let b = self.failure_log(r);
            let m = a.max(b);
            -(m + ((a - m).exp2() + (b - m).exp2()).log2())
        };
        let (x, value) = self.bracket.minimize(f, 1e-10);
        (value, x.exp2())
    }

    /// Curve over a rate grid plus the time-sharing line `R · r(1)`.
    /// `R = 0` is reported as `r = 0`, the limit of the closed form.
    pub fn curve(&self, rates: &[f64]) -> Result<TradeoffCurve> {
        let full = self.exponent(1.0)?.exponent;
        let points = rates
            .par_iter()
            .map(|&rate| {
                if rate == 0.0 {
                    Ok(RateExponentPoint { rate, exponent: 0.0, method: TradeoffMethod::SymmetricClosedForm, radius: None })
                } else {
                    self.exponent(rate)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let baseline = rates
            .iter()
            .map(|&rate| RateExponentPoint { rate, exponent: rate * full, method: TradeoffMethod::TimeSharing, radius: None })
            .collect();
        Ok(TradeoffCurve { points, baseline })
    }
}

fn branches_symmetric(deg: &Degeneration) -> Result<bool> {
    for a in 0..8 {
        let r = (-4.0 + 8.0 * a as f64 / 7.0).exp2();
        let base = branch_norms(deg, C64::new(r, 0.0))?;
        for b in 1..16 {
            let other = branch_norms(deg, C64::from_polar(r, std::f64::consts::TAU * b as f64 / 16.0))?;
            if base.iter().zip(&other).any(|(x, y)| (x - y).abs() > 1e-6) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn symmetric_tradeoff_exponent(deg: &Degeneration, rate: f64) -> Result<RateExponentPoint> {
    SymmetricTradeoff::new(deg)?.exponent(rate)
}

pub fn best_exponent_over_rate(deg: &Degeneration) -> Result<f64> {
    Ok(SymmetricTradeoff::new(deg)?.best_exponent().0)
}

/// Evaluates the exponent for a fixed flag law and measure:
/// `-h(R) + sup_{z∈supp σ} [2R log₂‖A(z)‖ + 2Re ∫ log₂(|t|/|z-t|) dσ + (1-R) D(P_cond ‖ ‖ψ_b(z)‖²)]`.
pub fn fixed_p_exponent(deg: &Degeneration, dist: &FlagDistribution, sigma: &PlanarMeasure) -> Result<RateExponentPoint> {
    let k = deg.k();
    if dist.cond.len() != 1 << k {
        return Err(Error::ShapeMismatch(format!("flag law over {} strings for {k} parties", dist.cond.len())));
    }
    if sigma.has_atoms() {
        return Err(Error::AtomSingularity);
    }
    let rate = dist.rate;
    let e = deg.error_degree() as f64;
    let log_t = sigma.log_modulus_mean();
    let samples = sigma.support_samples(SUP_NODES);
    let values: Vec<Result<f64>> = samples
        .par_iter()
        .map(|&z| {
            let mut value = 2.0 * rate * deg.log2_norm(z) + 2.0 * rate * e * (log_t - sigma.log_integral(z)?) / LN_2;
            if rate < 1.0 {
                let mut q = branch_norms(deg, z)?;
                let last = q.len() - 1;
                q[last] = 0.0;
                let d = kl_divergence(&dist.cond, &q).map_err(|_| Error::SupportMismatch)?;
                value += (1.0 - rate) * d;
            }
            Ok(value)
        })
        .collect();
    let mut sup = f64::NEG_INFINITY;
    for v in values {
        sup = sup.max(v?);
    }
    Ok(RateExponentPoint { rate, exponent: sup - binary_entropy(rate), method: TradeoffMethod::FixedP, radius: None })
}

#[derive(Debug, Clone, Serialize)]
pub struct TradeoffCurve {
    pub points: Vec<RateExponentPoint>,
    pub baseline: Vec<RateExponentPoint>,
}

pub fn tradeoff_curve(deg: &Degeneration, rates: &[f64]) -> Result<TradeoffCurve> {
    SymmetricTradeoff::new(deg)?.curve(rates)
}

/// `R_i = i / count` for `i = 1..=count`.
pub fn rate_grid(count: usize) -> Vec<f64> {
    (1..=count).map(|i| i as f64 / count as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degeneration::{from_combinatorial, library};

    fn combinatorial() -> Degeneration {
        from_combinatorial(&library::ghz_to_w_combinatorial()).unwrap().0
    }

    #[test]
    fn entropy_and_divergence() {
        assert_eq!(binary_entropy(0.5), 1.0);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        let p = [0.2, 0.3, 0.5];
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        let d = bernoulli_divergence(0.5, 0.25).unwrap();
        assert!((d - (0.5 + 0.5 * (2.0f64 / 3.0).log2())).abs() < 1e-15);
        assert!((d - 0.2075).abs() < 1e-4);
        assert_eq!(kl_divergence(&[0.5, 0.5], &[1.0, 0.0]), Err(Error::AbsoluteContinuityViolated));
    }

    #[test]
    fn branches_sum_to_one() {
        let deg = library::ghz_to_w(3).unwrap();
        for z in [C64::new(0.3, 0.4), C64::new(2.0, -1.0), C64::new(1.0, 0.0)] {
            let total: f64 = branch_norms(&deg, z).unwrap().iter().sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn combinatorial_branches() {
        let deg = combinatorial();
        let at_one = branch_norms(&deg, C64::new(0.0, 1.0)).unwrap();
        assert!((at_one[7] - 1.0).abs() < 1e-12);
        assert!(at_one[..7].iter().all(|&v| v.abs() < 1e-12));
        for r in [0.3f64, 0.7, 0.95] {
            let b = branch_norms(&deg, C64::from_polar(r, 1.1)).unwrap();
            let want = 0.75 * r.powi(6) + 0.25 * r.powi(18);
            assert!((b[7] - want).abs() < 1e-12);
            assert!((success_branch(&deg, C64::new(r, 0.0)).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn full_rate_recovers_symmetric_exponent() {
        let deg = combinatorial();
        let p = symmetric_tradeoff_exponent(&deg, 1.0).unwrap();
        assert!((p.exponent - (4.0f64 / 3.0).log2()).abs() < 1e-6);
        assert_eq!(symmetric_tradeoff_exponent(&deg, 0.0).unwrap_err(), Error::DegenerateRate);
    }

    #[test]
    fn fixed_p_reproduces_closed_form_at_optimum() {
        let deg = combinatorial();
        for rate in [0.3, 0.7] {
            let sym = symmetric_tradeoff_exponent(&deg, rate).unwrap();
            let r = sym.radius.unwrap();
            let dist = branch_proportional_distribution(&deg, rate, C64::new(r, 0.0)).unwrap();
            let circle = PlanarMeasure::uniform_circle(r).unwrap();
            let fixed = fixed_p_exponent(&deg, &dist, &circle).unwrap();
            assert!((fixed.exponent - sym.exponent).abs() < 1e-6, "{} vs {}", fixed.exponent, sym.exponent);
            let uniform = fixed_p_exponent(&deg, &FlagDistribution::uniform(rate, 3).unwrap(), &circle).unwrap();
            assert!(uniform.exponent >= sym.exponent - 1e-9);
        }
    }

    #[test]
    fn fixed_p_support_mismatch_on_unit_circle() {
        let deg = combinatorial();
        let circle = PlanarMeasure::uniform_circle(1.0).unwrap();
        let dist = FlagDistribution::uniform(0.5, 3).unwrap();
        assert_eq!(fixed_p_exponent(&deg, &dist, &circle).unwrap_err(), Error::SupportMismatch);
    }

    #[test]
    fn best_exponent_is_zero_for_combinatorial() {
        let v = best_exponent_over_rate(&combinatorial()).unwrap();
        assert!(v.abs() < 1e-6);
    }

    #[test]
    fn asymmetric_rejected() {
        let one = C64::new(1.0, 0.0);
        let map = crate::laurent::LaurentMatrix::new(
            2,
            2,
            [(0, CMatrix::identity(2)), (1, CMatrix::diag(&[one, C64::new(0.0, 0.0)]).unwrap())],
        )
        .unwrap();
        let psi = crate::state::MultipartiteState::basis(vec![2], &[1]).unwrap();
        let deg = Degeneration::new(vec![map], psi.clone(), psi, 1e-9).unwrap();
        assert!(matches!(SymmetricTradeoff::new(&deg), Err(Error::NotSymmetric)));
    }
}
