//! Probability measures on the plane built from circles, disks and atoms,
//! with closed-form logarithmic integrals. Logarithms here are natural.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::C64;

/// One piece of a [`PlanarMeasure`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Component {
    /// Normalized arc length on `|t| = radius`.
    UniformCircle { radius: f64 },
    /// Density `1 + Σ_{m≠0} ρ̂_m e^{imθ}` against `dθ/2π` on `|t| = radius`,
    /// with `coefficients[m-1] = ρ̂_m` and `ρ̂_{-m} = conj(ρ̂_m)`.
    FourierCircle { radius: f64, coefficients: Vec<C64> },
    /// Normalized area on `|t| ≤ radius`.
    UniformDisk { radius: f64 },
    Atom { point: C64 },
}

impl Component {
    /// `∫ ln|z - t| dμ(t)` for this component alone.
    fn log_integral(&self, z: C64) -> Result<f64> {
        let s = z.norm();
        Ok(match self {
            Component::UniformCircle { radius } => circle_log_integral(*radius, z),
            Component::FourierCircle { radius, coefficients } => {
                let r = *radius;
                let q = if s == 0.0 { 0.0 } else { s.min(r) / s.max(r) };
                let alpha = z.arg();
                let mut series = 0.0;
                let mut qm = 1.0;
                for (idx, rho) in coefficients.iter().enumerate() {
                    let m = (idx + 1) as f64;
                    qm *= q;
                    if qm == 0.0 {
                        break;
                    }
                    series += qm * (rho * C64::from_polar(1.0, m * alpha)).re / m;
                }
                s.max(r).ln() - series
            }
            Component::UniformDisk { radius } => {
                let r = *radius;
                if s >= r {
                    s.ln()
                } else {
                    r.ln() - (r * r - s * s) / (2.0 * r * r)
                }
            }
            Component::Atom { point } => {
                let d = (z - point).norm();
                if d == 0.0 {
                    return Err(Error::AtomSingularity);
                }
                d.ln()
            }
        })
    }

    /// `∫ ln|t| dμ(t)`.
    fn log_modulus_mean(&self) -> f64 {
        match self {
            Component::UniformCircle { radius } | Component::FourierCircle { radius, .. } => radius.ln(),
            Component::UniformDisk { radius } => radius.ln() - 0.5,
            Component::Atom { point } => point.norm().ln(),
        }
    }

    fn distance_to_support(&self, z: C64) -> f64 {
        match self {
            Component::UniformCircle { radius } | Component::FourierCircle { radius, .. } => (z.norm() - radius).abs(),
            Component::UniformDisk { radius } => (z.norm() - radius).max(0.0),
            Component::Atom { point } => (z - point).norm(),
        }
    }

    /// Points of the support, `n` per circle, a polar grid for disks.
    fn support_samples(&self, n: usize) -> Vec<C64> {
        match self {
            Component::UniformCircle { radius } | Component::FourierCircle { radius, .. } => {
                (0..n).map(|j| C64::from_polar(*radius, TAU * j as f64 / n as f64)).collect()
            }
            Component::UniformDisk { radius } => {
                let rings = (n / 8).max(2);
                (0..=rings)
                    .flat_map(|i| {
                        let r = radius * i as f64 / rings as f64;
                        (0..n).map(move |j| C64::from_polar(r, TAU * j as f64 / n as f64))
                    })
                    .collect()
            }
            Component::Atom { point } => vec![*point],
        }
    }

    /// Quadrature nodes and weights (summing to 1) for integrating against
    /// this component: `n` angles on circles, `n` angles times midpoint
    /// rings in `r²` on disks.
    pub fn quadrature(&self, n: usize) -> Vec<(C64, f64)> {
        match self {
            Component::UniformCircle { radius } => (0..n)
                .map(|j| (C64::from_polar(*radius, TAU * j as f64 / n as f64), 1.0 / n as f64))
                .collect(),
            Component::FourierCircle { radius, .. } => (0..n)
                .map(|j| {
                    let theta = TAU * j as f64 / n as f64;
                    (C64::from_polar(*radius, theta), self.fourier_density(theta) / n as f64)
                })
                .collect(),
            Component::UniformDisk { radius } => {
                let rings = (n / 4).max(4);
                let mut out = Vec::with_capacity(rings * n);
                for i in 0..rings {
                    let r = radius * ((i as f64 + 0.5) / rings as f64).sqrt();
                    for j in 0..n {
                        let theta = TAU * (j as f64 + 0.5 * (i % 2) as f64) / n as f64;
                        out.push((C64::from_polar(r, theta), 1.0 / (rings * n) as f64));
                    }
                }
                out
            }
            Component::Atom { point } => vec![(*point, 1.0)],
        }
    }

    fn fourier_density(&self, theta: f64) -> f64 {
        match self {
            Component::FourierCircle { coefficients, .. } => {
                1.0 + 2.0
                    * coefficients
                        .iter()
                        .enumerate()
                        .map(|(i, rho)| (rho * C64::from_polar(1.0, (i + 1) as f64 * theta)).re)
                        .sum::<f64>()
            }
            _ => 1.0,
        }
    }

    fn rotated(&self, angle: f64) -> Self {
        match self {
            Component::FourierCircle { radius, coefficients } => Component::FourierCircle {
                radius: *radius,
                coefficients: coefficients
                    .iter()
                    .enumerate()
                    .map(|(i, rho)| rho * C64::from_polar(1.0, -((i + 1) as f64) * angle))
                    .collect(),
            },
            Component::Atom { point } => Component::Atom { point: point * C64::from_polar(1.0, angle) },
            other => other.clone(),
        }
    }

    fn is_atom(&self) -> bool {
        matches!(self, Component::Atom { .. })
    }
}

/// The `1/2π`-normalized circle integral `∫ ln|z - ρe^{iθ}| dθ/2π = ln max(|z|, ρ)`.
pub fn circle_log_integral(radius: f64, z: C64) -> f64 {
    z.norm().max(radius).ln()
}

/// Finite mixture of [`Component`]s with weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanarMeasure {
    components: Vec<(f64, Component)>,
}

impl PlanarMeasure {
    pub fn new(components: Vec<(f64, Component)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidMeasure("no components".into()));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if components.iter().any(|(w, _)| !(*w >= 0.0)) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure(format!("weights must be nonnegative and sum to 1, got {total}")));
        }
        for (_, c) in &components {
            match c {
                Component::UniformCircle { radius } | Component::UniformDisk { radius } if !(*radius > 0.0) => {
                    return Err(Error::InvalidMeasure("radius must be positive".into()));
                }
                Component::FourierCircle { radius, coefficients } => {
                    if !(*radius > 0.0) {
                        return Err(Error::InvalidMeasure("radius must be positive".into()));
                    }
                    let mass: f64 = 2.0 * coefficients.iter().map(|c| c.norm()).sum::<f64>();
                    if mass > 1.0 + 1e-12 {
                        return Err(Error::InvalidMeasure(format!("Fourier coefficients have total modulus {mass} > 1")));
                    }
                }
                Component::Atom { point } if !(point.re.is_finite() && point.im.is_finite()) => {
                    return Err(Error::NonFinite("atom location"));
                }
                _ => {}
            }
        }
        Ok(Self { components })
    }

    pub fn uniform_circle(radius: f64) -> Result<Self> {
        Self::new(vec![(1.0, Component::UniformCircle { radius })])
    }

    pub fn atom(point: C64) -> Result<Self> {
        Self::new(vec![(1.0, Component::Atom { point })])
    }

    /// Equal-weight atoms at the given points.
    pub fn counting(points: &[C64]) -> Result<Self> {
        let w = 1.0 / points.len() as f64;
        Self::new(points.iter().map(|&p| (w, Component::Atom { point: p })).collect())
    }

    pub fn components(&self) -> &[(f64, Component)] {
        &self.components
    }

    pub fn has_atoms(&self) -> bool {
        self.components.iter().any(|(w, c)| *w > 0.0 && c.is_atom())
    }

    /// `∫ ln|z - t| dσ(t)`.
    pub fn log_integral(&self, z: C64) -> Result<f64> {
        let mut total = 0.0;
        for (w, c) in &self.components {
            if *w > 0.0 {
                total += w * c.log_integral(z)?;
            }
        }
        Ok(total)
    }

    /// `∫ ln|t| dσ(t)`.
    pub fn log_modulus_mean(&self) -> f64 {
        self.components.iter().filter(|(w, _)| *w > 0.0).map(|(w, c)| w * c.log_modulus_mean()).sum()
    }

    pub fn distance_to_support(&self, z: C64) -> f64 {
        self.components
            .iter()
            .filter(|(w, _)| *w > 0.0)
            .map(|(_, c)| c.distance_to_support(z))
            .fold(f64::INFINITY, f64::min)
    }

    /// Sample points covering the support.
    pub fn support_samples(&self, n: usize) -> Vec<C64> {
        self.components
            .iter()
            .filter(|(w, _)| *w > 0.0)
            .flat_map(|(_, c)| c.support_samples(n))
            .collect()
    }

    /// Quadrature nodes for `∫ f dσ` with weights summing to one.
    pub fn quadrature(&self, n: usize) -> Vec<(C64, f64)> {
        self.components
            .iter()
            .filter(|(w, _)| *w > 0.0)
            .flat_map(|(w, c)| c.quadrature(n).into_iter().map(move |(z, q)| (z, w * q)))
            .collect()
    }

    /// The push-forward under `t ↦ e^{i angle} t`.
    pub fn rotated(&self, angle: f64) -> Self {
        Self { components: self.components.iter().map(|(w, c)| (*w, c.rotated(angle))).collect() }
    }
}
