//! Weighted Fekete points and the measure-side quantities they are compared
//! against. Values are in bits unless a name says otherwise.
//!
//! The finite-n quantity is
//! `δ_n = (1/n) log₂ max_{z_0..z_n ∈ K} min_i Π_{l≠i} |z_i - z_l| w₁(z_i) w₂(z_l)`
//! and the measure side is `inf_{z ∈ supp σ} ∫ log₂(|z - t| w₁(z) w₂(t)) dσ(t)`.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, TAU};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::degeneration::NormModel;
use crate::error::{Error, Result};
use crate::finiten::PointConfiguration;
use crate::linalg::{cholesky, cholesky_solve, CMatrix, C64};
use crate::measure::PlanarMeasure;

/// Pairwise distances are floored here before taking logarithms.
pub const DISTANCE_FLOOR: f64 = 1e-300;
pub const MAX_EXCHANGE_PASSES: usize = 100;
/// Samples per component when integrating against a measure.
const MEASURE_NODES: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridResolution {
    pub radii: usize,
    pub angles: usize,
}

impl Default for GridResolution {
    fn default() -> Self {
        Self { radii: 128, angles: 256 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CompactDomain {
    Annulus { inner: f64, outer: f64 },
    Disk { radius: f64 },
    Circle { radius: f64 },
    /// An explicit finite set, used as is.
    Points(Vec<C64>),
}

impl CompactDomain {
    /// Candidate points: log-spaced radii times equispaced angles. Disks start
    /// at `radius / 2⁶` so that `0` is never a candidate.
    pub fn grid(&self, res: GridResolution) -> Result<Vec<C64>> {
        let polar = |lo: f64, hi: f64, radii: usize| -> Vec<C64> {
            let step = if radii > 1 { (hi / lo).ln() / (radii - 1) as f64 } else { 0.0 };
            (0..radii)
                .flat_map(|i| {
                    let r = lo * (step * i as f64).exp();
                    (0..res.angles).map(move |j| C64::from_polar(r, TAU * j as f64 / res.angles as f64))
                })
                .collect()
        };
        match *self {
            CompactDomain::Annulus { inner, outer } => {
                if !(inner > 0.0 && inner <= outer && outer.is_finite()) {
                    return Err(Error::InvalidInput(format!("annulus [{inner}, {outer}]")));
                }
                Ok(polar(inner, outer, if inner == outer { 1 } else { res.radii }))
            }
            CompactDomain::Disk { radius } => {
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(Error::InvalidInput(format!("disk radius {radius}")));
                }
                Ok(polar(radius / 64.0, radius, res.radii))
            }
            CompactDomain::Circle { radius } => {
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(Error::InvalidInput(format!("circle radius {radius}")));
                }
                Ok(polar(radius, radius, 1))
            }
            CompactDomain::Points(ref points) => Ok(points.clone()),
        }
    }
}

type LogWeight = Arc<dyn Fn(C64) -> f64 + Send + Sync>;

/// Natural logarithms of the two weights `w₁, w₂`.
#[derive(Clone)]
pub struct WeightPair {
    log_w1: LogWeight,
    log_w2: LogWeight,
}

impl fmt::Debug for WeightPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("WeightPair")
    }
}

impl WeightPair {
    /// From positive weight functions.
    pub fn new(
        w1: impl Fn(C64) -> f64 + Send + Sync + 'static,
        w2: impl Fn(C64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::from_log(move |z| w1(z).ln(), move |t| w2(t).ln())
    }

    /// From natural-log weights, for weights that would overflow.
    pub fn from_log(
        log_w1: impl Fn(C64) -> f64 + Send + Sync + 'static,
        log_w2: impl Fn(C64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { log_w1: Arc::new(log_w1), log_w2: Arc::new(log_w2) }
    }

    pub fn trivial() -> Self {
        Self::from_log(|_| 0.0, |_| 0.0)
    }

    /// `w₁(z) = ‖A(z)‖^{-1/e}`, `w₂(t) = 1/|t|`, which turns the max-min
    /// objective into the finite-n exponent.
    pub fn from_norm_model<M: NormModel + Send + 'static>(model: M) -> Result<Self> {
        let e = model.error_degree();
        if e == 0 {
            return Err(Error::InvalidInput("weights need a positive error degree".into()));
        }
        Ok(Self::from_log(move |z| -model.log2_norm(z) * LN_2 / e as f64, |t| -t.norm().ln()))
    }

    pub fn log_w1(&self, z: C64) -> f64 {
        (self.log_w1)(z)
    }

    pub fn log_w2(&self, t: C64) -> f64 {
        (self.log_w2)(t)
    }
}

#[derive(Debug, Clone)]
pub struct FeketeResult {
    pub points: PointConfiguration,
    /// `δ_n` in bits.
    pub delta_n: f64,
    pub n: usize,
    pub exchange_passes: usize,
}

fn log_dist(a: C64, b: C64) -> f64 {
    (a - b).norm().max(DISTANCE_FLOOR).ln()
}

/// Scores within this many nats count as equal, so ties are broken by grid
/// order rather than rounding noise.
const TIE_TOL: f64 = 1e-10;

/// First index whose score is within `TIE_TOL` of the maximum.
fn first_near_max(scores: impl Iterator<Item = f64> + Clone) -> Option<usize> {
    let best = scores.clone().fold(f64::NEG_INFINITY, f64::max);
    scores.into_iter().position(|v| v >= best - TIE_TOL && v > f64::NEG_INFINITY)
}

/// Row sums `S_i = Σ_{l≠i} ln(|z_i - z_l| w₁(z_i) w₂(z_l))`.
fn row_sums(points: &[C64], lw1: &[f64], lw2: &[f64]) -> Vec<f64> {
    (0..points.len())
        .map(|i| {
            (0..points.len())
                .filter(|&l| l != i)
                .map(|l| log_dist(points[i], points[l]) + lw1[i] + lw2[l])
                .sum()
        })
        .collect()
}

/// Each new point maximizes its own weighted product against the points
/// already chosen.
fn greedy_seed(cand: &[C64], cw1: &[f64], cw2: &[f64], n: usize) -> Vec<usize> {
    let mut acc = vec![0.0; cand.len()];
    let mut taken = vec![false; cand.len()];
    let first = first_near_max((0..cand.len()).map(|c| cw1[c] + cw2[c])).expect("nonempty grid");
    let mut chosen = vec![first];
    taken[first] = true;
    while chosen.len() <= n {
        let z = cand[*chosen.last().expect("nonempty")];
        acc.par_iter_mut().zip(cand).for_each(|(a, &c)| *a += log_dist(c, z));
        let m = chosen.len() as f64;
        let next = first_near_max((0..cand.len()).map(|c| if taken[c] { f64::NEG_INFINITY } else { acc[c] + m * cw1[c] }))
            .expect("grid larger than n");
        taken[next] = true;
        chosen.push(next);
    }
    chosen
}

/// Max-min weighted Fekete configuration of `n + 1` points on the domain grid:
/// best of several seeds, then first-improvement exchanges.
pub fn weighted_fekete(domain: &CompactDomain, weights: &WeightPair, n: usize, res: GridResolution) -> Result<FeketeResult> {
    if n == 0 {
        return Err(Error::InvalidInput("need n ≥ 1".into()));
    }
    let cand = domain.grid(res)?;
    let needed = match domain {
        CompactDomain::Points(_) => n + 1,
        _ => 4 * (n + 1),
    };
    if cand.len() < needed {
        return Err(Error::GridTooSmall { needed, got: cand.len() });
    }
    let mut sorted = cand.clone();
    sorted.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput(format!("duplicate candidate {}", w[0])));
    }
    let cw1: Vec<f64> = cand.par_iter().map(|&z| weights.log_w1(z)).collect();
    let cw2: Vec<f64> = cand.par_iter().map(|&z| weights.log_w2(z)).collect();
    if cw1.iter().chain(&cw2).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("weight on the domain grid"));
    }

    let pts = |chosen: &[usize]| chosen.iter().map(|&i| cand[i]).collect::<Vec<_>>();
    let gather = |v: &[f64], chosen: &[usize]| chosen.iter().map(|&i| v[i]).collect::<Vec<_>>();
    let sums_of = |chosen: &[usize]| row_sums(&pts(chosen), &gather(&cw1, chosen), &gather(&cw2, chosen));
    let min_of = |chosen: &[usize]| sums_of(chosen).into_iter().fold(f64::INFINITY, f64::min);

    // Seeds: greedy insertion, and n + 1 nearly equispaced angles on every
    // ring of a polar grid. The best seed is refined by exchanges.
    let mut seeds = vec![greedy_seed(&cand, &cw1, &cw2, n)];
    if !matches!(domain, CompactDomain::Points(_)) && res.angles > n {
        let angles = res.angles;
        for ring in 0..cand.len() / angles {
            seeds.push((0..=n).map(|j| ring * angles + (j * angles + (n + 1) / 2) / (n + 1) % angles).collect());
        }
    }
    let scores: Vec<f64> = seeds.par_iter().map(|seed| min_of(seed)).collect();
    let best = first_near_max(scores.iter().copied()).expect("at least one seed");
    let mut chosen = seeds.swap_remove(best);

    let mut taken = vec![false; cand.len()];
    chosen.iter().for_each(|&c| taken[c] = true);
    // acc[c] = Σ_l ln|c - z_l| over the chosen points.
    let mut acc: Vec<f64> = cand.par_iter().map(|&c| chosen.iter().map(|&l| log_dist(c, cand[l])).sum()).collect();
    let mut sums = sums_of(&chosen);
    let mut w2_total: f64 = chosen.iter().map(|&i| cw2[i]).sum();
    let nf = n as f64;

    let mut passes = 0;
    while passes < MAX_EXCHANGE_PASSES {
        passes += 1;
        let mut improved = false;
        let mut order: Vec<usize> = (0..chosen.len()).collect();
        order.sort_by(|&a, &b| sums[a].total_cmp(&sums[b]));
        for p in order {
            let current = sums.iter().copied().fold(f64::INFINITY, f64::min);
            let zp = cand[chosen[p]];
            let found = (0..cand.len()).into_par_iter().find_first(|&c| {
                if taken[c] {
                    return false;
                }
                let zc = cand[c];
                let own = acc[c] - log_dist(zc, zp) + nf * cw1[c] + w2_total - cw2[chosen[p]];
                if own <= current + TIE_TOL {
                    return false;
                }
                chosen.iter().enumerate().all(|(i, &ci)| {
                    i == p || {
                        let zi = cand[ci];
                        sums[i] - log_dist(zi, zp) - cw2[chosen[p]] + log_dist(zi, zc) + cw2[c] > current + TIE_TOL
                    }
                })
            });
            if let Some(c) = found {
                let old = chosen[p];
                let (zo, zc) = (cand[old], cand[c]);
                for (i, &ci) in chosen.iter().enumerate() {
                    if i != p {
                        let zi = cand[ci];
                        sums[i] += log_dist(zi, zc) - log_dist(zi, zo) + cw2[c] - cw2[old];
                    }
                }
                sums[p] = acc[c] - log_dist(zc, zo) + nf * cw1[c] + w2_total - cw2[old];
                w2_total += cw2[c] - cw2[old];
                acc.par_iter_mut().zip(&cand).for_each(|(a, &q)| *a += log_dist(q, zc) - log_dist(q, zo));
                taken[old] = false;
                taken[c] = true;
                chosen[p] = c;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    let min = sums.iter().copied().fold(f64::INFINITY, f64::min);
    log::debug!("fekete n = {n}: {} candidates, {passes} exchange passes", cand.len());
    Ok(FeketeResult {
        points: PointConfiguration::new(pts(&chosen))?,
        delta_n: min / (nf * LN_2),
        n,
        exchange_passes: passes,
    })
}

/// `∫ ln w₂ dσ` by quadrature.
fn mean_log_w2(sigma: &PlanarMeasure, weights: &WeightPair) -> f64 {
    sigma.quadrature(MEASURE_NODES).iter().map(|&(t, q)| q * weights.log_w2(t)).sum()
}

/// `inf_{z ∈ supp σ} ∫ log₂(|z - t| w₁(z) w₂(t)) dσ(t)` over support samples.
pub fn supinf_objective(sigma: &PlanarMeasure, weights: &WeightPair) -> Result<f64> {
    if sigma.has_atoms() {
        return Err(Error::AtomSingularity);
    }
    let w2 = mean_log_w2(sigma, weights);
    let values = sigma
        .support_samples(MEASURE_NODES)
        .par_iter()
        .map(|&z| Ok(sigma.log_integral(z)? + weights.log_w1(z)))
        .collect::<Result<Vec<f64>>>()?;
    Ok((values.into_iter().fold(f64::INFINITY, f64::min) + w2) / LN_2)
}

/// The same objective for the normalized counting measure of `points`, with
/// the singular self-pair dropped from each row.
pub fn discrete_supinf_objective(points: &[C64], weights: &WeightPair) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidInput("need at least two points".into()));
    }
    let lw1: Vec<f64> = points.iter().map(|&z| weights.log_w1(z)).collect();
    let lw2: Vec<f64> = points.iter().map(|&z| weights.log_w2(z)).collect();
    let min = row_sums(points, &lw1, &lw2).into_iter().fold(f64::INFINITY, f64::min);
    Ok(min / (points.len() as f64 * LN_2))
}

/// Lattice cell `(x, y)` with side `a` and its sub-lattice size `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeCell {
    pub x: i64,
    pub y: i64,
    pub t: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discretization {
    pub points: Vec<C64>,
    pub cells: Vec<LatticeCell>,
}

/// Cell masses `σ(A_{a,x,y})` from a fine quadrature of `σ`, where
/// `A_{a,x,y} = [(x-½)a, (x+½)a) × [(y-½)a, (y+½)a)`.
pub fn cell_masses(sigma: &PlanarMeasure, pitch: f64) -> BTreeMap<(i64, i64), f64> {
    let mut masses = BTreeMap::new();
    for (z, q) in sigma.quadrature(1024) {
        let key = ((z.re / pitch + 0.5).floor() as i64, (z.im / pitch + 0.5).floor() as i64);
        *masses.entry(key).or_insert(0.0) += q;
    }
    masses
}

/// Sub-lattices of `t = ⌈√(σ(A)·N)⌉` squared points in each lattice cell
/// `A` of pitch `a`.
pub fn discretize_measure(sigma: &PlanarMeasure, pitch: f64, target: usize) -> Result<Discretization> {
    if !(pitch > 0.0 && pitch.is_finite()) || target == 0 {
        return Err(Error::InvalidInput(format!("pitch {pitch}, target {target}")));
    }
    let mut points = Vec::new();
    let mut cells = Vec::new();
    for ((x, y), mass) in cell_masses(sigma, pitch) {
        let t = (mass * target as f64 - 1e-9).max(0.0).sqrt().ceil() as usize;
        if t == 0 {
            continue;
        }
        cells.push(LatticeCell { x, y, t });
        let tf = t as f64;
        for i in 1..=t {
            for j in 1..=t {
                let re = (x as f64 - 0.5 + (i as f64 - 0.5) / tf) * pitch;
                let im = (y as f64 - 0.5 + (j as f64 - 0.5) / tf) * pitch;
                points.push(C64::new(re, im));
            }
        }
    }
    Ok(Discretization { points, cells })
}

/// `U^σ(z) = ∫ log₂(1/|z - t|) dσ(t)`.
pub fn logarithmic_potential(sigma: &PlanarMeasure, z: C64) -> Result<f64> {
    Ok(-sigma.log_integral(z)? / LN_2)
}

/// Five-point Laplacian of the potential at `z` with step `h`.
pub fn harmonicity_check(sigma: &PlanarMeasure, z: C64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("step {h}")));
    }
    if sigma.distance_to_support(z) < 10.0 * h {
        return Err(Error::TooCloseToSupport);
    }
    let u = |w: C64| logarithmic_potential(sigma, w);
    let sum = u(z + h)? + u(z - h)? + u(z + C64::new(0.0, h))? + u(z - C64::new(0.0, h))? - 4.0 * u(z)?;
    Ok(sum / (h * h))
}

/// Fit of `δ_n ≈ limit + a·log n/n + b/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    pub limit: f64,
    pub log_coefficient: f64,
    pub inverse_coefficient: f64,
}

/// Least-squares fit over `(n, δ_n)` samples; needs three distinct `n ≥ 2`.
pub fn extrapolate(samples: &[(usize, f64)]) -> Result<Extrapolation> {
    if samples.len() < 3 {
        return Err(Error::InvalidInput("need at least three samples".into()));
    }
    let basis = |n: usize| {
        let x = n as f64;
        [1.0, x.ln() / x, 1.0 / x]
    };
    let mut gram = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for &(n, v) in samples {
        let b = basis(n);
        for i in 0..3 {
            rhs[i] += b[i] * v;
            for j in 0..3 {
                gram[i][j] += b[i] * b[j];
            }
        }
    }
    let rows: Vec<Vec<C64>> = gram.iter().map(|r| r.iter().map(|&v| C64::new(v, 0.0)).collect()).collect();
    let l = cholesky(&CMatrix::from_rows(&rows)?)?;
    let c = cholesky_solve(&l, &rhs.map(|v| C64::new(v, 0.0)));
    Ok(Extrapolation { limit: c[0].re, log_coefficient: c[1].re, inverse_coefficient: c[2].re })
}
