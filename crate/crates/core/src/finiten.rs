//! Finite-n protocols: a GHZ state of rank t is pushed through the maps
//! `A_j(z_i)^{⊗n}` at t interpolation points and recombined with weights
//! `c_i`, so that only the `z^0` coefficient `φ^{⊗n}` survives.
//!
//! Probabilities are carried as base-2 logarithms. For `t = ne + 1` points
//! the optimal success probability is, up to the factor `t^k`, the inverse of
//! `Σ_i ‖A(z_i)‖^{2n} Π_{l≠i} |z_l|² / |z_i - z_l|²`.

use rayon::prelude::*;
use serde::Serialize;

use crate::degeneration::{Degeneration, NormModel};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_solve, condition_number, inner, operator_norm, CMatrix, C64, ZERO};
use crate::optimize::RadiusBracket;
use crate::state::{tensor_apply, MultipartiteState};

/// Interpolation points closer than this are treated as coincident.
pub const COINCIDENCE_TOL: f64 = 1e-12;
/// Largest moment system solved directly.
pub const MAX_DIRECT_MOMENTS: usize = 12;
pub const MAX_CONDITION: f64 = 1e14;
/// Largest state dimension the simulator will allocate.
pub const MAX_SIM_DIM: usize = 1 << 22;

/// Distinct nonzero interpolation points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfiguration {
    points: Vec<C64>,
}

impl PointConfiguration {
    pub fn new(points: Vec<C64>) -> Result<Self> {
        for (i, z) in points.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite("interpolation point"));
            }
            if z.norm() <= 0.0 {
                return Err(Error::ZeroPoint(i));
            }
            for (l, w) in points.iter().enumerate().take(i) {
                if (z - w).norm() <= COINCIDENCE_TOL {
                    return Err(Error::CoincidentPoints(l, i));
                }
            }
        }
        if points.is_empty() {
            return Err(Error::InvalidInput("no interpolation points".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `radius · ω^i` for the t-th roots of unity `ω^i`.
pub fn roots_of_unity_config(t: usize, radius: f64) -> Result<PointConfiguration> {
    if t == 0 || !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidInput(format!("t = {t}, radius = {radius}")));
    }
    let points = (0..t)
        .map(|i| C64::from_polar(radius, std::f64::consts::TAU * i as f64 / t as f64))
        .collect();
    PointConfiguration::new(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbabilityMethod {
    ExactZgz,
    ClosedForm,
    Simulator,
}

/// A success probability (or its inverse objective) as `log₂` value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogProbability {
    pub log2_value: f64,
    pub n: usize,
    pub method: ProbabilityMethod,
}

/// Solution of the moment problem `Z c = e₁` minimizing `Σ |c_i|²/G_i`.
#[derive(Debug, Clone)]
pub struct VandermondeSolution {
    /// `⟨e₁, (Z G Z*)^{-1} e₁⟩`
    pub objective: f64,
    pub c: Vec<C64>,
}

/// `⟨e₁, (Z G Z*)^{-1} e₁⟩` where `Z` is the `(ne+1) × t` moment matrix
/// `Z_{h,i} = z_i^h`, together with the optimal `c = G Z* (Z G Z*)^{-1} e₁`.
pub fn vandermonde_objective(points: &PointConfiguration, g_diag: &[f64], ne: usize) -> Result<VandermondeSolution> {
    let t = points.len();
    let d = ne + 1;
    if g_diag.len() != t {
        return Err(Error::ShapeMismatch(format!("{} weights for {t} points", g_diag.len())));
    }
    if t < d {
        return Err(Error::PointCount { expected: d, got: t });
    }
    if d > MAX_DIRECT_MOMENTS {
        return Err(Error::MomentTooLarge(d));
    }
    if g_diag.iter().any(|&g| !(g > 0.0) || !g.is_finite()) {
        return Err(Error::InvalidInput("moment weights must be positive".into()));
    }
    let z = CMatrix::from_fn(d, t, |h, i| points.points[i].powi(h as i32));
    let zg = CMatrix::from_fn(d, t, |h, i| z[(h, i)] * g_diag[i]);
    let m = zg.matmul(&z.adjoint())?;
    let condition = condition_number(&m)?;
    if !(condition <= MAX_CONDITION) {
        return Err(Error::SingularMoment { condition });
    }
    let l = cholesky(&m).map_err(|_| Error::SingularMoment { condition })?;
    let mut e1 = vec![ZERO; d];
    e1[0] = C64::new(1.0, 0.0);
    let y = cholesky_solve(&l, &e1);
    let c: Vec<C64> = (0..t)
        .map(|i| (0..d).map(|h| z[(h, i)].conj() * y[h]).sum::<C64>() * g_diag[i])
        .collect();
    let zc = z.mul_vec(&c)?;
    let residual = crate::linalg::norm(&zc.iter().zip(&e1).map(|(a, b)| a - b).collect::<Vec<_>>());
    if residual > 1e-6 {
        return Err(Error::SingularMoment { condition });
    }
    Ok(VandermondeSolution { objective: y[0].re, c })
}

/// Lagrange weights for evaluating at 0: `c_i = Π_{l≠i} (-z_l)/(z_i - z_l)`.
/// These solve `Σ_i c_i z_i^h = δ_{h,0}` for `h < t` without any inversion.
pub fn lagrange_weights(points: &PointConfiguration) -> Vec<C64> {
    let z = &points.points;
    (0..z.len())
        .map(|i| {
            z.iter()
                .enumerate()
                .filter(|&(l, _)| l != i)
                .map(|(_, &zl)| -zl / (z[i] - zl))
                .product()
        })
        .collect()
}

/// Local weights `|γ_{j,i}|²`, their products `|g_i|²`, and GHZ coefficients.
#[derive(Debug, Clone)]
pub struct WeightAssignment {
    /// `gamma_sq[i][j]` for point i and party j.
    pub gamma_sq: Vec<Vec<f64>>,
    pub g_sq: Vec<f64>,
    pub c: Vec<C64>,
}

/// `|γ_{j,i}|² = (1/t) ‖A_j(z_i)‖^{-2n}`, which makes every local branch sum
/// a contraction. The coefficients `c` are the Lagrange weights when
/// `t = ne + 1` and the moment-optimal ones otherwise.
pub fn canonical_gamma(points: &PointConfiguration, n: usize, deg: &Degeneration) -> Result<WeightAssignment> {
    let t = points.len() as f64;
    let mut gamma_sq = Vec::with_capacity(points.len());
    for &z in points.points() {
        let norms = deg.factor_norms(z)?;
        gamma_sq.push(norms.iter().map(|a| a.powi(-2 * n as i32) / t).collect::<Vec<f64>>());
    }
    let g_sq: Vec<f64> = gamma_sq.iter().map(|row| row.iter().product()).collect();
    let ne = n * deg.error_degree();
    let c = if points.len() == ne + 1 {
        lagrange_weights(points)
    } else {
        vandermonde_objective(points, &g_sq, ne)?.c
    };
    Ok(WeightAssignment { gamma_sq, g_sq, c })
}

/// Base-2 log-sum-exp.
pub fn log2_sum_exp2(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + values.iter().map(|v| (v - m).exp2()).sum::<f64>().log2()
}

fn lagrange_log_terms(points: &[C64]) -> Vec<f64> {
    (0..points.len())
        .into_par_iter()
        .map(|i| {
            let zi = points[i];
            points
                .iter()
                .enumerate()
                .filter(|&(l, _)| l != i)
                .map(|(_, &zl)| zl.norm_sqr().log2() - (zi - zl).norm_sqr().log2())
                .sum()
        })
        .collect()
}

/// `log₂ Σ_i ‖A(z_i)‖^{2n} Π_{l≠i} |z_l|²/|z_i - z_l|²` for `ne + 1` points.
/// The success probability of the protocol with canonical weights is
/// `t^{-k}` times two to the minus this value.
pub fn closed_form_objective<M: NormModel + ?Sized>(
    model: &M,
    points: &PointConfiguration,
    n: usize,
) -> Result<LogProbability> {
    let expected = n * model.error_degree() + 1;
    if points.len() != expected {
        return Err(Error::PointCount { expected, got: points.len() });
    }
    let lag = lagrange_log_terms(&points.points);
    let terms: Vec<f64> = points
        .points
        .par_iter()
        .zip(lag.par_iter())
        .map(|(&z, &l)| 2.0 * n as f64 * model.log2_norm(z) + l)
        .collect();
    Ok(LogProbability { log2_value: log2_sum_exp2(&terms), n, method: ProbabilityMethod::ClosedForm })
}

/// Closed form specialised to `t = ne + 1` roots of unity of the given
/// radius, where every Lagrange product equals `1/t²`.
pub fn roots_of_unity_objective<M: NormModel + ?Sized>(model: &M, n: usize, radius: f64) -> f64 {
    let t = n * model.error_degree() + 1;
    let terms: Vec<f64> = (0..t)
        .map(|i| {
            let z = C64::from_polar(radius, std::f64::consts::TAU * i as f64 / t as f64);
            2.0 * n as f64 * model.log2_norm(z)
        })
        .collect();
    log2_sum_exp2(&terms) - 2.0 * (t as f64).log2()
}

/// Result of a point-configuration search.
#[derive(Debug, Clone)]
pub struct RadiusOptimum {
    pub radius: f64,
    pub objective: LogProbability,
    pub points: PointConfiguration,
}

/// Minimizes the closed form over scaled roots of unity by golden section on
/// `log₂ radius ∈ [-8, 8]`, optionally followed by exchange refinement.
pub fn optimize_radius<M: NormModel + ?Sized>(model: &M, n: usize, refine: bool) -> Result<RadiusOptimum> {
    optimize_radius_in(model, n, refine, RadiusBracket::default())
}

pub fn optimize_radius_in<M: NormModel + ?Sized>(
    model: &M,
    n: usize,
    refine: bool,
    bracket: RadiusBracket,
) -> Result<RadiusOptimum> {
    let (x, _) = bracket.minimize(|x| roots_of_unity_objective(model, n, x.exp2()), 1e-9);
    let radius = x.exp2();
    let t = n * model.error_degree() + 1;
    let mut points = roots_of_unity_config(t, radius)?;
    let mut objective = closed_form_objective(model, &points, n)?;
    if refine {
        let (refined, value) = exchange_refine(model, n, &points, 50)?;
        points = refined;
        objective.log2_value = value;
    }
    Ok(RadiusOptimum { radius, objective, points })
}

/// Single-point exchange on a 5x5 log-polar stencil around each point,
/// accepting the first move (in raster order) that lowers the closed form.
/// Each candidate costs O(t) thanks to cached per-point Lagrange sums.
pub fn exchange_refine<M: NormModel + ?Sized>(
    model: &M,
    n: usize,
    start: &PointConfiguration,
    max_passes: usize,
) -> Result<(PointConfiguration, f64)> {
    let mut z = start.points.clone();
    let t = z.len();
    let nn = 2.0 * n as f64;
    let mut lag = lagrange_log_terms(&z);
    let mut norm_terms: Vec<f64> = z.iter().map(|&p| nn * model.log2_norm(p)).collect();
    let total = |lag: &[f64], nt: &[f64]| log2_sum_exp2(&lag.iter().zip(nt).map(|(a, b)| a + b).collect::<Vec<_>>());
    let mut best = total(&lag, &norm_terms);
    let pair = |a: C64, b: C64| a.norm_sqr().log2() - (b - a).norm_sqr().log2();
    let dr = 1.0 / 64.0;
    let dtheta = std::f64::consts::TAU / (8.0 * t as f64);

    for _ in 0..max_passes {
        let mut improved = false;
        for p in 0..t {
            'stencil: for a in -2i32..=2 {
                for b in -2i32..=2 {
                    if a == 0 && b == 0 {
                        continue;
                    }
                    let cand = z[p] * C64::from_polar((a as f64 * dr).exp2(), b as f64 * dtheta);
                    if z.iter().enumerate().any(|(l, &w)| l != p && (w - cand).norm() <= COINCIDENCE_TOL) {
                        continue;
                    }
                    let mut new_lag = lag.clone();
                    for i in 0..t {
                        if i != p {
                            new_lag[i] += pair(cand, z[i]) - pair(z[p], z[i]);
                        }
                    }
                    new_lag[p] = (0..t).filter(|&l| l != p).map(|l| pair(z[l], cand)).sum();
                    let mut new_norm = norm_terms.clone();
                    new_norm[p] = nn * model.log2_norm(cand);
                    let value = total(&new_lag, &new_norm);
                    if value < best - 1e-13 * best.abs().max(1.0) {
                        z[p] = cand;
                        lag = new_lag;
                        norm_terms = new_norm;
                        best = value;
                        improved = true;
                        break 'stencil;
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
    Ok((PointConfiguration::new(z)?, best))
}

/// How the points are chosen for each n in a table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointStrategy {
    FixedRadius(f64),
    OptimizeRadius,
    OptimizeRadiusExchange,
}

/// One table row. `bits_per_copy = log2_objective / n`; the `t^k` factor is
/// dropped since it vanishes per copy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub n: usize,
    pub radius: f64,
    pub log2_objective: f64,
    pub bits_per_copy: f64,
}

pub fn finite_n_exponent_table<M: NormModel + ?Sized>(model: &M, ns: &[usize], strategy: PointStrategy) -> Result<Vec<TableRow>> {
    finite_n_exponent_table_in(model, ns, strategy, RadiusBracket::default())
}

pub fn finite_n_exponent_table_in<M: NormModel + ?Sized>(
    model: &M,
    ns: &[usize],
    strategy: PointStrategy,
    bracket: RadiusBracket,
) -> Result<Vec<TableRow>> {
    if ns.is_empty() || ns.contains(&0) {
        return Err(Error::InvalidInput("table needs positive copy counts".into()));
    }
    ns.iter()
        .map(|&n| {
            let (radius, value) = match strategy {
                PointStrategy::FixedRadius(r) => {
                    let pts = roots_of_unity_config(n * model.error_degree() + 1, r)?;
                    (r, closed_form_objective(model, &pts, n)?.log2_value)
                }
                PointStrategy::OptimizeRadius => {
                    let opt = optimize_radius_in(model, n, false, bracket)?;
                    (opt.radius, opt.objective.log2_value)
                }
                PointStrategy::OptimizeRadiusExchange => {
                    let opt = optimize_radius_in(model, n, true, bracket)?;
                    (opt.radius, opt.objective.log2_value)
                }
            };
            log::debug!("table row n = {n}: radius {radius}, log2 objective {value}");
            Ok(TableRow { n, radius, log2_objective: value, bits_per_copy: value / n as f64 })
        })
        .collect()
}

/// Greedy subset selection for the moment problem: keeps `d = u.len()`
/// of the vectors while the quadratic form `⟨u|(Σ_S |v⟩⟨v|)^{-1}|u⟩` grows by
/// at most a factor `t - d + 1`.
#[derive(Debug, Clone)]
pub struct PruneResult {
    pub kept: Vec<usize>,
    pub value: f64,
    pub full_value: f64,
}

/// `⟨u|(Σ_{i∈S} |v_i⟩⟨v_i|)^{-1}|u⟩`.
pub fn quadratic_form(vectors: &[Vec<C64>], subset: &[usize], u: &[C64]) -> Result<f64> {
    let d = u.len();
    let mut m = CMatrix::zeros(d, d);
    for &i in subset {
        let v = &vectors[i];
        for a in 0..d {
            for b in 0..d {
                m[(a, b)] += v[a] * v[b].conj();
            }
        }
    }
    let l = cholesky(&m)?;
    Ok(inner(u, &cholesky_solve(&l, u)).re)
}

pub fn prune_points(vectors: &[Vec<C64>], u: &[C64]) -> Result<PruneResult> {
    let d = u.len();
    if d == 0 || vectors.len() < d || vectors.iter().any(|v| v.len() != d) {
        return Err(Error::ShapeMismatch(format!("{} vectors for target dimension {d}", vectors.len())));
    }
    let mut kept: Vec<usize> = (0..vectors.len()).collect();
    let full_value = quadratic_form(vectors, &kept, u)?;
    let mut value = full_value;
    while kept.len() > d {
        let mut m = CMatrix::zeros(d, d);
        for &i in &kept {
            for a in 0..d {
                for b in 0..d {
                    m[(a, b)] += vectors[i][a] * vectors[i][b].conj();
                }
            }
        }
        let l = cholesky(&m)?;
        let x = cholesky_solve(&l, u);
        let f = inner(u, &x).re;
        let mut best = (usize::MAX, f64::INFINITY);
        for (pos, &j) in kept.iter().enumerate() {
            let v = &vectors[j];
            let w = cholesky_solve(&l, v);
            let a = inner(&x, v).norm_sqr();
            let b = inner(v, &w).re;
            let ratio = if b < 1.0 - 1e-12 { 1.0 + a / (f * (1.0 - b)) } else { f64::INFINITY };
            if ratio < best.1 {
                best = (pos, ratio);
            }
        }
        if best.0 == usize::MAX {
            return Err(Error::RankDeficient);
        }
        kept.remove(best.0);
        value = quadratic_form(vectors, &kept, u)?;
    }
    Ok(PruneResult { kept, value, full_value })
}

/// Output of an explicit protocol run.
#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub output: MultipartiteState,
    pub residual: f64,
    pub success_prob: f64,
    /// `‖Σ_i |γ_{j,i}|² A_j(z_i)^{⊗n} A_j(z_i)^{*⊗n}‖` per party, for n ≤ 3.
    pub contraction_norms: Option<Vec<f64>>,
}

/// Runs the protocol densely: `Σ_i c_i (⊗_j A_j(z_i)^{⊗n}) ψ^{⊗n}` must equal
/// `φ^{⊗n}`, and the success probability is `(Σ_i |c_i|²/|g_i|²)^{-1}`.
pub fn simulate_protocol(
    deg: &Degeneration,
    n: usize,
    points: &PointConfiguration,
    weights: &WeightAssignment,
) -> Result<SimulationResult> {
    let t = points.len();
    if n == 0 {
        return Err(Error::InvalidInput("need at least one copy".into()));
    }
    if weights.c.len() != t || weights.g_sq.len() != t || weights.gamma_sq.len() != t {
        return Err(Error::ShapeMismatch("weights do not match the point count".into()));
    }
    let ne = n * deg.error_degree();
    if t < ne + 1 {
        return Err(Error::PointCount { expected: ne + 1, got: t });
    }
    let in_dim = deg.psi().dims().iter().product::<usize>().checked_pow(n as u32);
    let out_dim = deg.phi().dims().iter().product::<usize>().checked_pow(n as u32);
    for dim in [in_dim, out_dim] {
        match dim {
            Some(d) if d <= MAX_SIM_DIM => {}
            Some(d) => return Err(Error::DimensionTooLarge(d)),
            None => return Err(Error::DimensionTooLarge(usize::MAX)),
        }
    }

    let psi_n = deg.psi().power(n);
    let target = deg.phi().power(n);
    let mut acc = vec![ZERO; target.amplitudes().len()];
    for (i, &z) in points.points().iter().enumerate() {
        let local = deg.eval(z)?;
        let maps: Vec<&CMatrix> = (0..n).flat_map(|_| local.iter()).collect();
        let (_, out) = tensor_apply(&maps, psi_n.dims(), psi_n.amplitudes())?;
        let ci = weights.c[i];
        acc.iter_mut().zip(&out).for_each(|(a, b)| *a += ci * b);
    }
    let residual = acc
        .iter()
        .zip(target.amplitudes())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > 1e-6 {
        return Err(Error::NotReproducingTarget { residual });
    }
    let output = MultipartiteState::normalized(target.dims().to_vec(), acc)?;
    let inv: f64 = weights.c.iter().zip(&weights.g_sq).map(|(c, g)| c.norm_sqr() / g).sum();
    let contraction_norms = if n <= 3 { Some(contraction_norms(deg, n, points, &weights.gamma_sq)?) } else { None };
    if let Some(norms) = &contraction_norms {
        if let Some((party, &norm)) = norms.iter().enumerate().find(|(_, &v)| v > 1.0 + 1e-9) {
            return Err(Error::ContractionViolated { party, norm });
        }
    }
    Ok(SimulationResult { output, residual, success_prob: 1.0 / inv, contraction_norms })
}

/// Operator norms of `Σ_i |γ_{j,i}|² B_i B_i*` with `B_i = A_j(z_i)^{⊗n}`.
pub fn contraction_norms(deg: &Degeneration, n: usize, points: &PointConfiguration, gamma_sq: &[Vec<f64>]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(deg.k());
    for j in 0..deg.k() {
        let rows = deg.maps()[j].rows().pow(n as u32);
        let mut sum = CMatrix::zeros(rows, rows);
        for (i, &z) in points.points().iter().enumerate() {
            let a = deg.maps()[j].eval(z)?;
            let mut b = a.clone();
            for _ in 1..n {
                b = b.kron(&a);
            }
            let bb = b.matmul(&b.adjoint())?;
            sum = sum.add(&bb.scale(C64::new(gamma_sq[i][j], 0.0)))?;
        }
        out.push(operator_norm(&sum));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degeneration::{from_combinatorial, library};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn one_by_one_moment_system() {
        let pts = PointConfiguration::new(vec![c(0.7, 0.2)]).unwrap();
        let sol = vandermonde_objective(&pts, &[0.25], 0).unwrap();
        assert!((sol.objective - 4.0).abs() < 1e-14);
    }

    #[test]
    fn two_point_moment_system() {
        let pts = PointConfiguration::new(vec![c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let sol = vandermonde_objective(&pts, &[1.0, 1.0], 1).unwrap();
        assert!((sol.objective - 0.5).abs() < 1e-14);
        assert!((sol.c[0] - c(0.5, 0.0)).norm() < 1e-14);
        assert!((sol.c[1] - c(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn moment_system_size_limit() {
        let pts = roots_of_unity_config(13, 1.0).unwrap();
        assert_eq!(vandermonde_objective(&pts, &[1.0; 13], 12).unwrap_err(), Error::MomentTooLarge(13));
    }

    #[test]
    fn roots_of_unity_basics() {
        let p = roots_of_unity_config(1, 2.0).unwrap();
        assert_eq!(p.points(), &[c(2.0, 0.0)]);
        let p = roots_of_unity_config(4, 1.0).unwrap();
        for (z, w) in p.points().iter().zip([c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]) {
            assert!((z - w).norm() < 1e-15);
        }
        // Π_{l≠i} |z_i − z_l| = t r^{t−1}
        let (t, r) = (7, 1.3f64);
        let p = roots_of_unity_config(t, r).unwrap();
        for i in 0..t {
            let prod: f64 = (0..t).filter(|&l| l != i).map(|l| (p.points()[i] - p.points()[l]).norm()).product();
            assert!((prod - t as f64 * r.powi(t as i32 - 1)).abs() < 1e-12 * prod);
        }
    }

    #[test]
    fn point_configuration_rejects_bad_points() {
        assert_eq!(PointConfiguration::new(vec![c(1.0, 0.0), c(0.0, 0.0)]), Err(Error::ZeroPoint(1)));
        assert_eq!(PointConfiguration::new(vec![c(1.0, 0.0), c(1.0, 0.0)]), Err(Error::CoincidentPoints(0, 1)));
    }

    #[test]
    fn closed_form_on_combinatorial_example_n1() {
        let (deg, _) = from_combinatorial(&library::ghz_to_w_combinatorial()).unwrap();
        let pts = roots_of_unity_config(7, 1.0).unwrap();
        let v = closed_form_objective(&deg, &pts, 1).unwrap();
        assert!((v.log2_value - (4.0f64 / 21.0).log2()).abs() < 1e-12);
        assert!((roots_of_unity_objective(&deg, 1, 1.0) - v.log2_value).abs() < 1e-12);
    }

    #[test]
    fn canonical_gamma_plug_in() {
        let (deg, _) = from_combinatorial(&library::ghz_to_w_combinatorial()).unwrap();
        let pts = roots_of_unity_config(7, 1.0).unwrap();
        let w = canonical_gamma(&pts, 1, &deg).unwrap();
        for g in &w.g_sq {
            assert!((g - 0.75 / 343.0).abs() < 1e-15);
        }
    }

    #[test]
    fn closed_form_matches_exact_moment_solve() {
        let deg = library::ghz_to_w(3).unwrap();
        for n in 1..=3 {
            let t = 2 * n + 1;
            let pts = roots_of_unity_config(t, 1.1).unwrap();
            let w = canonical_gamma(&pts, n, &deg).unwrap();
            let exact = vandermonde_objective(&pts, &w.g_sq, 2 * n).unwrap();
            let closed = closed_form_objective(&deg, &pts, n).unwrap();
            let with_t = closed.log2_value + 3.0 * (t as f64).log2();
            assert!((exact.objective.log2() - with_t).abs() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn combinatorial_optimum_on_unit_circle() {
        let (deg, _) = from_combinatorial(&library::ghz_to_w_combinatorial()).unwrap();
        for n in [1, 3, 10] {
            let opt = optimize_radius(&deg, n, false).unwrap();
            assert!((opt.radius - 1.0).abs() < 1e-3, "n={n} r={}", opt.radius);
        }
    }

    struct Scaled<'a>(&'a Degeneration, f64);

    impl NormModel for Scaled<'_> {
        fn log2_norm(&self, z: C64) -> f64 {
            self.0.log2_norm(z) + self.0.k() as f64 * self.1.log2()
        }
        fn error_degree(&self) -> usize {
            self.0.error_degree()
        }
    }

    #[test]
    fn scaling_maps_shifts_objective() {
        let deg = library::ghz_to_w(3).unwrap();
        let n = 2;
        let base = optimize_radius(&deg, n, false).unwrap();
        let scaled = optimize_radius(&Scaled(&deg, 2.0), n, false).unwrap();
        assert!((scaled.radius - base.radius).abs() < 1e-6);
        let shift = scaled.objective.log2_value - base.objective.log2_value;
        assert!((shift - 2.0 * n as f64 * 3.0).abs() < 1e-9);
    }

    #[test]
    fn exchange_does_not_worsen() {
        let deg = library::ghz_to_w(3).unwrap();
        let plain = optimize_radius(&deg, 2, false).unwrap();
        let refined = optimize_radius(&deg, 2, true).unwrap();
        assert!(refined.objective.log2_value <= plain.objective.log2_value + 1e-12);
    }

    #[test]
    fn prune_base_cases() {
        let vs = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]];
        let u = vec![c(1.0, 0.0), c(1.0, 0.0)];
        let r = prune_points(&vs, &u).unwrap();
        assert_eq!(r.kept, vec![0, 1]);
        assert!((r.value - r.full_value).abs() < 1e-14);

        let vs = vec![vec![c(1.0, 0.0)], vec![c(2.0, 0.0)]];
        let r = prune_points(&vs, &[c(1.0, 0.0)]).unwrap();
        assert_eq!(r.kept, vec![1]);
        assert!(r.value <= 2.0 * r.full_value + 1e-12);

        let vs = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(2.0, 0.0), c(0.0, 0.0)]];
        assert_eq!(prune_points(&vs, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap_err(), Error::RankDeficient);
    }

    #[test]
    fn restriction_table_is_zero() {
        let psi = MultipartiteState::basis(vec![2], &[0]).unwrap();
        let id = crate::laurent::LaurentMatrix::constant(CMatrix::identity(2)).unwrap();
        let deg = Degeneration::new(vec![id], psi.clone(), psi, 1e-9).unwrap();
        let rows = finite_n_exponent_table(&deg, &[1, 5, 9], PointStrategy::FixedRadius(1.0)).unwrap();
        assert!(rows.iter().all(|r| r.bits_per_copy.abs() < 1e-15));
    }

    #[test]
    fn simulate_restriction() {
        let psi = MultipartiteState::basis(vec![2], &[0]).unwrap();
        let id = crate::laurent::LaurentMatrix::constant(CMatrix::identity(2).scale(c(0.5, 0.0))).unwrap();
        let phi = psi.clone();
        // 0.5 I maps |0⟩ to |0⟩/2, so the pair is not a degeneration; use I.
        assert!(Degeneration::new(vec![id], psi.clone(), phi.clone(), 1e-9).is_err());
        let id = crate::laurent::LaurentMatrix::constant(CMatrix::identity(2)).unwrap();
        let deg = Degeneration::new(vec![id], psi, phi.clone(), 1e-9).unwrap();
        let pts = PointConfiguration::new(vec![c(1.0, 0.0)]).unwrap();
        let w = canonical_gamma(&pts, 1, &deg).unwrap();
        assert_eq!(w.c, vec![c(1.0, 0.0)]);
        let sim = simulate_protocol(&deg, 1, &pts, &w).unwrap();
        assert!((sim.success_prob - w.g_sq[0]).abs() < 1e-15);
        assert_eq!(sim.output, phi);
    }

    #[test]
    fn simulate_combinatorial_n1() {
        let (deg, _) = from_combinatorial(&library::ghz_to_w_combinatorial()).unwrap();
        let pts = roots_of_unity_config(7, 1.0).unwrap();
        let w = canonical_gamma(&pts, 1, &deg).unwrap();
        let sim = simulate_protocol(&deg, 1, &pts, &w).unwrap();
        assert!(sim.residual < 1e-8);
        let norms = sim.contraction_norms.unwrap();
        assert!(norms.iter().all(|&v| v <= 1.0 + 1e-9 && v >= 1.0 / 7.0 - 1e-9));
    }
}
