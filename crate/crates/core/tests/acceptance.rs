//! Acceptance checks. Each test prints one `PASS`/`FAIL` line with its timing
//! and the numbers behind the verdict, then asserts.

use std::time::{Duration, Instant};

use degenex_core::degeneration::{
    combinatorial_exponent, edge_connectivity, from_combinatorial, hypergraph_ghz_exponent, library, Degeneration, Hypergraph,
};
use degenex_core::exponent::{circle_average_bound, circle_log_integral, symmetric_exponent};
use degenex_core::finiten::{
    canonical_gamma, closed_form_objective, finite_n_exponent_table, prune_points, quadratic_form, roots_of_unity_config,
    simulate_protocol, PointStrategy,
};
use degenex_core::measure::{Component, PlanarMeasure};
use degenex_core::potential::{harmonicity_check, supinf_objective, weighted_fekete, CompactDomain, GridResolution, WeightPair};
use degenex_core::quadrature::{circle_mean, log_kernel_coefficient};
use degenex_core::tradeoff::{best_exponent_over_rate, rate_grid, symmetric_tradeoff_exponent, tradeoff_curve};
use degenex_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn report(id: u32, label: &str, checks: &[(bool, String)], elapsed: Duration) {
    let pass = checks.iter().all(|(ok, _)| *ok);
    println!("criterion {id:>2} {label}: {} ({:.3}s)", if pass { "PASS" } else { "FAIL" }, elapsed.as_secs_f64());
    for (ok, what) in checks {
        println!("    [{}] {what}", if *ok { "ok" } else { "x" });
    }
    assert!(pass, "criterion {id} failed");
}

fn combinatorial() -> Degeneration {
    from_combinatorial(&library::ghz_to_w_combinatorial()).unwrap().0
}

fn log2_4_3() -> f64 {
    (4.0f64 / 3.0).log2()
}

#[test]
fn criterion_01_generic_ghz_w() {
    let start = Instant::now();
    let mut checks = Vec::new();
    let k3 = symmetric_exponent(&library::ghz_to_w(3).unwrap()).unwrap();
    checks.push(((k3.value - 6.1699).abs() <= 1e-3, format!("k = 3 exponent {:.10} vs 6.1699 ± 1e-3", k3.value)));
    for k in 3..=8usize {
        let kf = k as f64;
        let formula = 2.0 * (kf - 1.0) + kf * kf.log2() - (kf - 1.0) * (kf - 1.0).log2() + (2.0 / kf).log2();
        let res = symmetric_exponent(&library::ghz_to_w(k).unwrap()).unwrap();
        let radius = res.certificate.radius.unwrap();
        let want_r = (4.0 / (kf - 1.0)).sqrt();
        checks.push((
            (res.value - formula).abs() <= 1e-6,
            format!("k = {k}: exponent {:.10} vs formula {formula:.10}", res.value),
        ));
        checks.push(((radius - want_r).abs() <= 1e-3, format!("k = {k}: radius {radius:.6} vs {want_r:.6}")));
    }
    let elapsed = start.elapsed();
    checks.push((elapsed < Duration::from_secs(1), format!("runtime {:.3}s < 1s", elapsed.as_secs_f64())));
    report(1, "generic GHZ to W symmetric exponent", &checks, elapsed);
}

#[test]
fn criterion_02_combinatorial_ghz_w() {
    let start = Instant::now();
    let spec = library::ghz_to_w_combinatorial();
    let comb = combinatorial_exponent(&spec).unwrap();
    let sym = symmetric_exponent(&combinatorial()).unwrap().value;
    let checks = vec![
        ((comb - log2_4_3()).abs() <= 1e-9, format!("combinatorial {comb:.12} vs log2(4/3) ± 1e-9")),
        ((sym - log2_4_3()).abs() <= 1e-6, format!("symmetric {sym:.12} vs log2(4/3) ± 1e-6")),
        ((sym - comb).abs() <= 1e-6, format!("cross-path difference {:.3e} ≤ 1e-6", (sym - comb).abs())),
    ];
    report(2, "combinatorial GHZ to W exponent", &checks, start.elapsed());
}

#[test]
fn criterion_03_circle_average_and_kernel() {
    let start = Instant::now();
    let mut checks = Vec::new();
    for (name, deg) in [("generic", library::ghz_to_w(3).unwrap()), ("combinatorial", combinatorial())] {
        let avg = circle_average_bound(&deg).value;
        let sym = symmetric_exponent(&deg).unwrap().value;
        checks.push(((avg - sym).abs() <= 1e-5, format!("{name}: circle average {avg:.10} vs symmetric {sym:.10}")));
    }
    let worst = (1..=16i64)
        .flat_map(|m| [m, -m])
        .map(|m| (log_kernel_coefficient(m) - 1.0 / (2.0 * m.abs() as f64)).abs())
        .fold(0.0, f64::max);
    checks.push((worst <= 1e-9, format!("kernel c_m = 1/(2|m|), |m| ≤ 16, worst error {worst:.3e}")));
    report(3, "circle average and log kernel", &checks, start.elapsed());
}

#[test]
fn criterion_04_finite_n_identity() {
    let start = Instant::now();
    let deg = combinatorial();
    let ns: Vec<usize> = (1..=200).collect();
    let table = finite_n_exponent_table(&deg, &ns, PointStrategy::FixedRadius(1.0)).unwrap();
    let worst = table
        .iter()
        .map(|row| {
            let n = row.n as f64;
            (row.bits_per_copy - (log2_4_3() + (6.0 * n + 1.0).log2() / n)).abs()
        })
        .fold(0.0, f64::max);
    let optimized = finite_n_exponent_table(&deg, &[1, 2, 5, 10, 20, 50, 100], PointStrategy::OptimizeRadius).unwrap();
    let at_100 = optimized.last().unwrap().bits_per_copy;
    let elapsed = start.elapsed();
    let trend: Vec<String> = optimized.iter().map(|r| format!("n={}: {:.5}", r.n, r.bits_per_copy)).collect();
    let checks = vec![
        (worst <= 1e-10, format!("radius 1: max |bits - (log2(4/3) + log2(6n+1)/n)| = {worst:.3e} over n ≤ 200")),
        ((at_100 - 0.41504).abs() <= 0.05, format!("optimized n = 100: {at_100:.5} vs 0.41504 ± 0.05 [{}]", trend.join(", "))),
        (elapsed < Duration::from_secs(5), format!("runtime {:.3}s < 5s", elapsed.as_secs_f64())),
    ];
    report(4, "finite-n identity and convergence", &checks, elapsed);
}

#[test]
fn criterion_05_protocol_exactness() {
    let start = Instant::now();
    let mut checks = Vec::new();
    for (name, deg) in [("generic", library::ghz_to_w(3).unwrap()), ("combinatorial", combinatorial())] {
        let radius = symmetric_exponent(&deg).unwrap().certificate.radius.unwrap();
        // The combinatorial optimum sits on |z| = 1; any radius works for exactness.
        let radius = if (radius - 1.0).abs() < 1e-3 { 0.9 } else { radius };
        for n in 1..=2 {
            let t = n * deg.error_degree() + 1;
            let points = roots_of_unity_config(t, radius).unwrap();
            let weights = canonical_gamma(&points, n, &deg).unwrap();
            let sim = simulate_protocol(&deg, n, &points, &weights).unwrap();
            let closed = closed_form_objective(&deg, &points, n).unwrap().log2_value;
            let predicted = (-(deg.k() as f64) * (t as f64).log2() - closed).exp2();
            let norms = sim.contraction_norms.clone().unwrap();
            let worst = norms.iter().copied().fold(0.0, f64::max);
            checks.push((sim.residual <= 1e-8, format!("{name} n = {n}: residual {:.3e}", sim.residual)));
            checks.push((
                (sim.success_prob - predicted).abs() <= 1e-10,
                format!("{name} n = {n}: probability {:.6e} vs closed form {predicted:.6e}", sim.success_prob),
            ));
            checks.push((worst <= 1.0 + 1e-9, format!("{name} n = {n}: contraction norm {worst:.12}")));
        }
    }
    let elapsed = start.elapsed();
    checks.push((elapsed < Duration::from_secs(10), format!("runtime {:.3}s < 10s", elapsed.as_secs_f64())));
    report(5, "protocol simulation", &checks, elapsed);
}

#[test]
fn criterion_06_tradeoff_curve() {
    let start = Instant::now();
    let deg = combinatorial();
    let curve = tradeoff_curve(&deg, &rate_grid(50)).unwrap();
    let r1 = curve.points.last().unwrap().exponent;
    let small = symmetric_tradeoff_exponent(&deg, 0.01).unwrap().exponent;
    let above = curve
        .points
        .iter()
        .zip(&curve.baseline)
        .filter(|(p, b)| p.exponent > b.exponent + 1e-9)
        .count();
    let drops = curve.points.windows(2).filter(|w| w[1].exponent < w[0].exponent - 1e-9).count();
    let elapsed = start.elapsed();
    let checks = vec![
        ((r1 - 0.41504).abs() <= 1e-4, format!("r(1) = {r1:.8}")),
        (above == 0, format!("{above} grid points above the time-sharing line")),
        (drops == 0, format!("{drops} decreases along the grid")),
        (small < 0.02, format!("r(0.01) = {small:.3e} < 0.02")),
        (elapsed < Duration::from_secs(5), format!("runtime {:.3}s < 5s", elapsed.as_secs_f64())),
    ];
    report(6, "rate/exponent trade-off curve", &checks, elapsed);
}

#[test]
fn criterion_07_best_exponent_over_rate() {
    let start = Instant::now();
    let deg = combinatorial();
    let best = best_exponent_over_rate(&deg).unwrap();
    let curve = tradeoff_curve(&deg, &rate_grid(50)).unwrap();
    let grid_min = curve.points.iter().map(|p| p.exponent).fold(f64::INFINITY, f64::min);
    let checks = vec![
        (best.abs() <= 1e-6, format!("best exponent {best:.3e} vs 0 ± 1e-6")),
        ((best - grid_min).abs() <= 2e-3, format!("grid minimum {grid_min:.3e}, difference {:.3e}", (best - grid_min).abs())),
    ];
    report(7, "best exponent over the rate", &checks, start.elapsed());
}

fn random_vectors(rng: &mut ChaCha8Rng, count: usize, d: usize) -> Vec<Vec<C64>> {
    (0..count)
        .map(|_| (0..d).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect())
        .collect()
}

fn subsets(t: usize, d: usize) -> Vec<Vec<usize>> {
    (0u32..1 << t).filter(|m| m.count_ones() as usize == d).map(|m| (0..t).filter(|i| m >> i & 1 == 1).collect()).collect()
}

#[test]
fn criterion_08_subset_pruning() {
    let start = Instant::now();
    let mut violations = 0;
    let mut oracle_violations = 0;
    let mut worst_ratio: f64 = 0.0;
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(1..=6);
        let t = rng.gen_range(d..=12);
        let vectors = random_vectors(&mut rng, t, d);
        let u = random_vectors(&mut rng, 1, d).pop().unwrap();
        let pruned = prune_points(&vectors, &u).unwrap();
        let bound = (t - d + 1) as f64 * pruned.full_value;
        let exhaustive = subsets(t, d)
            .iter()
            .filter_map(|s| quadratic_form(&vectors, s, &u).ok())
            .fold(f64::INFINITY, f64::min);
        worst_ratio = worst_ratio.max(pruned.value / bound);
        if pruned.kept.len() != d || pruned.value > bound * (1.0 + 1e-9) {
            violations += 1;
        }
        if exhaustive > pruned.value * (1.0 + 1e-9) || exhaustive > bound * (1.0 + 1e-9) {
            oracle_violations += 1;
        }
    }
    let checks = vec![
        (violations == 0, format!("{violations} greedy subsets above (t-d+1) times the full form")),
        (oracle_violations == 0, format!("{oracle_violations} disagreements with the exhaustive oracle")),
        (worst_ratio <= 1.0 + 1e-9, format!("largest greedy/bound ratio {worst_ratio:.6}")),
    ];
    report(8, "subset pruning bound", &checks, start.elapsed());
}

#[test]
fn criterion_09_potential_sandwich() {
    let start = Instant::now();
    let mut checks = Vec::new();
    let trivial = WeightPair::trivial();
    let fekete =
        weighted_fekete(&CompactDomain::Annulus { inner: 0.5, outer: 2.0 }, &trivial, 64, GridResolution::default()).unwrap();
    let equilibrium = PlanarMeasure::uniform_circle(2.0).unwrap();
    let supinf = supinf_objective(&equilibrium, &trivial).unwrap();
    let log_cap = 1.0;
    checks.push(((fekete.delta_n - log_cap).abs() <= 0.1, format!("delta_64 = {:.6} vs log2 capacity 1", fekete.delta_n)));
    checks.push(((supinf - log_cap).abs() <= 1e-9, format!("sup-inf of the equilibrium measure {supinf:.12}")));
    checks.push(((fekete.delta_n - supinf).abs() <= 0.1, format!("|delta_64 - sup-inf| = {:.6}", (fekete.delta_n - supinf).abs())));

    let measures = [
        PlanarMeasure::uniform_circle(1.0).unwrap(),
        PlanarMeasure::atom(C64::new(0.0, 0.0)).unwrap(),
        PlanarMeasure::new(vec![
            (0.3, Component::UniformDisk { radius: 0.5 }),
            (0.7, Component::FourierCircle { radius: 1.5, coefficients: vec![C64::new(0.2, 0.1), C64::new(0.0, -0.1)] }),
        ])
        .unwrap(),
    ];
    let probes = [C64::new(2.5, 0.0), C64::new(-1.0, 2.2), C64::new(0.0, -3.0), C64::new(3.1, 1.4)];
    let mut worst_laplacian: f64 = 0.0;
    for sigma in &measures {
        for &z in &probes {
            if sigma.distance_to_support(z) >= 0.5 {
                worst_laplacian = worst_laplacian.max(harmonicity_check(sigma, z, 1e-3).unwrap().abs());
            }
        }
    }
    checks.push((worst_laplacian <= 1e-4, format!("largest Laplacian off the support {worst_laplacian:.3e}")));

    let mut worst_circle: f64 = 0.0;
    for radius in [0.5, 1.0, 2.0] {
        for z in [C64::new(0.1, 0.2), C64::from_polar(3.0, 0.7), C64::from_polar(0.9 * radius, 2.0), C64::from_polar(1.2 * radius, -1.0)] {
            let quad = circle_mean(|th| (z - C64::from_polar(radius, th)).norm().ln(), 4096);
            worst_circle = worst_circle.max((quad - circle_log_integral(radius, z)).abs());
        }
    }
    checks.push((worst_circle <= 1e-10, format!("circle log integral vs trapezoid, worst {worst_circle:.3e}")));
    report(9, "potential-theory sandwich", &checks, start.elapsed());
}

/// Fewest edges whose removal disconnects the graph, by enumerating removal
/// sets in order of size.
fn brute_force_connectivity(vertices: usize, edges: &[Vec<usize>]) -> usize {
    let connected = |keep: &[bool]| {
        let mut reached = vec![false; vertices];
        reached[0] = true;
        let mut grown = true;
        while grown {
            grown = false;
            for (e, _) in edges.iter().zip(keep).filter(|(_, &k)| k) {
                if e.iter().any(|&v| reached[v]) && e.iter().any(|&v| !reached[v]) {
                    e.iter().for_each(|&v| reached[v] = true);
                    grown = true;
                }
            }
        }
        reached.iter().all(|&r| r)
    };
    let m = edges.len();
    (0..=m)
        .find(|&size| {
            (0u32..1 << m).filter(|mask| mask.count_ones() as usize == size).any(|mask| {
                let keep: Vec<bool> = (0..m).map(|i| mask >> i & 1 == 0).collect();
                !connected(&keep)
            })
        })
        .unwrap_or(m)
}

#[test]
fn criterion_10_hypergraph() {
    let start = Instant::now();
    let (rate, exponent) = hypergraph_ghz_exponent(&library::triangle_network()).unwrap();
    let mut mismatches = 0;
    let mut connected_cases = 0;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count = rng.gen_range(4..=12);
        let edges: Vec<Vec<usize>> = (0..count)
            .map(|_| {
                let a = rng.gen_range(0..6);
                let b = (a + rng.gen_range(1..6)) % 6;
                vec![a, b]
            })
            .collect();
        let oracle = brute_force_connectivity(6, &edges);
        let got = edge_connectivity(&Hypergraph::new(6, edges).unwrap());
        match (oracle, got) {
            (0, Err(_)) => {}
            (o, Ok(g)) if o == g => connected_cases += 1,
            _ => mismatches += 1,
        }
    }
    let checks = vec![
        ((rate, exponent) == (2.0, 1.0), format!("K3: rate {rate}, exponent {exponent}")),
        (mismatches == 0, format!("{mismatches} mismatches on 200 random multigraphs ({connected_cases} connected)")),
    ];
    report(10, "hypergraph GHZ extraction", &checks, start.elapsed());
}
