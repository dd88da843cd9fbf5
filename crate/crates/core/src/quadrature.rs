//! Quadrature rules: periodic trapezoid and composite Gauss–Legendre.

use std::f64::consts::{PI, TAU};

/// Mean of `f` over `[0, 2π)` with the `n`-point periodic trapezoid rule.
pub fn circle_mean(f: impl Fn(f64) -> f64, n: usize) -> f64 {
    (0..n).map(|j| f(TAU * j as f64 / n as f64)).sum::<f64>() / n as f64
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss–Legendre over the given breakpoints.
pub fn integrate_pieces(f: impl Fn(f64) -> f64, breaks: &[f64], rule: &[(f64, f64)]) -> f64 {
    breaks
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
            rule.iter().map(|&(x, wt)| wt * f(mid + half * x)).sum::<f64>() * half
        })
        .sum()
}

/// Normalized Fourier coefficient `(1/2π) ∫ -ln|1 - e^{iφ}| e^{-imφ} dφ`,
/// integrated numerically with geometric grading toward the log singularity.
/// Used to check the kernel identity `c_m = 1/(2|m|)`.
pub fn log_kernel_coefficient(m: i64) -> f64 {
    let rule = gauss_legendre(20);
    // Breakpoints on (0, π]: geometric near 0, then at most π/(8|m|+8) wide.
    let mut breaks = vec![0.0];
    let graded: Vec<f64> = (0..60).map(|j| PI * 0.5f64.powi(60 - j)).collect();
    breaks.extend(graded.iter().copied().filter(|&x| x < PI / 8.0));
    let start = *breaks.last().unwrap();
    let pieces = 8 * (m.unsigned_abs() as usize + 1);
    let width = (PI - start) / pieces as f64;
    breaks.extend((1..=pieces).map(|j| start + width * j as f64));
    let kernel = |phi: f64| -(2.0 * (phi / 2.0).sin()).ln() * (m as f64 * phi).cos();
    // Symmetric integrand: (1/2π)∫_0^{2π} = (1/π)∫_0^π.
    integrate_pieces(kernel, &breaks, &rule) / PI
}
