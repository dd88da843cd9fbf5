//! One- and two-dimensional minimizers used for radius and point searches.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of `f` on `[lo, hi]`. Returns the
/// abscissa and value of the best point seen, endpoints included.
pub fn golden_section(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            if fd < best.1 {
                best = (d, fd);
            }
        }
    }
    for x in [lo, hi] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Splits `[lo, hi]` into `starts` equal pieces, runs golden section in each
/// and keeps the best. Guards against kinks and several local minima.
pub fn multistart_golden(f: impl Fn(f64) -> f64, lo: f64, hi: f64, starts: usize, tol: f64) -> (f64, f64) {
    let starts = starts.max(1);
    let width = (hi - lo) / starts as f64;
    (0..starts)
        .map(|s| {
            let a = lo + width * s as f64;
            golden_section(&f, a, a + width, tol)
        })
        .fold((f64::NAN, f64::INFINITY), |best, cand| if cand.1 < best.1 || best.0.is_nan() { cand } else { best })
}

/// Search interval for `log₂ |z|` in radial optimizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusBracket {
    pub log2_lo: f64,
    pub log2_hi: f64,
}

impl Default for RadiusBracket {
    fn default() -> Self {
        Self { log2_lo: -8.0, log2_hi: 8.0 }
    }
}

impl RadiusBracket {
    pub fn from_radii(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::InvalidInput(format!("radius bracket [{lo}, {hi}]")));
        }
        Ok(Self { log2_lo: lo.log2(), log2_hi: hi.log2() })
    }

    /// Multistart golden section over `x = log₂ r` with 8 starts.
    pub fn minimize(&self, f: impl Fn(f64) -> f64, tol: f64) -> (f64, f64) {
        multistart_golden(f, self.log2_lo, self.log2_hi, 8, tol)
    }
}

/// Nelder–Mead simplex minimization in two dimensions.
pub fn nelder_mead_2d(f: impl Fn([f64; 2]) -> f64, start: [f64; 2], step: f64, tol: f64, max_iter: usize) -> ([f64; 2], f64) {
    let mut simplex = [
        (start, f(start)),
        ([start[0] + step, start[1]], f([start[0] + step, start[1]])),
        ([start[0], start[1] + step], f([start[0], start[1] + step])),
    ];
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    for _ in 0..max_iter {
        simplex.sort_by(|x, y| x.1.total_cmp(&y.1));
        let spread = (simplex[2].1 - simplex[0].1).abs();
        let size = (0..3)
            .map(|i| (simplex[i].0[0] - simplex[0].0[0]).abs() + (simplex[i].0[1] - simplex[0].0[1]).abs())
            .fold(0.0, f64::max);
        if spread <= tol && size <= tol {
            break;
        }
        let centroid = lerp(simplex[0].0, simplex[1].0, 0.5);
        let worst = simplex[2];
        let reflected = lerp(centroid, worst.0, -1.0);
        let fr = f(reflected);
        if fr < simplex[0].1 {
            let expanded = lerp(centroid, worst.0, -2.0);
            let fe = f(expanded);
            simplex[2] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[1].1 {
            simplex[2] = (reflected, fr);
        } else {
            let contracted = if fr < worst.1 { lerp(centroid, reflected, 0.5) } else { lerp(centroid, worst.0, 0.5) };
            let fc = f(contracted);
            if fc < worst.1.min(fr) {
                simplex[2] = (contracted, fc);
            } else {
                let best = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    let p = lerp(best, v.0, 0.5);
                    *v = (p, f(p));
                }
            }
        }
    }
    simplex.sort_by(|x, y| x.1.total_cmp(&y.1));
    simplex[0]
}
