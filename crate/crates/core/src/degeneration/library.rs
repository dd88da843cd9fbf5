//! Ready-made degenerations used by the fixtures and tests.

use super::{CombinatorialSpec, Degeneration, Hypergraph, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::laurent::LaurentMatrix;
use crate::linalg::{CMatrix, C64, ZERO};
use crate::state::MultipartiteState;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// k-party GHZ to W with the maps `[[1, -1], [z, 0]]` on every party and the
/// normalization `√(2/k)/z` folded into party 1. The GHZ sign is
/// `(-1)^{k+1}` so the `|0…0⟩` coefficient cancels at order zero.
pub fn ghz_to_w(k: usize) -> Result<Degeneration> {
    if k < 2 {
        return Err(Error::InvalidInput("GHZ to W needs at least two parties".into()));
    }
    let upper = CMatrix::from_rows(&[vec![c(1.0), c(-1.0)], vec![ZERO, ZERO]])?;
    let lower = CMatrix::from_rows(&[vec![ZERO, ZERO], vec![c(1.0), ZERO]])?;
    let plain = LaurentMatrix::new(2, 2, [(0, upper.clone()), (1, lower.clone())])?;
    let s = c((2.0 / k as f64).sqrt());
    let first = LaurentMatrix::new(2, 2, [(-1, upper.scale(s)), (0, lower.scale(s))])?;

    let mut maps = vec![first];
    maps.extend(std::iter::repeat(plain).take(k - 1));

    let dims = vec![2; k];
    let mut ghz = vec![ZERO; 1 << k];
    ghz[0] = c(1.0);
    ghz[(1 << k) - 1] = c(if k % 2 == 1 { 1.0 } else { -1.0 });
    let psi = MultipartiteState::normalized(dims.clone(), ghz)?;

    let mut w = vec![ZERO; 1 << k];
    for j in 0..k {
        w[1 << j] = c(1.0);
    }
    let phi = MultipartiteState::normalized(dims, w)?;
    Degeneration::new(maps, psi, phi, DEFAULT_TOL)
}

/// Three-party GHZ to W as a combinatorial degeneration in the `±` basis
/// (index 0 is `+`): weights `u(+) = 2`, `u(-) = -1`, GHZ support
/// `{+++, +--, -+-, --+}` and target support `{+--, -+-, --+}`.
pub fn ghz_to_w_combinatorial() -> CombinatorialSpec {
    let half = c(0.5);
    CombinatorialSpec {
        index_sizes: vec![2, 2, 2],
        psi_support: vec![
            (vec![0, 0, 0], half),
            (vec![0, 1, 1], half),
            (vec![1, 0, 1], half),
            (vec![1, 1, 0], half),
        ],
        phi: vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]],
        u: vec![vec![2, -1]; 3],
    }
}

/// The triangle network: three parties sharing one GHZ pair per edge.
pub fn triangle_network() -> Hypergraph {
    Hypergraph::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).expect("triangle is a valid hypergraph")
}
