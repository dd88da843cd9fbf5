use std::collections::HashSet;

use super::{Degeneration, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::laurent::LaurentMatrix;
use crate::linalg::{C64, ZERO};
use crate::state::{flat_index, MultipartiteState};

/// A degeneration given by integer weights on basis indices: `u[j][i]` is the
/// power of z attached to index `i` of party `j`. Support tuples in `phi`
/// must have weight sum zero, the rest of the support positive sums.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinatorialSpec {
    pub index_sizes: Vec<usize>,
    pub psi_support: Vec<(Vec<usize>, C64)>,
    pub phi: Vec<Vec<usize>>,
    pub u: Vec<Vec<i32>>,
}

impl CombinatorialSpec {
    pub fn k(&self) -> usize {
        self.index_sizes.len()
    }

    fn weight(&self, index: &[usize]) -> i64 {
        index.iter().zip(&self.u).map(|(&i, u)| u[i] as i64).sum()
    }

    pub fn check(&self) -> Result<()> {
        let k = self.k();
        if k == 0 || self.index_sizes.contains(&0) {
            return Err(Error::InvalidInput("index sets must be nonempty".into()));
        }
        if self.u.len() != k || self.u.iter().zip(&self.index_sizes).any(|(u, &n)| u.len() != n) {
            return Err(Error::ShapeMismatch("weight maps do not match index set sizes".into()));
        }
        let mut seen = HashSet::new();
        let mut total = 0.0;
        for (idx, amp) in &self.psi_support {
            flat_index(&self.index_sizes, idx)?;
            if !seen.insert(idx.clone()) {
                return Err(Error::InvalidInput(format!("support index {idx:?} repeated")));
            }
            if !amp.re.is_finite() || !amp.im.is_finite() {
                return Err(Error::NonFinite("support amplitude"));
            }
            total += amp.norm_sqr();
        }
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm: total.sqrt() });
        }
        if self.phi.is_empty() {
            return Err(Error::EmptyPhi);
        }
        let phi: HashSet<&Vec<usize>> = self.phi.iter().collect();
        if phi.len() != self.phi.len() {
            return Err(Error::InvalidInput("target support has repeated indices".into()));
        }
        for idx in &self.phi {
            if !seen.contains(idx) {
                return Err(Error::InvalidInput(format!("target index {idx:?} outside the input support")));
            }
        }
        for (idx, _) in &self.psi_support {
            let w = self.weight(idx);
            if phi.contains(idx) && w != 0 {
                return Err(Error::InvalidInput(format!("target index {idx:?} has weight {w}, expected 0")));
            }
            if !phi.contains(idx) && w <= 0 {
                return Err(Error::InvalidInput(format!("index {idx:?} outside the target has weight {w} <= 0")));
            }
        }
        Ok(())
    }
}

/// Builds the diagonal maps `q^{-1/(2k)} Σ_i z^{u_j(i)} |i⟩⟨i|` and returns the
/// degeneration together with `q = Σ_{α∈Φ} |ψ_α|²`.
pub fn from_combinatorial(spec: &CombinatorialSpec) -> Result<(Degeneration, f64)> {
    spec.check()?;
    let phi_set: HashSet<&Vec<usize>> = spec.phi.iter().collect();
    let q: f64 = spec
        .psi_support
        .iter()
        .filter(|(idx, _)| phi_set.contains(idx))
        .map(|(_, a)| a.norm_sqr())
        .sum();
    if q <= 0.0 {
        return Err(Error::EmptyPhi);
    }
    let k = spec.k();
    let scale = C64::new(q.powf(-1.0 / (2.0 * k as f64)), 0.0);
    let maps = spec
        .u
        .iter()
        .map(|u| LaurentMatrix::diagonal(&u.iter().map(|&p| (p, scale)).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;

    let total: usize = spec.index_sizes.iter().product();
    let mut psi = vec![ZERO; total];
    let mut phi = vec![ZERO; total];
    for (idx, amp) in &spec.psi_support {
        let flat = flat_index(&spec.index_sizes, idx)?;
        psi[flat] = *amp;
        if phi_set.contains(idx) {
            phi[flat] = *amp / q.sqrt();
        }
    }
    let psi = MultipartiteState::new(spec.index_sizes.clone(), psi)?;
    let phi = MultipartiteState::normalized(spec.index_sizes.clone(), phi)?;
    Ok((Degeneration::new(maps, psi, phi, DEFAULT_TOL)?, q))
}

/// `-log₂ q`, the exponent achieved by the combinatorial construction.
pub fn combinatorial_exponent(spec: &CombinatorialSpec) -> Result<f64> {
    let (_, q) = from_combinatorial(spec)?;
    Ok(-q.log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degeneration::library::ghz_to_w_combinatorial;

    #[test]
    fn ghz_w_exponent() {
        let r = combinatorial_exponent(&ghz_to_w_combinatorial()).unwrap();
        assert!((r - (4.0f64 / 3.0).log2()).abs() < 1e-12);
    }

    #[test]
    fn full_target_is_a_restriction() {
        let mut spec = ghz_to_w_combinatorial();
        spec.phi = spec.psi_support.iter().map(|(i, _)| i.clone()).collect();
        spec.u = vec![vec![0, 0]; 3];
        let (deg, q) = from_combinatorial(&spec).unwrap();
        assert_eq!(q, 1.0);
        assert_eq!(deg.phi(), deg.psi());
        assert_eq!(combinatorial_exponent(&spec).unwrap(), 0.0);
    }

    #[test]
    fn uniform_eight_with_five_targets() {
        let amp = C64::new(1.0 / 8f64.sqrt(), 0.0);
        let support: Vec<Vec<usize>> = (0..8).map(|i| vec![i]).collect();
        let spec = CombinatorialSpec {
            index_sizes: vec![8],
            psi_support: support.iter().map(|i| (i.clone(), amp)).collect(),
            phi: support[..5].to_vec(),
            u: vec![vec![0, 0, 0, 0, 0, 1, 2, 3]],
        };
        let r = combinatorial_exponent(&spec).unwrap();
        assert!((r + (5.0f64 / 8.0).log2()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_weights() {
        let mut spec = ghz_to_w_combinatorial();
        spec.u[0] = vec![-2, -1];
        assert!(matches!(from_combinatorial(&spec), Err(Error::InvalidInput(_))));
        let mut spec = ghz_to_w_combinatorial();
        spec.phi.clear();
        assert!(matches!(from_combinatorial(&spec), Err(Error::EmptyPhi)));
    }
}
