//! Multipartite pure states and local (product) operators acting on them.
//!
//! Amplitudes are stored in mixed radix with party 1 most significant, so
//! for dims `[2, 3]` the index of `|a b⟩` is `3a + b`.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};

pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct MultipartiteState {
    dims: Vec<usize>,
    amplitudes: Vec<C64>,
}

impl MultipartiteState {
    /// Builds a normalized state; the norm must be 1 within `NORM_TOL`.
    pub fn new(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        check_shape(&dims, amplitudes.len())?;
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let norm = crate::linalg::norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { dims, amplitudes })
    }

    /// Builds a state from arbitrary nonzero amplitudes, rescaling to unit norm.
    pub fn normalized(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        check_shape(&dims, amplitudes.len())?;
        let norm = crate::linalg::norm(&amplitudes);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(dims, amplitudes.into_iter().map(|z| z / norm).collect())
    }

    /// Computational basis state `|index_1 … index_k⟩`.
    pub fn basis(dims: Vec<usize>, index: &[usize]) -> Result<Self> {
        let flat = flat_index(&dims, index)?;
        let mut amps = vec![ZERO; dims.iter().product()];
        amps[flat] = C64::new(1.0, 0.0);
        Self::new(dims, amps)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `self ⊗ other`, parties of `self` first.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|&a| other.amplitudes.iter().map(move |&b| a * b))
            .collect();
        Self { dims, amplitudes }
    }

    /// `self^{⊗n}` laid out copy after copy.
    pub fn power(&self, n: usize) -> Self {
        let mut out = Self { dims: vec![], amplitudes: vec![C64::new(1.0, 0.0)] };
        for _ in 0..n {
            out = out.tensor(self);
        }
        out
    }
}

fn check_shape(dims: &[usize], len: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::ShapeMismatch("local dimensions must be positive".into()));
    }
    let total: usize = dims.iter().product();
    if total != len {
        return Err(Error::ShapeMismatch(format!("{len} amplitudes for dimensions {dims:?}")));
    }
    Ok(())
}

/// Mixed-radix flat index of a basis tuple.
pub fn flat_index(dims: &[usize], index: &[usize]) -> Result<usize> {
    if dims.len() != index.len() {
        return Err(Error::ShapeMismatch(format!("index {index:?} for dims {dims:?}")));
    }
    let mut flat = 0;
    for (&d, &i) in dims.iter().zip(index) {
        if i >= d {
            return Err(Error::InvalidInput(format!("index {index:?} out of range for dims {dims:?}")));
        }
        flat = flat * d + i;
    }
    Ok(flat)
}

/// Applies `maps[0] ⊗ … ⊗ maps[k-1]` to a vector with local dimensions
/// `dims`, one party at a time. Returns the output dimensions and amplitudes.
pub fn tensor_apply(maps: &[&CMatrix], dims: &[usize], vector: &[C64]) -> Result<(Vec<usize>, Vec<C64>)> {
    if maps.len() != dims.len() {
        return Err(Error::ShapeMismatch(format!("{} maps for {} parties", maps.len(), dims.len())));
    }
    check_shape(dims, vector.len())?;
    let mut cur_dims = dims.to_vec();
    let mut cur = vector.to_vec();
    for (j, m) in maps.iter().enumerate() {
        if m.cols() != cur_dims[j] {
            return Err(Error::ShapeMismatch(format!(
                "map {j} has {} columns, party dimension is {}",
                m.cols(),
                cur_dims[j]
            )));
        }
        cur = apply_on_axis(m, &cur_dims, j, &cur);
        cur_dims[j] = m.rows();
    }
    Ok((cur_dims, cur))
}

fn apply_on_axis(m: &CMatrix, dims: &[usize], axis: usize, v: &[C64]) -> Vec<C64> {
    let before: usize = dims[..axis].iter().product();
    let after: usize = dims[axis + 1..].iter().product();
    let (rows, cols) = (m.rows(), m.cols());
    let mut out = vec![ZERO; before * rows * after];
    for a in 0..before {
        let src = &v[a * cols * after..(a + 1) * cols * after];
        let dst = &mut out[a * rows * after..(a + 1) * rows * after];
        for r in 0..rows {
            let row = m.row(r);
            let dst_row = &mut dst[r * after..(r + 1) * after];
            for (c, &coef) in row.iter().enumerate() {
                if coef == ZERO {
                    continue;
                }
                let src_row = &src[c * after..(c + 1) * after];
                for (d, &s) in dst_row.iter_mut().zip(src_row) {
                    *d += coef * s;
                }
            }
        }
    }
    out
}
