use rayon::prelude::*;

use crate::error::{Error, Result};

/// Parties `0..vertices` with one two-level GHZ state per hyperedge.
/// Parallel edges are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    vertices: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(vertices: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        if vertices < 2 || vertices > 20 {
            return Err(Error::InvalidInput(format!("{vertices} vertices, need 2..=20")));
        }
        for e in &edges {
            if e.len() < 2 {
                return Err(Error::InvalidInput(format!("hyperedge {e:?} has fewer than two vertices")));
            }
            if e.iter().any(|&v| v >= vertices) {
                return Err(Error::InvalidInput(format!("hyperedge {e:?} names a missing vertex")));
            }
            let mut sorted = e.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != e.len() {
                return Err(Error::InvalidInput(format!("hyperedge {e:?} repeats a vertex")));
            }
        }
        Ok(Self { vertices, edges })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    fn edge_masks(&self) -> Vec<u32> {
        self.edges.iter().map(|e| e.iter().fold(0u32, |m, &v| m | (1 << v))).collect()
    }

    pub fn is_connected(&self) -> bool {
        let masks = self.edge_masks();
        let mut reached = 1u32;
        loop {
            let grown = masks.iter().filter(|&&m| m & reached != 0).fold(reached, |r, &m| r | m);
            if grown == reached {
                break;
            }
            reached = grown;
        }
        reached == (1u32 << self.vertices) - 1
    }
}

/// Fewest hyperedges crossing any bipartition of the vertices.
pub fn edge_connectivity(h: &Hypergraph) -> Result<usize> {
    if !h.is_connected() {
        return Err(Error::Disconnected);
    }
    let masks = h.edge_masks();
    let full = (1u32 << h.vertices) - 1;
    // Sides containing the last vertex are the complements of these.
    let half = 1u32 << (h.vertices - 1);
    let best = (1..half)
        .into_par_iter()
        .map(|side| masks.iter().filter(|&&m| m & side != 0 && m & (full ^ side) != 0).count())
        .min()
        .expect("at least one bipartition");
    Ok(best)
}

/// `(λ(H), |E(H)| - λ(H))`: GHZ pairs extractable per copy and the exponent
/// for doing so.
pub fn hypergraph_ghz_exponent(h: &Hypergraph) -> Result<(f64, f64)> {
    let lambda = edge_connectivity(h)?;
    Ok((lambda as f64, (h.edges.len() - lambda) as f64))
}
