use super::{HRep, Incidence, VRep};
use crate::error::{Error, Result};
use crate::ratlinalg::{rank_of, Rational};

/// Undirected simple graph on vertex indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyGraph {
    pub vertex_count: usize,
    /// Sorted pairs `(u, v)` with `u < v`.
    pub edges: Vec<(usize, usize)>,
}

impl AdjacencyGraph {
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }
}

fn to_bits(set: &[usize], n: usize) -> Vec<u64> {
    let mut bits = vec![0u64; n.div_ceil(64).max(1)];
    for &i in set {
        bits[i / 64] |= 1 << (i % 64);
    }
    bits
}

/// Two vertices are adjacent iff their common tight constraints have rank
/// `dim - 1`. Candidate pairs are first filtered combinatorially: no third
/// vertex may be tight on all of their common constraints.
pub fn adjacency(h: &HRep, v: &VRep, incidence: &Incidence) -> Result<AdjacencyGraph> {
    let n = v.len();
    let d = h.dim();
    if incidence.sets.len() != n {
        return Err(Error::Inconsistent(format!("{} incidence sets for {} vertices", incidence.sets.len(), n)));
    }
    if v.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: v.dim() });
    }
    for (k, set) in incidence.sets.iter().enumerate() {
        if let Some(&bad) = set.iter().find(|&&i| i >= h.len()) {
            return Err(Error::Inconsistent(format!("constraint index {bad} out of range")));
        }
        if h.tight_set(&v.vertices()[k]) != *set {
            return Err(Error::Inconsistent(format!("incidence of vertex {k} does not match")));
        }
    }
    let m = h.len();
    let bits: Vec<Vec<u64>> = incidence.sets.iter().map(|s| to_bits(s, m)).collect();
    let counts: Vec<u32> = bits.iter().map(|b| b.iter().map(|w| w.count_ones()).sum()).collect();
    let need = d.saturating_sub(1) as u32;
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let common: Vec<u64> = bits[a].iter().zip(&bits[b]).map(|(x, y)| x & y).collect();
            let c: u32 = common.iter().map(|w| w.count_ones()).sum();
            if c < need {
                continue;
            }
            let blocked = (0..n)
                .any(|w| w != a && w != b && counts[w] >= c && common.iter().zip(&bits[w]).all(|(x, y)| x & !y == 0));
            if blocked {
                continue;
            }
            let rows: Vec<Vec<Rational>> = incidence.sets[a]
                .iter()
                .filter(|i| incidence.sets[b].contains(i))
                .map(|&i| h.coeffs(i).to_vec())
                .collect();
            if rank_of(&rows) + 1 == d {
                edges.push((a, b));
            }
        }
    }
    Ok(AdjacencyGraph { vertex_count: n, edges })
}
