//! Double description vertex enumeration.
//!
//! The polytope `{x : A x <= b}` is homogenized to the cone
//! `{(x0, x) : b x0 - A x >= 0, x0 >= 0}`. Starting from a simplicial cone on
//! `d + 1` independent rows, the remaining rows are inserted one at a time;
//! new extreme rays are formed from pairs of rays on opposite sides that are
//! adjacent by the combinatorial test. Rays are kept as primitive integer
//! vectors, so the arithmetic stays exact and small.

use std::time::Instant;

use super::{canonical_row, HRep, VRep};
use crate::error::{Error, Result};
use crate::ratlinalg::lp::feasible_point;
use crate::ratlinalg::{dot, RatMatrix, Rational};

/// Tight constraint indices (into the enumerated `HRep`) for each vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incidence {
    pub sets: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Default)]
pub struct DdOptions {
    /// Abort when the intermediate ray count exceeds this.
    pub max_rays: Option<usize>,
    pub deadline: Option<Instant>,
    /// Explicit insertion order of the constraint rows (a permutation of
    /// `0..h.len()`); the default sorts by sparsity, then lexicographically.
    pub order: Option<Vec<usize>>,
}

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn subset_of(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

struct Ray {
    coords: Vec<Rational>,
    zeros: Bits,
    zero_count: u32,
}

fn primitive(v: Vec<Rational>) -> Vec<Rational> {
    let s = Rational::primitive_scale(&v);
    if s.is_one() {
        v
    } else {
        v.iter().map(|x| x * &s).collect()
    }
}

pub fn enumerate_vertices(h: &HRep) -> Result<(VRep, Incidence)> {
    enumerate_vertices_with(h, &DdOptions::default())
}

/// Vertices in lexicographic order with their tight sets. Fails with
/// [`Error::Infeasible`] on empty and [`Error::Unbounded`] on unbounded input.
pub fn enumerate_vertices_with(h: &HRep, opts: &DdOptions) -> Result<(VRep, Incidence)> {
    let d = h.dim();
    if feasible_point(d, h.rows()).is_none() {
        return Err(Error::Infeasible);
    }
    let order: Vec<usize> = match &opts.order {
        Some(o) => {
            let mut check = o.clone();
            check.sort_unstable();
            if check != (0..h.len()).collect::<Vec<_>>() {
                return Err(Error::Inconsistent("insertion order is not a permutation".into()));
            }
            o.clone()
        }
        None => default_order(h),
    };

    // Homogenized rows: position 0 is x0 >= 0.
    let mut cone: Vec<Vec<Rational>> = Vec::with_capacity(h.len() + 1);
    let mut x0 = vec![Rational::zero(); d + 1];
    x0[0] = Rational::one();
    cone.push(x0);
    for &i in &order {
        let (a, b) = canonical_row(h.coeffs(i), h.rhs(i));
        let mut row = Vec::with_capacity(d + 1);
        row.push(b);
        row.extend(a.iter().map(|x| -x));
        cone.push(row);
    }
    let rays = cone_rays(&cone, d + 1, opts)?;

    let mut verts: Vec<Vec<Rational>> = Vec::with_capacity(rays.len());
    for ray in rays {
        if !ray[0].is_positive() {
            return Err(Error::Unbounded);
        }
        let inv = ray[0].recip();
        verts.push(ray[1..].iter().map(|x| x * &inv).collect());
    }
    verts.sort();
    let sets = verts.iter().map(|v| h.tight_set(v)).collect();
    let vrep = VRep::new(d, verts)?.with_names(h.names().to_vec())?;
    Ok((vrep, Incidence { sets }))
}

fn default_order(h: &HRep) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..h.len()).collect();
    let keys: Vec<(usize, Vec<Rational>, Rational)> = h
        .rows()
        .map(|(a, b)| {
            let (a, b) = canonical_row(a, b);
            (a.iter().filter(|x| !x.is_zero()).count(), a, b)
        })
        .collect();
    idx.sort_by(|&i, &j| keys[i].cmp(&keys[j]).then(i.cmp(&j)));
    idx
}

/// Extreme rays of the pointed cone `{y : row · y >= 0}`.
fn cone_rays(rows: &[Vec<Rational>], dim: usize, opts: &DdOptions) -> Result<Vec<Vec<Rational>>> {
    let n = rows.len();
    // Initial simplicial cone on the first independent rows.
    let mut basis: Vec<usize> = Vec::new();
    let mut chosen: Vec<Vec<Rational>> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        chosen.push(r.clone());
        if crate::ratlinalg::rank_of(&chosen) == chosen.len() {
            basis.push(i);
            if basis.len() == dim {
                break;
            }
        } else {
            chosen.pop();
        }
    }
    if basis.len() < dim {
        return Err(Error::Unbounded);
    }
    // Columns of the inverse of the basis matrix.
    let mut aug = RatMatrix::zeros(dim, 2 * dim);
    for (r, &i) in basis.iter().enumerate() {
        for j in 0..dim {
            aug[(r, j)] = rows[i][j].clone();
        }
        aug[(r, dim + r)] = Rational::one();
    }
    aug.rref_limited(dim);
    let mut rays: Vec<Ray> = (0..dim)
        .map(|k| {
            let coords = primitive((0..dim).map(|j| aug[(j, dim + k)].clone()).collect());
            let mut zeros = Bits::new(n);
            for (r, &i) in basis.iter().enumerate() {
                if r != k {
                    zeros.set(i);
                }
            }
            let zero_count = zeros.count();
            Ray { coords, zeros, zero_count }
        })
        .collect();

    let in_basis: std::collections::HashSet<usize> = basis.iter().copied().collect();
    let min_common = dim.saturating_sub(2) as u32;
    for (i, row) in rows.iter().enumerate() {
        if in_basis.contains(&i) {
            continue;
        }
        if let Some(deadline) = opts.deadline {
            if Instant::now() > deadline {
                return Err(Error::BudgetExceeded("time limit during vertex enumeration".into()));
            }
        }
        let vals: Vec<Rational> = rays.iter().map(|r| dot(row, &r.coords)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();
        if neg.is_empty() {
            for (k, r) in rays.iter_mut().enumerate() {
                if vals[k].is_zero() {
                    r.zeros.set(i);
                    r.zero_count += 1;
                }
            }
            continue;
        }
        let mut fresh: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zeros.and(&rays[q].zeros);
                let c = common.count();
                if c < min_common {
                    continue;
                }
                let blocked = rays
                    .iter()
                    .enumerate()
                    .any(|(k, r)| k != p && k != q && r.zero_count >= c && common.subset_of(&r.zeros));
                if blocked {
                    continue;
                }
                // vals[p] > 0 > vals[q]: the combination vanishes on the new row.
                let a = &vals[p];
                let b = -&vals[q];
                let coords = primitive(
                    rays[q].coords.iter().zip(&rays[p].coords).map(|(x, y)| a.mul_add(x, &(&b * y))).collect(),
                );
                let mut zeros = common;
                zeros.set(i);
                fresh.push(Ray { coords, zeros, zero_count: c + 1 });
            }
        }
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + fresh.len());
        for (k, mut r) in rays.into_iter().enumerate() {
            if vals[k].is_negative() {
                continue;
            }
            if vals[k].is_zero() {
                r.zeros.set(i);
                r.zero_count += 1;
            }
            next.push(r);
        }
        next.extend(fresh);
        rays = next;
        if let Some(max) = opts.max_rays {
            if rays.len() > max {
                return Err(Error::BudgetExceeded(format!(
                    "more than {max} intermediate rays during vertex enumeration"
                )));
            }
        }
    }
    Ok(rays.into_iter().map(|r| r.coords).collect())
}
