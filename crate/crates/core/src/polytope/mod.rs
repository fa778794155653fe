//! Exact polyhedral kernel: H/V representations, redundancy removal,
//! Fourier–Motzkin projection, double-description vertex enumeration and
//! adjacency.

mod adjacency;
mod dd;
mod fm;
mod redundancy;

pub use adjacency::{adjacency, AdjacencyGraph};
pub use dd::{enumerate_vertices, enumerate_vertices_with, DdOptions, Incidence};
pub use fm::{fm_project, fm_project_with};
pub use redundancy::{remove_redundant, remove_redundant_with, Irredundant};

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::ratlinalg::{dot, Rational};

/// Scales `(coeffs, rhs)` by a positive factor so that all entries are
/// integers with overall gcd one. Zero rows keep only the sign of `rhs`.
pub fn canonical_row(coeffs: &[Rational], rhs: &Rational) -> (Vec<Rational>, Rational) {
    if coeffs.iter().all(Rational::is_zero) {
        let r = Rational::from_integer(rhs.signum() as i64);
        return (coeffs.to_vec(), r);
    }
    let mut all: Vec<Rational> = coeffs.to_vec();
    all.push(rhs.clone());
    let s = Rational::primitive_scale(&all);
    let rhs = all.pop().map(|x| &x * &s).unwrap_or_default();
    (all.iter().map(|x| x * &s).collect(), rhs)
}

fn default_names(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("x{i}")).collect()
}

/// Half-space representation `{x : <coeffs_i, x> <= rhs_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HRep {
    dim: usize,
    coeffs: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    names: Vec<String>,
}

impl HRep {
    pub fn new(dim: usize, rows: Vec<(Vec<Rational>, Rational)>) -> Result<Self> {
        let mut h = HRep { dim, coeffs: Vec::new(), rhs: Vec::new(), names: default_names(dim) };
        for (a, b) in rows {
            h.push(a, b)?;
        }
        Ok(h)
    }

    pub fn empty(dim: usize) -> Self {
        HRep { dim, coeffs: Vec::new(), rhs: Vec::new(), names: default_names(dim) }
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: names.len() });
        }
        self.names = names;
        Ok(self)
    }

    pub fn push(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> Result<()> {
        if coeffs.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: coeffs.len() });
        }
        self.coeffs.push(coeffs);
        self.rhs.push(rhs);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn coeffs(&self, i: usize) -> &[Rational] {
        &self.coeffs[i]
    }

    pub fn rhs(&self, i: usize) -> &Rational {
        &self.rhs[i]
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[Rational], &Rational)> + Clone {
        self.coeffs.iter().map(Vec::as_slice).zip(self.rhs.iter())
    }

    /// Rows with indices from `idx`, in that order.
    pub fn select(&self, idx: &[usize]) -> HRep {
        HRep {
            dim: self.dim,
            coeffs: idx.iter().map(|&i| self.coeffs[i].clone()).collect(),
            rhs: idx.iter().map(|&i| self.rhs[i].clone()).collect(),
            names: self.names.clone(),
        }
    }

    /// Every row in canonical integer scaling, exact duplicates removed
    /// (first occurrence kept).
    pub fn canonicalized(&self) -> HRep {
        let mut seen = HashSet::new();
        let mut out = HRep { dim: self.dim, coeffs: Vec::new(), rhs: Vec::new(), names: self.names.clone() };
        for (a, b) in self.rows() {
            let (a, b) = canonical_row(a, b);
            if seen.insert((a.clone(), b.clone())) {
                out.coeffs.push(a);
                out.rhs.push(b);
            }
        }
        out
    }

    pub fn contains(&self, x: &[Rational]) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(self.rows().all(|(a, b)| dot(a, x) <= *b))
    }

    /// Indices of the rows holding with equality at `x`.
    pub fn tight_set(&self, x: &[Rational]) -> Vec<usize> {
        self.rows().enumerate().filter(|(_, (a, b))| dot(a, x) == **b).map(|(i, _)| i).collect()
    }

    /// Rows sorted lexicographically by `(coeffs, rhs)`; used for
    /// order-independent comparisons.
    pub fn sorted_rows(&self) -> Vec<(Vec<Rational>, Rational)> {
        let mut rows: Vec<_> = self.rows().map(|(a, b)| (a.to_vec(), b.clone())).collect();
        rows.sort();
        rows
    }
}

/// Vertex representation of a bounded polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VRep {
    dim: usize,
    vertices: Vec<Vec<Rational>>,
    names: Vec<String>,
}

impl VRep {
    pub fn new(dim: usize, vertices: Vec<Vec<Rational>>) -> Result<Self> {
        let mut seen = HashSet::new();
        for v in &vertices {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
            }
            if !seen.insert(v.clone()) {
                return Err(Error::Inconsistent("duplicate vertex".into()));
            }
        }
        Ok(VRep { dim, vertices, names: default_names(dim) })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: names.len() });
        }
        self.names = names;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vec<Rational>] {
        &self.vertices
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn into_vertices(self) -> Vec<Vec<Rational>> {
        self.vertices
    }

    /// Vertex set as a sorted list, for set comparisons.
    pub fn sorted(&self) -> Vec<Vec<Rational>> {
        let mut v = self.vertices.clone();
        v.sort();
        v
    }
}

pub fn contains(h: &HRep, x: &[Rational]) -> Result<bool> {
    h.contains(x)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::ratlinalg::rat;

    pub fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    /// Axis-aligned box `[0,1]^dim`.
    pub fn unit_cube(dim: usize) -> HRep {
        let mut rows = Vec::new();
        for j in 0..dim {
            let mut e = vec![r(0); dim];
            e[j] = r(-1);
            rows.push((e.clone(), r(0)));
            e[j] = r(1);
            rows.push((e, r(1)));
        }
        HRep::new(dim, rows).unwrap()
    }

    /// The eight constraints drawn for the two-gamble toy example, in the
    /// `(P f, P g)` plane with gambles f = (1,1/2,0), g = (0,2/3,1).
    pub fn toy_eight() -> HRep {
        HRep::new(
            2,
            vec![
                (vec![r(0), r(-1)], r(0)),
                (vec![r(-1), r(0)], r(0)),
                (vec![r(1), rat(3, 4)], r(1)),
                (vec![rat(2, 3), r(1)], r(1)),
                (vec![r(0), r(1)], r(1)),
                (vec![r(1), r(0)], r(1)),
                (vec![r(-1), r(1)], r(1)),
                (vec![r(1), r(-1)], r(1)),
            ],
        )
        .unwrap()
    }

    pub fn toy_four() -> HRep {
        toy_eight().select(&[0, 1, 2, 3])
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::ratlinalg::rat;

    #[test]
    fn canonical_scaling() {
        let (a, b) = canonical_row(&[r(1), rat(3, 4)], &r(1));
        assert_eq!((a, b), (vec![r(4), r(3)], r(4)));
        let (a, b) = canonical_row(&[r(-2), r(0)], &r(0));
        assert_eq!((a, b), (vec![r(-1), r(0)], r(0)));
        let once = canonical_row(&[rat(2, 3), r(1)], &r(1));
        assert_eq!(canonical_row(&once.0, &once.1), once);
    }

    #[test]
    fn contains_examples() {
        let h = toy_four();
        assert!(h.contains(&[rat(1, 2), rat(2, 3)]).unwrap());
        // (2/3)*1 + 1 = 5/3 > 1
        assert!(!h.contains(&[r(1), r(1)]).unwrap());
        assert!(h.contains(&[r(1)]).is_err());
    }
}
