use std::fmt;

use super::rational::Rational;
use crate::error::{Error, Result};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Builds a matrix from equal-length rows. `cols` is only consulted when
    /// `rows` is empty.
    pub fn from_rows(rows: &[Vec<Rational>], cols: usize) -> Result<Self> {
        let cols = rows.first().map_or(cols, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend(r.iter().cloned());
        }
        Ok(RatMatrix { rows: rows.len(), cols, data })
    }

    /// Builds the matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Rational>], rows: usize) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, found: c.len() });
            }
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// In-place reduced row echelon form, searching pivots only among the
    /// first `limit` columns. Returns the pivot columns in row order.
    pub fn rref_limited(&mut self, limit: usize) -> Vec<usize> {
        let limit = limit.min(self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..limit {
            if r == self.rows {
                break;
            }
            // Largest numerator among the candidates; any nonzero works.
            let Some(p) = (r..self.rows)
                .filter(|&i| !self[(i, c)].is_zero())
                .max_by_key(|&i| (self[(i, c)].numer_bits(), std::cmp::Reverse(i)))
            else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self[(r, c)].recip();
            for j in c..self.cols {
                let v = &self[(r, j)] * &inv;
                self[(r, j)] = v;
            }
            let pivot_row: Vec<(usize, Rational)> =
                (c..self.cols).filter(|&j| !self[(r, j)].is_zero()).map(|j| (j, self[(r, j)].clone())).collect();
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let factor = -&self[(i, c)];
                for (j, v) in &pivot_row {
                    let nv = factor.mul_add(v, &self[(i, *j)]);
                    self[(i, *j)] = nv;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&mut self) -> Vec<usize> {
        self.rref_limited(self.cols)
    }

    pub fn rank(&self) -> usize {
        // Eliminate along the shorter side.
        if self.rows < self.cols {
            self.transpose().rref().len()
        } else {
            self.clone().rref().len()
        }
    }

    /// Basis of `{x : M x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -&m[(r, f)];
                }
                v
            })
            .collect()
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        (0..self.rows).map(|i| super::rational::dot(self.row(i), x)).collect()
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

pub fn rank(m: &RatMatrix) -> usize {
    m.rank()
}

/// Rank of a list of equal-length vectors.
pub fn rank_of(vectors: &[Vec<Rational>]) -> usize {
    match vectors.first() {
        None => 0,
        Some(v) => RatMatrix::from_rows(vectors, v.len()).map(|m| m.rank()).unwrap_or(0),
    }
}

pub fn is_independent(vectors: &[Vec<Rational>]) -> bool {
    rank_of(vectors) == vectors.len()
}

/// Solves `sum_j coeff_j * columns[j] = target`, with linearly independent
/// columns. `Ok(None)` when the target is outside the span.
pub fn solve_unique(columns: &[Vec<Rational>], target: &[Rational]) -> Result<Option<Vec<Rational>>> {
    Ok(solve_unique_many(columns, &[target])?.pop().flatten())
}

/// Same as [`solve_unique`] for several right-hand sides with one
/// elimination.
pub fn solve_unique_many(columns: &[Vec<Rational>], targets: &[&[Rational]]) -> Result<Vec<Option<Vec<Rational>>>> {
    let dim = targets.first().map(|t| t.len()).or_else(|| columns.first().map(|c| c.len()));
    let Some(dim) = dim else {
        return Ok(Vec::new());
    };
    let n = columns.len();
    let mut m = RatMatrix::zeros(dim, n + targets.len());
    for (j, c) in columns.iter().enumerate() {
        if c.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: c.len() });
        }
        for (i, x) in c.iter().enumerate() {
            m[(i, j)] = x.clone();
        }
    }
    for (t, target) in targets.iter().enumerate() {
        if target.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: target.len() });
        }
        for (i, x) in target.iter().enumerate() {
            m[(i, n + t)] = x.clone();
        }
    }
    let pivots = m.rref_limited(n);
    if pivots.len() < n {
        return Err(Error::DependentColumns);
    }
    Ok((0..targets.len())
        .map(|t| {
            let col = n + t;
            if (n..dim).any(|i| !m[(i, col)].is_zero()) {
                return None;
            }
            Some((0..n).map(|i| m[(i, col)].clone()).collect())
        })
        .collect())
}

/// Particular solution and nullspace basis.
pub type AffineSolution = (Vec<Rational>, Vec<Vec<Rational>>);

/// General solution of `sum_j coeff_j * columns[j] = target` as a particular
/// solution plus a nullspace basis, or `None` when inconsistent.
pub fn solve_affine(columns: &[Vec<Rational>], target: &[Rational]) -> Result<Option<AffineSolution>> {
    let dim = target.len();
    let n = columns.len();
    let mut m = RatMatrix::zeros(dim, n + 1);
    for (j, c) in columns.iter().enumerate() {
        if c.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: c.len() });
        }
        for (i, x) in c.iter().enumerate() {
            m[(i, j)] = x.clone();
        }
    }
    for (i, x) in target.iter().enumerate() {
        m[(i, n)] = x.clone();
    }
    let pivots = m.rref_limited(n);
    if (pivots.len()..dim).any(|i| !m[(i, n)].is_zero()) {
        return Ok(None);
    }
    let mut particular = vec![Rational::zero(); n];
    for (r, &pc) in pivots.iter().enumerate() {
        particular[pc] = m[(r, n)].clone();
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); n];
            v[f] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -&m[(r, f)];
            }
            v
        })
        .collect();
    Ok(Some((particular, basis)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlinalg::rational::rat;
    use proptest::prelude::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(RatMatrix::identity(3).rank(), 3);
        let m = RatMatrix::from_rows(
            &[vec![r(1), r(0), rat(1, 2)], vec![r(0), rat(1, 2), r(1)], vec![r(1), rat(1, 2), rat(3, 2)]],
            3,
        )
        .unwrap();
        assert_eq!(m.rank(), 2);
        assert_eq!(RatMatrix::zeros(2, 2).rank(), 0);
    }

    #[test]
    fn solve_reads_off_indicator_coordinates() {
        let ia = vec![r(1), r(0), r(0)];
        let ib = vec![r(0), r(1), r(0)];
        let sol = solve_unique(&[ia.clone(), ib.clone()], &[r(1), rat(1, 2), r(0)]).unwrap();
        assert_eq!(sol, Some(vec![r(1), rat(1, 2)]));
        let none = solve_unique(&[ia, ib], &[r(0), r(0), r(1)]).unwrap();
        assert_eq!(none, None);
    }

    #[test]
    fn solve_detects_inconsistency() {
        // Rows: a: x = 1; b: y/2 = 1 -> y = 2; c: x/2 + y = 5/2 != 2.
        let u = vec![r(1), r(0), rat(1, 2)];
        let v = vec![r(0), rat(1, 2), r(1)];
        assert_eq!(solve_unique(&[u, v], &[r(1), r(1), r(2)]).unwrap(), None);
    }

    #[test]
    fn solve_rejects_dependent_columns() {
        let u = vec![r(1), r(2)];
        let v = vec![r(2), r(4)];
        assert!(matches!(solve_unique(&[u, v], &[r(1), r(2)]), Err(Error::DependentColumns)));
    }

    #[test]
    fn independence_examples() {
        let ia = vec![r(1), r(0), r(0)];
        let ib = vec![r(0), r(1), r(0)];
        let ic = vec![r(0), r(0), r(1)];
        assert!(is_independent(&[ia.clone(), ib.clone(), ic]));
        let f = vec![r(1), rat(1, 2), r(0)];
        let g = vec![r(0), rat(2, 3), r(1)];
        let fg: Vec<_> = f.iter().zip(&g).map(|(a, b)| a + b).collect();
        assert!(!is_independent(&[f, g, fg]));
        assert!(is_independent(&[]));
    }

    #[test]
    fn affine_solution_space() {
        let cols = vec![vec![r(1), r(0)], vec![r(0), r(1)], vec![r(1), r(1)]];
        let (p, basis) = solve_affine(&cols, &[r(1), r(1)]).unwrap().unwrap();
        assert_eq!(basis.len(), 1);
        let check = |lam: &[Rational]| {
            (0..2).map(|i| cols.iter().zip(lam).map(|(c, l)| &c[i] * l).sum::<Rational>()).collect::<Vec<_>>()
        };
        assert_eq!(check(&p), vec![r(1), r(1)]);
        assert_eq!(check(&basis[0]), vec![r(0), r(0)]);
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<Rational>>> {
        (1usize..5, 1usize..5).prop_flat_map(|(m, n)| {
            proptest::collection::vec(proptest::collection::vec((-3i64..4, 1i64..4).prop_map(|(a, b)| rat(a, b)), n), m)
        })
    }

    proptest! {
        #[test]
        fn rank_invariant_under_permutation_and_scaling(
            rows in small_matrix(),
            scales in proptest::collection::vec((1i64..5, 1i64..5, any::<bool>()), 5),
            rot in 0usize..5,
        ) {
            let n = rows[0].len();
            let base = rank_of(&rows);
            let mut other: Vec<Vec<Rational>> = rows
                .iter()
                .zip(&scales)
                .map(|(row, &(p, q, neg))| {
                    let s = if neg { rat(-p, q) } else { rat(p, q) };
                    row.iter().map(|x| x * &s).collect()
                })
                .collect();
            let len = other.len();
            other.rotate_left(rot % len);
            prop_assert_eq!(rank_of(&other), base);
            prop_assert!(base <= n.min(rows.len()));
        }

        #[test]
        fn solutions_satisfy_system_exactly(rows in small_matrix()) {
            // Treat the rows as columns of a system and solve for a target in their span.
            if is_independent(&rows) {
                let dim = rows[0].len();
                let lam: Vec<Rational> = (0..rows.len()).map(|i| rat(i as i64 + 1, 2)).collect();
                let target: Vec<Rational> = (0..dim)
                    .map(|i| rows.iter().zip(&lam).map(|(c, l)| &c[i] * l).sum())
                    .collect();
                let sol = solve_unique(&rows, &target).unwrap().unwrap();
                prop_assert_eq!(sol, lam);
            }
        }
    }
}
