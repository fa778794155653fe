//! Exact dictionary simplex for `max c·x  s.t.  A x <= b` with free `x`.
//!
//! Free variables are pivoted into the basis first and never leave it; the
//! remaining problem lives entirely in the (nonnegative) slack variables.
//! Phase one uses a single artificial variable. Pivoting follows the largest
//! coefficient rule and drops to Bland's rule for every pivot taken from a
//! degenerate basis, which is enough to rule out cycling.

use super::rational::Rational;
use crate::error::{Error, Result};
use crate::polytope::HRep;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Unbounded,
    Infeasible,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// Optimizes `objective` over the polyhedron `h`.
pub fn lp_optimize(objective: &[Rational], h: &HRep, sense: Sense) -> Result<LpOutcome> {
    if objective.len() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: objective.len() });
    }
    Ok(optimize(h.dim(), h.rows(), objective, sense))
}

/// Same as [`lp_optimize`] on borrowed `(coeffs, rhs)` rows.
pub fn optimize<'a, I>(dim: usize, rows: I, objective: &[Rational], sense: Sense) -> LpOutcome
where
    I: IntoIterator<Item = (&'a [Rational], &'a Rational)>,
{
    let Some(base) = FeasibleDictionary::new(dim, rows) else {
        return LpOutcome::Infeasible;
    };
    match sense {
        Sense::Max => base.maximize(objective).into(),
        Sense::Min => {
            let neg: Vec<Rational> = objective.iter().map(|c| -c).collect();
            match base.maximize(&neg).into() {
                LpOutcome::Optimal { value, point } => LpOutcome::Optimal { value: -value, point },
                other => other,
            }
        }
    }
}

/// Some point of `{x : A x <= b}`, if nonempty.
pub fn feasible_point<'a, I>(dim: usize, rows: I) -> Option<Vec<Rational>>
where
    I: IntoIterator<Item = (&'a [Rational], &'a Rational)>,
{
    FeasibleDictionary::new(dim, rows).map(|d| d.current_point())
}

/// Result of maximizing over a [`FeasibleDictionary`]. Unbounded problems
/// come with a feasible point and a direction along which the objective
/// strictly increases without leaving the feasible set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Optimal { value: Rational, point: Vec<Rational> },
    Unbounded { point: Vec<Rational>, direction: Vec<Rational> },
}

impl From<Solution> for LpOutcome {
    fn from(s: Solution) -> Self {
        match s {
            Solution::Optimal { value, point } => LpOutcome::Optimal { value, point },
            Solution::Unbounded { .. } => LpOutcome::Unbounded,
        }
    }
}

/// A constraint system already brought to a feasible basis. Cloning it and
/// running phase two is much cheaper than solving from scratch when many
/// objectives are optimized over the same rows.
#[derive(Clone)]
pub struct FeasibleDictionary(Dictionary);

impl FeasibleDictionary {
    /// `None` when the system is infeasible.
    pub fn new<'a, I>(dim: usize, rows: I) -> Option<Self>
    where
        I: IntoIterator<Item = (&'a [Rational], &'a Rational)>,
    {
        let mut d = Dictionary::build(dim, rows);
        d.phase_one().then_some(FeasibleDictionary(d))
    }

    pub fn maximize(&self, objective: &[Rational]) -> Solution {
        self.0.clone().maximize(objective)
    }

    /// Like [`FeasibleDictionary::maximize`], but keeps the final basis as
    /// the starting point for the next objective.
    pub fn maximize_warm(&mut self, objective: &[Rational]) -> Solution {
        self.0.maximize(objective)
    }

    pub fn current_point(&self) -> Vec<Rational> {
        self.0.point()
    }
}

const NO_ROW: usize = usize::MAX;

#[derive(Clone)]
struct Dictionary {
    dim: usize,
    /// Variable index of the basic variable of each row.
    basic: Vec<usize>,
    /// Variable index held by each column.
    nonbasic: Vec<usize>,
    coef: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    /// Rows whose basic variable is a free original variable.
    free_row: Vec<bool>,
    /// Columns that may enter the basis.
    active: Vec<bool>,
    obj: Vec<Rational>,
    obj_const: Rational,
    artificial: usize,
}

enum Phase {
    Optimal,
    /// Entering column with no limiting row.
    Unbounded(usize),
}

impl Dictionary {
    fn build<'a, I>(dim: usize, rows: I) -> Self
    where
        I: IntoIterator<Item = (&'a [Rational], &'a Rational)>,
    {
        let mut coef = Vec::new();
        let mut rhs = Vec::new();
        for (a, b) in rows {
            debug_assert_eq!(a.len(), dim);
            coef.push(a.iter().map(|x| -x).collect::<Vec<_>>());
            rhs.push(b.clone());
        }
        let m = coef.len();
        let mut d = Dictionary {
            dim,
            basic: (dim..dim + m).collect(),
            nonbasic: (0..dim).collect(),
            coef,
            rhs,
            free_row: vec![false; m],
            active: vec![true; dim],
            obj: vec![Rational::zero(); dim],
            obj_const: Rational::zero(),
            artificial: dim + m,
        };
        d.eliminate_free_variables();
        d
    }

    fn eliminate_free_variables(&mut self) {
        for col in 0..self.dim {
            let row = (0..self.coef.len())
                .filter(|&r| !self.free_row[r] && !self.coef[r][col].is_zero())
                .min_by_key(|&r| (self.coef[r][col].height(), r));
            match row {
                Some(r) => {
                    self.pivot(r, col);
                    self.free_row[r] = true;
                }
                // Not determined by any constraint: the variable stays at zero
                // and only matters through its objective coefficient.
                None => self.active[col] = false,
            }
        }
    }

    fn pivot(&mut self, r: usize, k: usize) {
        let a = self.coef[r][k].clone();
        let inv = a.recip();
        let neg_inv = -&inv;
        {
            let row = &mut self.coef[r];
            for (l, x) in row.iter_mut().enumerate() {
                if l != k && !x.is_zero() {
                    *x = &*x * &neg_inv;
                }
            }
            row[k] = inv;
            self.rhs[r] = &self.rhs[r] * &neg_inv;
        }
        let pivot_row = std::mem::take(&mut self.coef[r]);
        let pivot_rhs = self.rhs[r].clone();
        let nz: Vec<usize> = (0..pivot_row.len()).filter(|&l| !pivot_row[l].is_zero()).collect();
        let apply = |row: &mut Vec<Rational>, constant: &mut Rational| {
            let c = std::mem::take(&mut row[k]);
            if c.is_zero() {
                row[k] = c;
                return;
            }
            for &l in &nz {
                if l == k {
                    row[k] = &c * &pivot_row[k];
                } else {
                    row[l] = c.mul_add(&pivot_row[l], &row[l]);
                }
            }
            if !pivot_rhs.is_zero() {
                *constant = c.mul_add(&pivot_rhs, constant);
            }
        };
        for i in 0..self.coef.len() {
            if i == r {
                continue;
            }
            let (row, constant) = (&mut self.coef[i], &mut self.rhs[i]);
            apply(row, constant);
        }
        apply(&mut self.obj, &mut self.obj_const);
        self.coef[r] = pivot_row;
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[k]);
    }

    fn run_simplex(&mut self) -> Phase {
        let mut bland = false;
        loop {
            let entering = if bland {
                (0..self.obj.len())
                    .filter(|&k| self.active[k] && self.obj[k].is_positive())
                    .min_by_key(|&k| self.nonbasic[k])
            } else {
                (0..self.obj.len()).filter(|&k| self.active[k] && self.obj[k].is_positive()).max_by(|&a, &b| {
                    self.obj[a].cmp(&self.obj[b]).then_with(|| self.nonbasic[b].cmp(&self.nonbasic[a]))
                })
            };
            let Some(k) = entering else {
                return Phase::Optimal;
            };
            let mut best = NO_ROW;
            let mut best_ratio = Rational::zero();
            for r in 0..self.coef.len() {
                if self.free_row[r] || !self.coef[r][k].is_negative() {
                    continue;
                }
                let ratio = &self.rhs[r] / &(-&self.coef[r][k]);
                let better =
                    best == NO_ROW || ratio < best_ratio || (ratio == best_ratio && self.basic[r] < self.basic[best]);
                if better {
                    best = r;
                    best_ratio = ratio;
                }
            }
            if best == NO_ROW {
                return Phase::Unbounded(k);
            }
            bland = best_ratio.is_zero();
            self.pivot(best, k);
        }
    }

    fn phase_one(&mut self) -> bool {
        let worst = (0..self.coef.len())
            .filter(|&r| !self.free_row[r] && self.rhs[r].is_negative())
            .min_by(|&a, &b| self.rhs[a].cmp(&self.rhs[b]).then(a.cmp(&b)));
        let Some(worst) = worst else {
            return true;
        };
        let art_col = self.nonbasic.len();
        for (r, row) in self.coef.iter_mut().enumerate() {
            row.push(if self.free_row[r] { Rational::zero() } else { Rational::one() });
        }
        self.nonbasic.push(self.artificial);
        self.active.push(true);
        self.obj = vec![Rational::zero(); art_col + 1];
        self.obj[art_col] = -Rational::one();
        self.obj_const = Rational::zero();
        self.pivot(worst, art_col);
        // Bounded above by zero, so this always reaches an optimum.
        let _ = self.run_simplex();
        if self.obj_const.is_negative() {
            return false;
        }
        if let Some(r) = self.basic.iter().position(|&v| v == self.artificial) {
            let k = (0..self.nonbasic.len()).find(|&k| self.active[k] && !self.coef[r][k].is_zero());
            match k {
                Some(k) => self.pivot(r, k),
                None => {
                    self.coef.remove(r);
                    self.rhs.remove(r);
                    self.basic.remove(r);
                    self.free_row.remove(r);
                }
            }
        }
        let col = self.nonbasic.iter().position(|&v| v == self.artificial).expect("artificial is nonbasic");
        for row in &mut self.coef {
            row.remove(col);
        }
        self.nonbasic.remove(col);
        self.active.remove(col);
        true
    }

    fn point(&self) -> Vec<Rational> {
        let mut point = vec![Rational::zero(); self.dim];
        for (r, &v) in self.basic.iter().enumerate() {
            if v < self.dim {
                point[v] = self.rhs[r].clone();
            }
        }
        point
    }

    /// Change of the original variables per unit increase of column `k`.
    fn direction(&self, k: usize, sign: &Rational) -> Vec<Rational> {
        let mut dir = vec![Rational::zero(); self.dim];
        if self.nonbasic[k] < self.dim {
            dir[self.nonbasic[k]] = sign.clone();
        }
        for (r, &v) in self.basic.iter().enumerate() {
            if v < self.dim {
                dir[v] = &self.coef[r][k] * sign;
            }
        }
        dir
    }

    /// Phase two; requires a feasible dictionary.
    fn maximize(&mut self, objective: &[Rational]) -> Solution {
        let cols = self.nonbasic.len();
        self.obj = vec![Rational::zero(); cols];
        self.obj_const = Rational::zero();
        for (j, c) in objective.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if let Some(r) = self.basic.iter().position(|&v| v == j) {
                for (o, x) in self.obj.iter_mut().zip(&self.coef[r]) {
                    if !x.is_zero() {
                        *o = c.mul_add(x, o);
                    }
                }
                self.obj_const = c.mul_add(&self.rhs[r], &self.obj_const);
            } else {
                let k = self.nonbasic.iter().position(|&v| v == j).expect("variable is nonbasic");
                self.obj[k] += c;
            }
        }
        // A free variable no constraint pins down moves the objective freely.
        if let Some(k) = (0..cols).find(|&k| !self.active[k] && !self.obj[k].is_zero()) {
            let sign = if self.obj[k].is_positive() { Rational::one() } else { -Rational::one() };
            return Solution::Unbounded { point: self.point(), direction: self.direction(k, &sign) };
        }
        match self.run_simplex() {
            Phase::Unbounded(k) => {
                Solution::Unbounded { point: self.point(), direction: self.direction(k, &Rational::one()) }
            }
            Phase::Optimal => Solution::Optimal { value: self.obj_const.clone(), point: self.point() },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlinalg::rational::{dot, rat};
    use proptest::prelude::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn hrep(rows: Vec<(Vec<Rational>, Rational)>, dim: usize) -> HRep {
        HRep::new(dim, rows).unwrap()
    }

    #[test]
    fn interval_max() {
        let h = hrep(vec![(vec![r(-1)], r(0)), (vec![r(1)], r(1))], 1);
        assert_eq!(
            lp_optimize(&[r(1)], &h, Sense::Max).unwrap(),
            LpOutcome::Optimal { value: r(1), point: vec![r(1)] }
        );
    }

    #[test]
    fn half_line_unbounded() {
        let h = hrep(vec![(vec![r(-1)], r(0))], 1);
        assert_eq!(lp_optimize(&[r(1)], &h, Sense::Max).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn empty_is_infeasible() {
        let h = hrep(vec![(vec![r(1)], r(0)), (vec![r(-1)], r(-1))], 1);
        assert_eq!(lp_optimize(&[r(1)], &h, Sense::Max).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn toy_polytope_objective() {
        // -x<=0, -y<=0, x + 3/4 y <= 1, 2/3 x + y <= 1
        let h = hrep(
            vec![
                (vec![r(-1), r(0)], r(0)),
                (vec![r(0), r(-1)], r(0)),
                (vec![r(1), rat(3, 4)], r(1)),
                (vec![rat(2, 3), r(1)], r(1)),
            ],
            2,
        );
        let out = lp_optimize(&[r(1), rat(3, 4)], &h, Sense::Max).unwrap();
        // Oracle: objective at the four vertices (0,0),(1,0),(0,1),(1/2,2/3).
        let verts = [[r(0), r(0)], [r(1), r(0)], [r(0), r(1)], [rat(1, 2), rat(2, 3)]];
        let best = verts.iter().map(|v| dot(v, &[r(1), rat(3, 4)])).max().unwrap();
        assert_eq!(best, r(1));
        assert_eq!(out.value(), Some(&best));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let h = hrep(vec![(vec![r(1), r(1)], r(1))], 2);
        assert!(lp_optimize(&[r(1)], &h, Sense::Max).is_err());
    }

    #[test]
    fn undetermined_variable() {
        // y unconstrained: objective on y is unbounded, objective on x is not.
        let h = hrep(vec![(vec![r(1), r(0)], r(2))], 2);
        assert_eq!(lp_optimize(&[r(0), r(1)], &h, Sense::Max).unwrap(), LpOutcome::Unbounded);
        assert_eq!(lp_optimize(&[r(1), r(0)], &h, Sense::Max).unwrap().value(), Some(&r(2)));
    }

    #[test]
    fn equality_pairs() {
        // x + y = 1, x,y >= 0; min x - y = -1 at (0,1)
        let h = hrep(
            vec![
                (vec![r(1), r(1)], r(1)),
                (vec![r(-1), r(-1)], r(-1)),
                (vec![r(-1), r(0)], r(0)),
                (vec![r(0), r(-1)], r(0)),
            ],
            2,
        );
        let out = lp_optimize(&[r(1), r(-1)], &h, Sense::Min).unwrap();
        assert_eq!(out, LpOutcome::Optimal { value: r(-1), point: vec![r(0), r(1)] });
    }

    fn random_box_polytope() -> impl Strategy<Value = (Vec<(Vec<Rational>, Rational)>, Vec<Rational>)> {
        let dim = 3;
        let row = (proptest::collection::vec(-4i64..5, dim), 0i64..6)
            .prop_map(|(a, b)| (a.into_iter().map(r).collect::<Vec<_>>(), r(b)));
        (proptest::collection::vec(row, 0..8), proptest::collection::vec(-3i64..4, dim)).prop_map(
            move |(mut rows, c)| {
                for j in 0..dim {
                    let mut e = vec![r(0); dim];
                    e[j] = r(1);
                    rows.push((e.clone(), r(2)));
                    e[j] = r(-1);
                    rows.push((e, r(2)));
                }
                (rows, c.into_iter().map(r).collect())
            },
        )
    }

    proptest! {
        #[test]
        fn max_is_negated_min_of_negation((rows, c) in random_box_polytope()) {
            let h = hrep(rows, 3);
            let neg: Vec<Rational> = c.iter().map(|x| -x).collect();
            let a = lp_optimize(&c, &h, Sense::Max).unwrap();
            let b = lp_optimize(&neg, &h, Sense::Min).unwrap();
            if let (Some(x), Some(y)) = (a.value(), b.value()) {
                prop_assert_eq!(x.clone(), -y);
            }
            if let LpOutcome::Optimal { point, value } = &a {
                prop_assert!(h.contains(point).unwrap());
                prop_assert_eq!(&dot(&c, point), value);
            }
        }
    }
}
