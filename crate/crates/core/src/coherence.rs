//! Finite sufficient constraint set for coherence, and two independent
//! coherence checks: by evaluating the generated constraints, and directly
//! over subsets whose centered gambles are linearly independent.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gambles::{Event, GambleSet, LowerPrevision};
use crate::polytope::{canonical_row, HRep};
use crate::ratlinalg::lp::{optimize, LpOutcome, Sense};
use crate::ratlinalg::{dot, solve_affine, solve_unique_many, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintKind {
    /// `-P(g) <= 0`.
    Nonneg,
    /// `sum λ_g P(g) - P(f) <= 0` with positive λ.
    Homogeneous,
    /// `sum λ_g P(g) <= 1`.
    Inhomogeneous,
    General,
}

impl ConstraintKind {
    pub fn tag(self) -> &'static str {
        match self {
            ConstraintKind::Nonneg => "nonneg",
            ConstraintKind::Homogeneous => "homogeneous",
            ConstraintKind::Inhomogeneous => "inhomogeneous",
            ConstraintKind::General => "general",
        }
    }
}

/// `<coeffs, P> <= rhs`, scaled to primitive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearConstraint {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
    pub kind: ConstraintKind,
}

impl LinearConstraint {
    pub fn new(coeffs: &[Rational], rhs: &Rational, kind: ConstraintKind) -> Self {
        let (coeffs, rhs) = canonical_row(coeffs, rhs);
        LinearConstraint { coeffs, rhs, kind }
    }

    pub fn canonical(&self) -> Self {
        LinearConstraint::new(&self.coeffs, &self.rhs, self.kind)
    }

    /// `<coeffs, p> - rhs`; positive means violated.
    pub fn excess(&self, p: &[Rational]) -> Rational {
        &dot(&self.coeffs, p) - &self.rhs
    }

    pub fn holds(&self, p: &[Rational]) -> bool {
        !self.excess(p).is_positive()
    }

    fn key(&self) -> (&[Rational], &Rational) {
        (&self.coeffs, &self.rhs)
    }
}

/// Where a generated constraint came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Nonneg { gamble: usize },
    Dominated { subset: Vec<usize>, f: usize, lambda: Vec<Rational> },
    Unit { subset: Vec<usize>, lambda: Vec<Rational> },
    External,
}

impl Provenance {
    /// Human-readable form using the gamble names of `k`.
    pub fn describe(&self, k: &GambleSet) -> String {
        let names = |s: &[usize]| s.iter().map(|&i| k.names()[i].as_str()).collect::<Vec<_>>().join(",");
        let nums = |l: &[Rational]| l.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        match self {
            Provenance::Nonneg { gamble } => format!("nonneg {}", k.names()[*gamble]),
            Provenance::Dominated { subset, f, lambda } => {
                format!("N={{{}}} f={} lambda=({})", names(subset), k.names()[*f], nums(lambda))
            }
            Provenance::Unit { subset, lambda } => format!("N={{{}}} unit lambda=({})", names(subset), nums(lambda)),
            Provenance::External => "external".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSet {
    pub ambient: GambleSet,
    pub constraints: Vec<LinearConstraint>,
    pub provenance: Vec<Provenance>,
    /// Emissions before deduplication, nonnegativity included.
    pub raw_count: usize,
}

impl ConstraintSet {
    /// Wraps arbitrary rows over `ambient`, deduplicated after scaling.
    pub fn from_hrep(ambient: GambleSet, h: &HRep) -> Result<Self> {
        if h.dim() != ambient.len() {
            return Err(Error::DimensionMismatch { expected: ambient.len(), found: h.dim() });
        }
        let mut cs = ConstraintSet { ambient, constraints: Vec::new(), provenance: Vec::new(), raw_count: h.len() };
        let mut seen = HashSet::new();
        for (a, b) in h.rows() {
            let c = LinearConstraint::new(a, b, ConstraintKind::General);
            if seen.insert((c.coeffs.clone(), c.rhs.clone())) {
                cs.constraints.push(c);
                cs.provenance.push(Provenance::External);
            }
        }
        Ok(cs)
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Rows as a polyhedron over the gambles, named after them.
    pub fn to_hrep(&self) -> HRep {
        let rows = self.constraints.iter().map(|c| (c.coeffs.clone(), c.rhs.clone())).collect();
        HRep::new(self.ambient.len(), rows)
            .and_then(|h| h.with_names(self.ambient.names().to_vec()))
            .expect("constraint dimensions match the ambient set")
    }
}

fn support_of(k: &GambleSet, subset: &[usize]) -> Event {
    Event(subset.iter().flat_map(|&i| k.gamble(i).support().0).collect())
}

/// Row-echelon basis for incremental independence tests.
#[derive(Clone, Default)]
struct Echelon {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl Echelon {
    /// Adds `v` if it is independent of the current rows.
    fn try_push(&mut self, v: &[Rational]) -> bool {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x = &*x - &(&f * y);
                    }
                }
            }
        }
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].recip();
        for x in v.iter_mut() {
            *x = &*x * &inv;
        }
        self.rows.push((p, v));
        true
    }
}

/// Linearly independent subsets `N` of `k` with `1 < |N| <= |Ω|`, ordered by
/// size, then lexicographically by gamble index.
pub fn independent_subsets(k: &GambleSet) -> Result<Vec<Vec<usize>>> {
    k.require_l()?;
    let max = k.space().len();
    let mut out = Vec::new();
    fn walk(k: &GambleSet, max: usize, start: usize, cur: &mut Vec<usize>, ech: &Echelon, out: &mut Vec<Vec<usize>>) {
        if cur.len() > 1 {
            out.push(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        for i in start..k.len() {
            let mut next = ech.clone();
            if next.try_push(k.gamble(i).payoffs()) {
                cur.push(i);
                walk(k, max, i + 1, cur, &next, out);
                cur.pop();
            }
        }
    }
    walk(k, max, 0, &mut Vec::new(), &Echelon::default(), &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// Target of a combination: another gamble of the set, or the unit gamble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Gamble(usize),
    Unit,
}

/// The unique `λ` with `sum_{g in N} λ_g g = target`, if any. `n` must be
/// linearly independent.
pub fn combination_solution(k: &GambleSet, n: &[usize], target: Target) -> Result<Option<Vec<Rational>>> {
    let columns: Vec<Vec<Rational>> = n.iter().map(|&i| k.gamble(i).payoffs().to_vec()).collect();
    let unit = vec![Rational::one(); k.space().len()];
    let t: &[Rational] = match target {
        Target::Gamble(f) => k.gamble(f).payoffs(),
        Target::Unit => &unit,
    };
    crate::ratlinalg::solve_unique(&columns, t)
}

fn emissions(k: &GambleSet, n: &[usize], full: &Event) -> Vec<(LinearConstraint, Provenance)> {
    let supp = support_of(k, n);
    let fs: Vec<usize> = (0..k.len()).filter(|f| !n.contains(f) && k.gamble(*f).support() == supp).collect();
    let unit_target = supp == *full;
    if fs.is_empty() && !unit_target {
        return Vec::new();
    }
    let columns: Vec<Vec<Rational>> = n.iter().map(|&i| k.gamble(i).payoffs().to_vec()).collect();
    let unit = vec![Rational::one(); k.space().len()];
    let mut targets: Vec<&[Rational]> = fs.iter().map(|&f| k.gamble(f).payoffs()).collect();
    if unit_target {
        targets.push(&unit);
    }
    let sols = solve_unique_many(&columns, &targets).expect("subset is independent");
    let mut out = Vec::new();
    let spread = |lambda: &[Rational]| {
        let mut c = vec![Rational::zero(); k.len()];
        for (&i, l) in n.iter().zip(lambda) {
            c[i] = l.clone();
        }
        c
    };
    for (&f, sol) in fs.iter().zip(&sols) {
        let Some(lambda) = sol else { continue };
        if lambda.iter().all(Rational::is_positive) {
            let mut c = spread(lambda);
            c[f] = -Rational::one();
            out.push((
                LinearConstraint::new(&c, &Rational::zero(), ConstraintKind::Homogeneous),
                Provenance::Dominated { subset: n.to_vec(), f, lambda: lambda.clone() },
            ));
        }
    }
    if unit_target {
        if let Some(Some(lambda)) = sols.last() {
            let negatives = lambda.iter().filter(|x| x.is_negative()).count();
            if negatives <= 1 && lambda.iter().all(|x| !x.is_zero()) {
                out.push((
                    LinearConstraint::new(&spread(lambda), &Rational::one(), ConstraintKind::Inhomogeneous),
                    Provenance::Unit { subset: n.to_vec(), lambda: lambda.clone() },
                ));
            }
        }
    }
    out
}

/// The constraint set characterizing coherence on `k`, which must lie in
/// `L` and contain every singleton indicator.
pub fn generate_constraints(k: &GambleSet) -> Result<ConstraintSet> {
    k.require_l()?;
    k.require_indicators()?;
    let subsets = independent_subsets(k)?;
    let full = k.space().full_event();
    let emitted: Vec<Vec<(LinearConstraint, Provenance)>> =
        subsets.par_iter().map(|n| emissions(k, n, &full)).collect();

    let mut cs = ConstraintSet { ambient: k.clone(), constraints: Vec::new(), provenance: Vec::new(), raw_count: 0 };
    let mut seen: HashSet<(Vec<Rational>, Rational)> = HashSet::new();
    let mut push = |cs: &mut ConstraintSet, c: LinearConstraint, p: Provenance| {
        cs.raw_count += 1;
        let (a, b) = c.key();
        if seen.insert((a.to_vec(), b.clone())) {
            cs.constraints.push(c);
            cs.provenance.push(p);
        }
    };
    for g in 0..k.len() {
        let mut c = vec![Rational::zero(); k.len()];
        c[g] = -Rational::one();
        push(
            &mut cs,
            LinearConstraint::new(&c, &Rational::zero(), ConstraintKind::Nonneg),
            Provenance::Nonneg { gamble: g },
        );
    }
    for (c, p) in emitted.into_iter().flatten() {
        push(&mut cs, c, p);
    }
    Ok(cs)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolatedConstraint {
    pub index: usize,
    /// `<coeffs, P> - rhs`, strictly positive.
    pub slack: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Coherent,
    Violation(Vec<ViolatedConstraint>),
}

impl Verdict {
    pub fn is_coherent(&self) -> bool {
        matches!(self, Verdict::Coherent)
    }
}

/// Evaluates every constraint of `cs` at `p`.
pub fn check_against(p: &LowerPrevision, cs: &ConstraintSet) -> Result<Verdict> {
    p.check_len(&cs.ambient)?;
    let violated: Vec<ViolatedConstraint> = cs
        .constraints
        .iter()
        .enumerate()
        .filter_map(|(index, c)| {
            let slack = c.excess(p.values());
            slack.is_positive().then_some(ViolatedConstraint { index, slack })
        })
        .collect();
    Ok(if violated.is_empty() { Verdict::Coherent } else { Verdict::Violation(violated) })
}

/// Witness of incoherence found by [`check_direct`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `P(g) < 0`.
    Negative { gamble: usize },
    /// `sum λ_g g = γ` over `subset` but `sum λ_g P(g) > γ`.
    Combination { subset: Vec<usize>, lambda: Vec<Rational>, gamma: Rational },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Negative { gamble } => write!(f, "negative value on gamble #{gamble}"),
            Witness::Combination { subset, lambda, gamma } => {
                write!(f, "N={subset:?} lambda=(")?;
                for (i, l) in lambda.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{l}")?;
                }
                write!(f, ") gamma={gamma}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DirectVerdict {
    Coherent,
    Violation(Witness),
}

impl DirectVerdict {
    pub fn is_coherent(&self) -> bool {
        matches!(self, DirectVerdict::Coherent)
    }
}

/// Searches the solutions `λ` of `sum λ_g g = γ` over `n` (particular
/// solution `x0` plus span of `null`) with every component nonzero and at
/// most one negative, for one with `<λ, P> > γ`.
fn violating_lambda(
    x0: &[Rational],
    null: &[Vec<Rational>],
    pvals: &[Rational],
    gamma: &Rational,
) -> Option<Vec<Rational>> {
    let n = x0.len();
    let ok = |l: &[Rational]| {
        l.iter().filter(|x| x.is_negative()).count() <= 1 && l.iter().all(|x| !x.is_zero()) && dot(l, pvals) > *gamma
    };
    if null.is_empty() {
        return ok(x0).then(|| x0.to_vec());
    }
    // λ = x0 + N y; variables (y, t): maximize t subject to
    // sign_i λ_i >= t, <λ, P> - γ >= t, t <= 1.
    let q = null.len();
    let lam = |i: usize| -> Vec<Rational> { null.iter().map(|v| v[i].clone()).collect() };
    for neg in std::iter::once(None).chain((0..n).map(Some)) {
        let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
        for (i, x0i) in x0.iter().enumerate() {
            let s = if Some(i) == neg { Rational::one() } else { -Rational::one() };
            // s * λ_i + t <= 0
            let mut a: Vec<Rational> = lam(i).iter().map(|x| &s * x).collect();
            a.push(Rational::one());
            rows.push((a, -(&s * x0i)));
        }
        let mut a: Vec<Rational> = (0..q).map(|j| -dot(&null[j], pvals)).collect();
        a.push(Rational::one());
        rows.push((a, &dot(x0, pvals) - gamma));
        let mut cap = vec![Rational::zero(); q + 1];
        cap[q] = Rational::one();
        rows.push((cap.clone(), Rational::one()));
        if let LpOutcome::Optimal { value, point } =
            optimize(q + 1, rows.iter().map(|(a, b)| (a.as_slice(), b)), &cap, Sense::Max)
        {
            if value.is_positive() {
                let lambda: Vec<Rational> = (0..n)
                    .map(|i| {
                        let mut x = x0[i].clone();
                        for j in 0..q {
                            x = null[j][i].mul_add(&point[j], &x);
                        }
                        x
                    })
                    .collect();
                debug_assert!(ok(&lambda));
                return Some(lambda);
            }
        }
    }
    None
}

/// Coherence check over subsets `N` with `(g - P(g))_{g in N}` linearly
/// independent, with no reference to generated constraints.
pub fn check_direct(p: &LowerPrevision, k: &GambleSet) -> Result<DirectVerdict> {
    k.require_l()?;
    k.require_indicators()?;
    p.check_len(k)?;
    let pv = p.values();
    if let Some(g) = pv.iter().position(Rational::is_negative) {
        return Ok(DirectVerdict::Violation(Witness::Negative { gamble: g }));
    }
    let omega = k.space().len();
    let centered: Vec<Vec<Rational>> =
        (0..k.len()).map(|i| k.gamble(i).payoffs().iter().map(|x| x - &pv[i]).collect()).collect();
    let gammas = [Rational::zero(), Rational::one()];

    // Depth-first over subsets with independent centered gambles.
    let mut stack: Vec<(Vec<usize>, Echelon)> = vec![(Vec::new(), Echelon::default())];
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    while let Some((cur, ech)) = stack.pop() {
        if !cur.is_empty() {
            subsets.push(cur.clone());
        }
        if cur.len() == omega {
            continue;
        }
        let start = cur.last().map_or(0, |l| l + 1);
        for i in (start..k.len()).rev() {
            let mut next = ech.clone();
            if next.try_push(&centered[i]) {
                let mut s = cur.clone();
                s.push(i);
                stack.push((s, next));
            }
        }
    }
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

    for n in &subsets {
        let columns: Vec<Vec<Rational>> = n.iter().map(|&i| k.gamble(i).payoffs().to_vec()).collect();
        let pn: Vec<Rational> = n.iter().map(|&i| pv[i].clone()).collect();
        for gamma in &gammas {
            let target = vec![gamma.clone(); omega];
            let Some((x0, null)) = solve_affine(&columns, &target)? else { continue };
            if let Some(lambda) = violating_lambda(&x0, &null, &pn, gamma) {
                return Ok(DirectVerdict::Violation(Witness::Combination {
                    subset: n.clone(),
                    lambda,
                    gamma: gamma.clone(),
                }));
            }
        }
    }
    Ok(DirectVerdict::Coherent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gambles::{augment_with_indicators, indicator, Gamble, PossibilitySpace};
    use crate::ratlinalg::rat;
    use proptest::prelude::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn gset(n: usize, items: &[(&str, &[(i64, i64)])]) -> GambleSet {
        GambleSet::new(
            PossibilitySpace::letters(n),
            items
                .iter()
                .map(|(name, v)| (name.to_string(), Gamble(v.iter().map(|&(a, b)| rat(a, b)).collect())))
                .collect(),
        )
        .unwrap()
    }

    fn indicators(n: usize) -> GambleSet {
        let s = PossibilitySpace::letters(n);
        let items =
            (0..n).map(|i| (format!("I_{}", s.labels()[i]), indicator(&Event::singleton(i), &s).unwrap())).collect();
        GambleSet::new(s, items).unwrap()
    }

    fn toy() -> GambleSet {
        let k = gset(3, &[("f", &[(1, 1), (1, 2), (0, 1)]), ("g", &[(0, 1), (2, 3), (1, 1)])]);
        augment_with_indicators(&k).unwrap().0
    }

    fn pset3() -> GambleSet {
        let s = PossibilitySpace::letters(3);
        let mut events: Vec<Vec<usize>> = vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]];
        events.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let items = events
            .iter()
            .map(|e| {
                let ev = Event(e.iter().copied().collect());
                (format!("I_{}", ev.label(&s)), indicator(&ev, &s).unwrap())
            })
            .collect();
        GambleSet::new(s, items).unwrap()
    }

    fn p(v: &[(i64, i64)]) -> LowerPrevision {
        LowerPrevision(v.iter().map(|&(a, b)| rat(a, b)).collect())
    }

    #[test]
    fn subsets_of_indicators() {
        assert_eq!(
            independent_subsets(&indicators(3)).unwrap(),
            vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]]
        );
    }

    #[test]
    fn dependent_triple_skipped() {
        // h = (f + g) / 2 lies in span{f, g}.
        let k = gset(
            4,
            &[
                ("f", &[(1, 1), (0, 1), (0, 1), (1, 1)]),
                ("g", &[(0, 1), (1, 1), (0, 1), (1, 1)]),
                ("h", &[(1, 2), (1, 2), (0, 1), (1, 1)]),
            ],
        );
        let subs = independent_subsets(&k).unwrap();
        assert_eq!(subs, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn pair_on_three() {
        let k = gset(3, &[("g1", &[(1, 1), (0, 1), (0, 1)]), ("g2", &[(0, 1), (1, 1), (1, 2)])]);
        assert_eq!(independent_subsets(&k).unwrap(), vec![vec![0, 1]]);
    }

    #[test]
    fn combination_examples() {
        let k = indicators(3);
        assert_eq!(combination_solution(&k, &[0, 1, 2], Target::Unit).unwrap(), Some(vec![r(1), r(1), r(1)]));
        let k2 = gset(
            3,
            &[("I_a", &[(1, 1), (0, 1), (0, 1)]), ("I_b", &[(0, 1), (1, 1), (0, 1)]), ("f", &[(1, 1), (1, 2), (0, 1)])],
        );
        assert_eq!(combination_solution(&k2, &[0, 1], Target::Gamble(2)).unwrap(), Some(vec![r(1), rat(1, 2)]));
        let k3 = gset(3, &[("f", &[(1, 1), (0, 1), (1, 2)]), ("g", &[(0, 1), (1, 2), (1, 1)])]);
        assert_eq!(combination_solution(&k3, &[0, 1], Target::Unit).unwrap(), None);
    }

    #[test]
    fn indicators_give_simplex() {
        let cs = generate_constraints(&indicators(3)).unwrap();
        assert_eq!(cs.len(), 4);
        assert_eq!(cs.constraints[3].coeffs, vec![r(1), r(1), r(1)]);
        assert_eq!(cs.constraints[3].rhs, r(1));
        assert_eq!(cs.constraints[3].kind, ConstraintKind::Inhomogeneous);
    }

    #[test]
    fn pset_three_raw_count() {
        let cs = generate_constraints(&pset3()).unwrap();
        assert_eq!(cs.raw_count, 17);
    }

    #[test]
    fn requires_indicators_and_l() {
        let k = gset(3, &[("f", &[(1, 1), (1, 2), (0, 1)]), ("g", &[(0, 1), (2, 3), (1, 1)])]);
        assert!(matches!(generate_constraints(&k), Err(Error::MissingIndicator(_))));
        let k = gset(2, &[("f", &[(2, 1), (0, 1)]), ("I_a", &[(1, 1), (0, 1)]), ("I_b", &[(0, 1), (1, 1)])]);
        assert!(matches!(generate_constraints(&k), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn check_against_examples() {
        let k = indicators(3);
        let cs = generate_constraints(&k).unwrap();
        assert!(check_against(&p(&[(0, 1), (0, 1), (0, 1)]), &cs).unwrap().is_coherent());
        let Verdict::Violation(v) = check_against(&p(&[(1, 2), (1, 2), (1, 2)]), &cs).unwrap() else {
            panic!("expected violation")
        };
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].slack, rat(1, 2));
        assert!(check_against(&p(&[(0, 1)]), &cs).is_err());
    }

    #[test]
    fn three_on_three_vertex_is_coherent() {
        let k = gset(
            3,
            &[("f", &[(1, 1), (0, 1), (1, 2)]), ("g", &[(0, 1), (1, 2), (1, 1)]), ("h", &[(1, 2), (1, 1), (0, 1)])],
        );
        let (aug, _) = augment_with_indicators(&k).unwrap();
        let cs = generate_constraints(&aug).unwrap();
        // P_b on {f,g,h} extended to the indicators.
        let pb = aug.degenerate(1);
        assert_eq!(&pb.values()[..3], &[r(0), rat(1, 2), r(1)]);
        assert!(check_against(&pb, &cs).unwrap().is_coherent());
        assert!(check_direct(&pb, &aug).unwrap().is_coherent());
    }

    #[test]
    fn check_direct_examples() {
        let k = toy();
        assert!(check_direct(&LowerPrevision(vec![r(0); 5]), &k).unwrap().is_coherent());
        let k = indicators(3);
        let v = check_direct(&p(&[(1, 2), (1, 2), (1, 2)]), &k).unwrap();
        assert_eq!(
            v,
            DirectVerdict::Violation(Witness::Combination {
                subset: vec![0, 1, 2],
                lambda: vec![r(1), r(1), r(1)],
                gamma: r(1)
            })
        );
        assert_eq!(
            check_direct(&p(&[(-1, 2), (0, 1), (0, 1)]), &k).unwrap(),
            DirectVerdict::Violation(Witness::Negative { gamble: 0 })
        );
    }

    #[test]
    fn homogeneous_violation_found_directly() {
        // f = (1,1/2,0) dominates I_a, so P(f) >= P(I_a) is required.
        let k = toy();
        let mut v = vec![r(0); 5];
        v[2] = rat(1, 2);
        let lp = LowerPrevision(v);
        assert!(!check_direct(&lp, &k).unwrap().is_coherent());
        let cs = generate_constraints(&k).unwrap();
        assert!(!check_against(&lp, &cs).unwrap().is_coherent());
    }

    #[test]
    fn degenerate_and_vacuous_pass() {
        for k in [toy(), pset3(), indicators(4)] {
            let cs = generate_constraints(&k).unwrap();
            let n = k.space().len();
            for w in 0..n {
                assert!(check_against(&k.degenerate(w), &cs).unwrap().is_coherent());
            }
            for mask in 1u32..(1 << n) {
                let a = Event((0..n).filter(|i| mask & (1 << i) != 0).collect());
                assert!(check_against(&k.vacuous(&a), &cs).unwrap().is_coherent());
            }
        }
    }

    #[test]
    fn generated_constraints_are_supporting() {
        for k in [toy(), pset3()] {
            let cs = generate_constraints(&k).unwrap();
            for c in &cs.constraints {
                let tight = (0..k.space().len()).any(|w| c.excess(k.degenerate(w).values()).is_zero());
                assert!(tight, "{c:?}");
                assert_eq!(c.canonical(), *c);
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_constraints(&pset3()).unwrap();
        let b = generate_constraints(&pset3()).unwrap();
        assert_eq!(a, b);
    }

    fn arb_case() -> impl Strategy<Value = (GambleSet, LowerPrevision)> {
        let gamble = proptest::collection::vec(0i64..=12, 3);
        (proptest::collection::vec(gamble, 1..=2), proptest::collection::vec(0i64..=12, 5)).prop_filter_map(
            "needs distinct gambles in L",
            |(raw, vals)| {
                let s = PossibilitySpace::letters(3);
                let mut items = Vec::new();
                for (i, g) in raw.into_iter().enumerate() {
                    let g = Gamble(g.into_iter().map(|x| rat(x, 12)).collect());
                    let (n, _) = crate::gambles::normalize(&g)?;
                    items.push((format!("g{}", i + 1), n));
                }
                let base = GambleSet::new(s, items).ok()?;
                let (k, _) = augment_with_indicators(&base).ok()?;
                let p = LowerPrevision(vals[..k.len()].iter().map(|&x| rat(x, 12)).collect());
                Some((k, p))
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn direct_matches_constraints((k, p) in arb_case()) {
            let cs = generate_constraints(&k).unwrap();
            let a = check_against(&p, &cs).unwrap().is_coherent();
            let d = check_direct(&p, &k).unwrap().is_coherent();
            prop_assert_eq!(a, d);
        }
    }
}
