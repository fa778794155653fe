//! Credal sets in probability-mass coordinates, natural extension, and the
//! lower-envelope coherence test.

use crate::coherence::{check_direct, DirectVerdict};
use crate::error::{Error, Result};
use crate::gambles::{augment_with_indicators, Gamble, GambleSet, LowerPrevision, PossibilitySpace};
use crate::polytope::{enumerate_vertices, HRep};
use crate::ratlinalg::lp::{FeasibleDictionary, Solution};
use crate::ratlinalg::Rational;

/// Probability mass function: nonnegative, summing to one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MassFunction(Vec<Rational>);

impl MassFunction {
    pub fn new(probabilities: Vec<Rational>) -> Result<Self> {
        if probabilities.iter().any(Rational::is_negative) {
            return Err(Error::Inconsistent("negative probability mass".into()));
        }
        if !probabilities.iter().sum::<Rational>().is_one() {
            return Err(Error::Inconsistent("probability masses do not sum to 1".into()));
        }
        Ok(MassFunction(probabilities))
    }

    pub fn probabilities(&self) -> &[Rational] {
        &self.0
    }

    /// Expectation of `g`.
    pub fn expectation(&self, g: &Gamble) -> Rational {
        crate::ratlinalg::dot(&self.0, g.payoffs())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CredalSet {
    pub space: PossibilitySpace,
    pub hrep: HRep,
    /// Lexicographically sorted; empty when the lower prevision incurs sure loss.
    pub vertices: Vec<MassFunction>,
}

impl CredalSet {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Simplex rows followed by one row `<p, g> >= P(g)` per gamble.
pub fn credal_hrep(p: &LowerPrevision, k: &GambleSet) -> Result<HRep> {
    p.check_len(k)?;
    let n = k.space().len();
    let mut h = HRep::empty(n);
    for w in 0..n {
        let mut a = vec![Rational::zero(); n];
        a[w] = -Rational::one();
        h.push(a, Rational::zero())?;
    }
    h.push(vec![Rational::one(); n], Rational::one())?;
    h.push(vec![-Rational::one(); n], -Rational::one())?;
    for (g, v) in k.gambles().iter().zip(p.values()) {
        h.push(g.payoffs().iter().map(|x| -x).collect(), -v)?;
    }
    h.with_names(k.space().labels().to_vec())
}

pub fn credal_vertices(p: &LowerPrevision, k: &GambleSet) -> Result<CredalSet> {
    let hrep = credal_hrep(p, k)?;
    let vertices = match enumerate_vertices(&hrep) {
        Ok((v, _)) => v.into_vertices().into_iter().map(MassFunction).collect(),
        Err(Error::Infeasible) => Vec::new(),
        Err(e) => return Err(e),
    };
    Ok(CredalSet { space: k.space().clone(), hrep, vertices })
}

fn dictionary(p: &LowerPrevision, k: &GambleSet) -> Result<Option<FeasibleDictionary>> {
    let h = credal_hrep(p, k)?;
    Ok(FeasibleDictionary::new(h.dim(), h.rows()))
}

fn minimize(d: &FeasibleDictionary, f: &[Rational]) -> Rational {
    let neg: Vec<Rational> = f.iter().map(|x| -x).collect();
    match d.maximize(&neg) {
        Solution::Optimal { value, .. } => -value,
        Solution::Unbounded { .. } => unreachable!("credal sets are bounded"),
    }
}

/// Least committal extension of `p` to the gamble `f`.
pub fn natural_extension(p: &LowerPrevision, k: &GambleSet, f: &Gamble) -> Result<Rational> {
    if f.len() != k.space().len() {
        return Err(Error::DimensionMismatch { expected: k.space().len(), found: f.len() });
    }
    let d = dictionary(p, k)?.ok_or(Error::SureLoss)?;
    Ok(minimize(&d, f.payoffs()))
}

/// Whether the credal set is nonempty and its lower envelope reproduces `p`
/// on every gamble of `k`.
pub fn is_lower_envelope(p: &LowerPrevision, k: &GambleSet) -> Result<bool> {
    let Some(d) = dictionary(p, k)? else {
        return Ok(false);
    };
    Ok(k.gambles().iter().zip(p.values()).all(|(g, v)| minimize(&d, g.payoffs()) == *v))
}

/// Direct check on a set that may lack singleton indicators. `p` is first
/// extended to the missing indicators by natural extension, so the returned
/// witness indexes into the augmented set (`k` followed by the indicators).
/// Fails with [`Error::SureLoss`] when the credal set is empty.
pub fn check_direct_augmented(p: &LowerPrevision, k: &GambleSet) -> Result<(GambleSet, DirectVerdict)> {
    p.check_len(k)?;
    let (aug, _) = augment_with_indicators(k)?;
    let d = dictionary(p, k)?.ok_or(Error::SureLoss)?;
    let mut ext = p.values().to_vec();
    ext.extend(aug.gambles()[k.len()..].iter().map(|g| minimize(&d, g.payoffs())));
    let verdict = check_direct(&LowerPrevision(ext), &aug)?;
    Ok((aug, verdict))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::{check_against, check_direct, generate_constraints};
    use crate::gambles::{augment_with_indicators, Event};
    use crate::ratlinalg::rat;
    use proptest::prelude::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn gset(items: &[(&str, [(i64, i64); 3])]) -> GambleSet {
        GambleSet::new(
            PossibilitySpace::letters(3),
            items
                .iter()
                .map(|(name, v)| (name.to_string(), Gamble(v.iter().map(|&(a, b)| rat(a, b)).collect())))
                .collect(),
        )
        .unwrap()
    }

    fn toy() -> GambleSet {
        gset(&[("f", [(1, 1), (1, 2), (0, 1)]), ("g", [(0, 1), (2, 3), (1, 1)])])
    }

    fn three() -> GambleSet {
        gset(&[("f", [(1, 1), (0, 1), (1, 2)]), ("g", [(0, 1), (1, 2), (1, 1)]), ("h", [(1, 2), (1, 1), (0, 1)])])
    }

    fn lp(v: &[(i64, i64)]) -> LowerPrevision {
        LowerPrevision(v.iter().map(|&(a, b)| rat(a, b)).collect())
    }

    #[test]
    fn vacuous_gives_simplex() {
        let k = toy();
        let c = credal_vertices(&lp(&[(0, 1), (0, 1)]), &k).unwrap();
        assert_eq!(c.vertices.len(), 3);
        assert_eq!(c.vertices[0].probabilities(), &[r(0), r(0), r(1)]);
        assert!(is_lower_envelope(&lp(&[(0, 1), (0, 1)]), &k).unwrap());
    }

    #[test]
    fn above_one_is_empty() {
        let k = toy();
        assert!(credal_vertices(&lp(&[(3, 2), (0, 1)]), &k).unwrap().is_empty());
        assert!(matches!(natural_extension(&lp(&[(3, 2), (0, 1)]), &k, k.gamble(0)), Err(Error::SureLoss)));
    }

    #[test]
    fn point_mass_at_a() {
        let k = three();
        let pa = k.degenerate(0);
        assert_eq!(pa.values(), &[r(1), r(0), rat(1, 2)]);
        let c = credal_vertices(&pa, &k).unwrap();
        assert_eq!(c.vertices, vec![MassFunction(vec![r(1), r(0), r(0)])]);
    }

    #[test]
    fn indicators_at_half_are_empty() {
        let k = gset(&[
            ("I_a", [(1, 1), (0, 1), (0, 1)]),
            ("I_b", [(0, 1), (1, 1), (0, 1)]),
            ("I_c", [(0, 1), (0, 1), (1, 1)]),
        ]);
        assert!(credal_vertices(&lp(&[(1, 2), (1, 2), (1, 2)]), &k).unwrap().is_empty());
    }

    #[test]
    fn natural_extension_examples() {
        let k = toy();
        assert_eq!(natural_extension(&lp(&[(0, 1), (0, 1)]), &k, k.gamble(0)).unwrap(), r(0));
        let p = lp(&[(1, 2), (2, 3)]);
        let ib = Gamble(vec![r(0), r(1), r(0)]);
        let by_lp = natural_extension(&p, &k, &ib).unwrap();
        let c = credal_vertices(&p, &k).unwrap();
        let brute = c.vertices.iter().map(|m| m.expectation(&ib)).min().unwrap();
        assert_eq!(by_lp, brute);
        assert!(is_lower_envelope(&p, &k).unwrap());
    }

    #[test]
    fn toy_top_corner_incurs_sure_loss() {
        assert!(!is_lower_envelope(&lp(&[(1, 1), (1, 1)]), &toy()).unwrap());
    }

    #[test]
    fn three_on_three_table_rows() {
        let k = three();
        let rows = [
            [(0, 1), (0, 1), (0, 1)],
            [(0, 1), (0, 1), (1, 2)],
            [(1, 2), (0, 1), (0, 1)],
            [(0, 1), (1, 2), (0, 1)],
            [(1, 1), (0, 1), (1, 2)],
            [(0, 1), (1, 2), (1, 1)],
            [(1, 2), (1, 1), (0, 1)],
        ];
        for row in rows {
            assert!(is_lower_envelope(&lp(&row), &k).unwrap(), "{row:?}");
        }
    }

    fn arb_case() -> impl Strategy<Value = (GambleSet, LowerPrevision, Gamble, i64, i64)> {
        let g = proptest::collection::vec(0i64..=6, 3);
        (proptest::collection::vec(g.clone(), 1..=3), proptest::collection::vec(0i64..=6, 3), g, 0i64..4, -3i64..4)
            .prop_filter_map("gambles in L", |(raw, vals, f, lam, alpha)| {
                let mut items = Vec::new();
                for (i, v) in raw.into_iter().enumerate() {
                    let (n, _) = crate::gambles::normalize(&Gamble(v.into_iter().map(|x| rat(x, 6)).collect()))?;
                    items.push((format!("g{i}"), n));
                }
                let k = GambleSet::new(PossibilitySpace::letters(3), items).ok()?;
                let p = LowerPrevision(vals[..k.len()].iter().map(|&x| rat(x, 12)).collect());
                let f = Gamble(f.into_iter().map(|x| rat(x, 6)).collect());
                Some((k, p, f, lam, alpha))
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn extension_properties((k, p, f, lam, alpha) in arb_case()) {
            let Ok(e) = natural_extension(&p, &k, &f) else { return Ok(()) };
            prop_assert!(f.min_payoff() <= e && e <= f.max_payoff());
            let shifted = Gamble(f.payoffs().iter().map(|x| &(x * &r(lam)) + &r(alpha)).collect());
            prop_assert_eq!(natural_extension(&p, &k, &shifted).unwrap(), &(&e * &r(lam)) + &r(alpha));
            let bigger = Gamble(f.payoffs().iter().enumerate().map(|(i, x)| if i == 0 { x + &r(1) } else { x.clone() }).collect());
            prop_assert!(natural_extension(&p, &k, &bigger).unwrap() >= e);
        }

        #[test]
        fn three_oracles_agree((k, p, _f, _l, _a) in arb_case()) {
            let (aug, _) = augment_with_indicators(&k).unwrap();
            let mut vals = p.values().to_vec();
            // Extend by natural extension on the indicators when possible.
            for i in k.len()..aug.len() {
                let e = natural_extension(&p, &k, aug.gamble(i)).unwrap_or_default();
                vals.push(e);
            }
            let q = LowerPrevision(vals);
            let cs = generate_constraints(&aug).unwrap();
            let a = check_against(&q, &cs).unwrap().is_coherent();
            let d = check_direct(&q, &aug).unwrap().is_coherent();
            let e = is_lower_envelope(&q, &aug).unwrap();
            prop_assert_eq!(a, d);
            prop_assert_eq!(a, e);
        }
    }

    #[test]
    fn vacuous_relative_to_event() {
        let k = three();
        let a = Event([0usize, 2].into_iter().collect());
        let v = k.vacuous(&a);
        assert!(is_lower_envelope(&v, &k).unwrap());
        let c = credal_vertices(&v, &k).unwrap();
        // Only p_a + p_c/2 >= 1/2 binds.
        let want = vec![
            MassFunction(vec![r(0), r(0), r(1)]),
            MassFunction(vec![rat(1, 2), rat(1, 2), r(0)]),
            MassFunction(vec![r(1), r(0), r(0)]),
        ];
        assert_eq!(c.vertices, want);
    }
}
