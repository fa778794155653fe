//! Gambles, events, lower previsions and the normalized class `L` of
//! gambles with minimum 0 and maximum 1.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::ratlinalg::Rational;

/// Finite possibility space with ordered, distinct element labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PossibilitySpace {
    labels: Vec<String>,
}

impl PossibilitySpace {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::SpaceTooSmall { min: 1, found: 0 });
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateElement(l.clone()));
            }
        }
        Ok(PossibilitySpace { labels })
    }

    /// `a, b, c, ...`; past 26 elements, `w1, w2, ...`.
    pub fn letters(n: usize) -> Self {
        let labels = if n <= 26 {
            (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
        } else {
            (1..=n).map(|i| format!("w{i}")).collect()
        };
        PossibilitySpace { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| Error::UnknownElement(label.to_string()))
    }

    pub fn full_event(&self) -> Event {
        Event((0..self.len()).collect())
    }
}

/// Subset of a possibility space, by element index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Event(pub BTreeSet<usize>);

impl Event {
    pub fn from_labels<S: AsRef<str>>(space: &PossibilitySpace, labels: &[S]) -> Result<Self> {
        labels.iter().map(|l| space.index_of(l.as_ref())).collect::<Result<_>>().map(Event)
    }

    pub fn singleton(i: usize) -> Self {
        Event(BTreeSet::from([i]))
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Concatenated labels, e.g. `ab`; `∅` for the empty event.
    pub fn label(&self, space: &PossibilitySpace) -> String {
        if self.is_empty() {
            return "∅".into();
        }
        let parts: Vec<&str> = self.0.iter().map(|&i| space.labels()[i].as_str()).collect();
        if parts.iter().all(|p| p.chars().count() == 1) {
            parts.concat()
        } else {
            parts.join(",")
        }
    }
}

/// Payoff vector over the elements of a possibility space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gamble(pub Vec<Rational>);

impl Gamble {
    pub fn new(payoffs: Vec<Rational>) -> Self {
        Gamble(payoffs)
    }

    pub fn constant(value: Rational, n: usize) -> Self {
        Gamble(vec![value; n])
    }

    pub fn payoffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min_payoff(&self) -> Rational {
        self.0.iter().min().cloned().unwrap_or_default()
    }

    pub fn max_payoff(&self) -> Rational {
        self.0.iter().max().cloned().unwrap_or_default()
    }

    pub fn is_constant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    /// Minimum exactly 0 and maximum exactly 1.
    pub fn in_l(&self) -> bool {
        !self.is_empty() && self.min_payoff().is_zero() && self.max_payoff().is_one()
    }

    pub fn support(&self) -> Event {
        support(self)
    }
}

impl fmt::Display for Gamble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Positive affine map taking a gamble into `L`: `normalized = (g - shift) / scale`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineRecord {
    pub scale: Rational,
    pub shift: Rational,
    pub source: String,
}

pub fn indicator(a: &Event, space: &PossibilitySpace) -> Result<Gamble> {
    if let Some(&bad) = a.0.iter().find(|&&i| i >= space.len()) {
        return Err(Error::UnknownElement(format!("#{bad}")));
    }
    Ok(Gamble((0..space.len()).map(|i| if a.contains(i) { Rational::one() } else { Rational::zero() }).collect()))
}

pub fn support(g: &Gamble) -> Event {
    Event(g.0.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, _)| i).collect())
}

/// `(g - min g) / (max g - min g)`, or `None` for constant gambles.
pub fn normalize(g: &Gamble) -> Option<(Gamble, AffineRecord)> {
    normalize_named(g, "")
}

pub fn normalize_named(g: &Gamble, source: &str) -> Option<(Gamble, AffineRecord)> {
    if g.is_empty() || g.is_constant() {
        return None;
    }
    let lo = g.min_payoff();
    let scale = &g.max_payoff() - &lo;
    let inv = scale.recip();
    let out = Gamble(g.0.iter().map(|x| &(x - &lo) * &inv).collect());
    Some((out, AffineRecord { scale, shift: lo, source: source.to_string() }))
}

/// Value of the original gamble's lower prevision from the normalized one.
pub fn denormalize_value(v: &Rational, rec: &AffineRecord) -> Rational {
    rec.scale.mul_add(v, &rec.shift)
}

/// `1 - g`, for `g` in `L`.
pub fn complement_gamble(g: &Gamble) -> Result<Gamble> {
    if !g.in_l() {
        return Err(Error::NotNormalized(g.to_string()));
    }
    Ok(Gamble(g.0.iter().map(|x| &Rational::one() - x).collect()))
}

/// Named, ordered set of distinct gambles on one possibility space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GambleSet {
    space: PossibilitySpace,
    names: Vec<String>,
    gambles: Vec<Gamble>,
    in_l: bool,
}

impl GambleSet {
    pub fn new(space: PossibilitySpace, items: Vec<(String, Gamble)>) -> Result<Self> {
        let mut names = Vec::with_capacity(items.len());
        let mut gambles = Vec::with_capacity(items.len());
        let mut by_name = HashSet::new();
        let mut by_vec: HashMap<Gamble, String> = HashMap::new();
        for (name, g) in items {
            if g.len() != space.len() {
                return Err(Error::DimensionMismatch { expected: space.len(), found: g.len() });
            }
            if !by_name.insert(name.clone()) {
                return Err(Error::DuplicateName(name));
            }
            if let Some(prev) = by_vec.get(&g) {
                return Err(Error::DuplicateGamble(prev.clone(), name));
            }
            by_vec.insert(g.clone(), name.clone());
            names.push(name);
            gambles.push(g);
        }
        let in_l = gambles.iter().all(Gamble::in_l);
        Ok(GambleSet { space, names, gambles, in_l })
    }

    /// Normalizes arbitrary gambles into `L`, dropping constants. Returns the
    /// set together with one affine record per kept gamble and the names of
    /// the dropped constant gambles. Gambles that coincide after
    /// normalization are kept once (first name wins) with their own records.
    pub fn normalized(
        space: PossibilitySpace,
        items: Vec<(String, Gamble)>,
    ) -> Result<(Self, Vec<AffineRecord>, Vec<String>)> {
        let mut kept: Vec<(String, Gamble)> = Vec::new();
        let mut records = Vec::new();
        let mut dropped = Vec::new();
        let mut seen = HashSet::new();
        for (name, g) in items {
            if g.len() != space.len() {
                return Err(Error::DimensionMismatch { expected: space.len(), found: g.len() });
            }
            match normalize_named(&g, &name) {
                None => dropped.push(name),
                Some((n, rec)) => {
                    records.push(rec);
                    if seen.insert(n.clone()) {
                        kept.push((name, n));
                    }
                }
            }
        }
        Ok((GambleSet::new(space, kept)?, records, dropped))
    }

    pub fn space(&self) -> &PossibilitySpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.gambles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gambles.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn gambles(&self) -> &[Gamble] {
        &self.gambles
    }

    pub fn gamble(&self, i: usize) -> &Gamble {
        &self.gambles[i]
    }

    pub fn in_l(&self) -> bool {
        self.in_l
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn position_of(&self, g: &Gamble) -> Option<usize> {
        self.gambles.iter().position(|h| h == g)
    }

    pub fn require_l(&self) -> Result<()> {
        match self.gambles.iter().position(|g| !g.in_l()) {
            Some(i) => Err(Error::NotNormalized(self.names[i].clone())),
            None => Ok(()),
        }
    }

    /// Errors unless every singleton indicator is present.
    pub fn require_indicators(&self) -> Result<()> {
        for i in 0..self.space.len() {
            let ind = indicator(&Event::singleton(i), &self.space)?;
            if self.position_of(&ind).is_none() {
                return Err(Error::MissingIndicator(self.space.labels()[i].clone()));
            }
        }
        Ok(())
    }

    /// Restriction of the degenerate prevision at element `w`.
    pub fn degenerate(&self, w: usize) -> LowerPrevision {
        LowerPrevision(self.gambles.iter().map(|g| g.0[w].clone()).collect())
    }

    /// Restriction of the vacuous lower prevision relative to a nonempty event.
    pub fn vacuous(&self, a: &Event) -> LowerPrevision {
        LowerPrevision(
            self.gambles.iter().map(|g| a.0.iter().map(|&i| &g.0[i]).min().cloned().unwrap_or_default()).collect(),
        )
    }

    /// Gambles from `idx`, in that order.
    pub fn subset(&self, idx: &[usize]) -> Result<GambleSet> {
        GambleSet::new(
            self.space.clone(),
            idx.iter().map(|&i| (self.names[i].clone(), self.gambles[i].clone())).collect(),
        )
    }
}

/// Adds every missing singleton indicator `I_w` after the existing gambles,
/// in element order. Returns the augmented set and the names added.
pub fn augment_with_indicators(k: &GambleSet) -> Result<(GambleSet, Vec<String>)> {
    k.require_l()?;
    let mut items: Vec<(String, Gamble)> = k.names.iter().cloned().zip(k.gambles.iter().cloned()).collect();
    let mut taken: HashSet<String> = k.names.iter().cloned().collect();
    let mut added = Vec::new();
    for i in 0..k.space.len() {
        let ind = indicator(&Event::singleton(i), &k.space)?;
        if k.position_of(&ind).is_some() {
            continue;
        }
        let mut name = format!("I_{}", k.space.labels()[i]);
        while taken.contains(&name) {
            name.push('\'');
        }
        taken.insert(name.clone());
        added.push(name.clone());
        items.push((name, ind));
    }
    Ok((GambleSet::new(k.space.clone(), items)?, added))
}

/// Lower prevision values, one per gamble of an associated [`GambleSet`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LowerPrevision(pub Vec<Rational>);

impl LowerPrevision {
    pub fn new(values: Vec<Rational>) -> Self {
        LowerPrevision(values)
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn check_len(&self, k: &GambleSet) -> Result<()> {
        if self.len() != k.len() {
            return Err(Error::IndexMismatch { expected: k.len(), found: self.len() });
        }
        Ok(())
    }

    /// Builds from `name -> value` pairs; every gamble of `k` must be given.
    pub fn from_named(k: &GambleSet, values: &[(String, Rational)]) -> Result<Self> {
        let mut out: Vec<Option<Rational>> = vec![None; k.len()];
        for (name, v) in values {
            let i = k.index_of(name).ok_or_else(|| Error::UnknownGamble(name.clone()))?;
            out[i] = Some(v.clone());
        }
        out.into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::UnknownGamble(format!("no value for `{}`", k.names[i]))))
            .collect::<Result<_>>()
            .map(LowerPrevision)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlinalg::rat;
    use proptest::prelude::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn abc() -> PossibilitySpace {
        PossibilitySpace::letters(3)
    }

    fn g(v: &[(i64, i64)]) -> Gamble {
        Gamble(v.iter().map(|&(a, b)| rat(a, b)).collect())
    }

    #[test]
    fn indicator_examples() {
        let s = abc();
        assert_eq!(indicator(&Event::from_labels(&s, &["a"]).unwrap(), &s).unwrap(), g(&[(1, 1), (0, 1), (0, 1)]));
        let full = indicator(&s.full_event(), &s).unwrap();
        assert_eq!(full, Gamble::constant(r(1), 3));
        assert!(!full.in_l());
        assert_eq!(indicator(&Event::default(), &s).unwrap(), Gamble::constant(r(0), 3));
        assert!(Event::from_labels(&s, &["z"]).is_err());
        assert!(indicator(&Event::singleton(7), &s).is_err());
    }

    #[test]
    fn support_examples() {
        assert_eq!(support(&g(&[(1, 1), (1, 2), (0, 1)])), Event(BTreeSet::from([0, 1])));
        assert_eq!(support(&Gamble::constant(r(0), 3)), Event::default());
        assert_eq!(support(&g(&[(0, 1), (1, 1), (0, 1)])), Event::singleton(1));
    }

    #[test]
    fn normalize_examples() {
        let (n, rec) = normalize(&g(&[(2, 1), (1, 1), (0, 1)])).unwrap();
        assert_eq!(n, g(&[(1, 1), (1, 2), (0, 1)]));
        assert_eq!((rec.scale, rec.shift), (r(2), r(0)));
        assert!(normalize(&Gamble::constant(r(3), 3)).is_none());
        let member = g(&[(1, 1), (1, 2), (0, 1)]);
        let (n, rec) = normalize(&member).unwrap();
        assert_eq!(n, member);
        assert_eq!((rec.scale, rec.shift), (r(1), r(0)));
    }

    #[test]
    fn denormalize_examples() {
        let rec = |scale: i64, shift: i64| AffineRecord { scale: r(scale), shift: r(shift), source: String::new() };
        assert_eq!(denormalize_value(&rat(1, 2), &rec(2, 0)), r(1));
        assert_eq!(denormalize_value(&r(0), &rec(5, -3)), r(-3));
        assert_eq!(denormalize_value(&rat(2, 3), &rec(3, 1)), r(3));
    }

    #[test]
    fn complement_examples() {
        let f = g(&[(1, 1), (1, 2), (0, 1)]);
        assert_eq!(complement_gamble(&f).unwrap(), g(&[(0, 1), (1, 2), (1, 1)]));
        let ia = g(&[(1, 1), (0, 1), (0, 1)]);
        assert_eq!(complement_gamble(&ia).unwrap(), g(&[(0, 1), (1, 1), (1, 1)]));
        assert_eq!(complement_gamble(&complement_gamble(&f).unwrap()).unwrap(), f);
        assert!(complement_gamble(&g(&[(2, 1), (0, 1)])).is_err());
    }

    #[test]
    fn augment_toy() {
        let k = GambleSet::new(
            abc(),
            vec![("f".into(), g(&[(1, 1), (1, 2), (0, 1)])), ("g".into(), g(&[(0, 1), (2, 3), (1, 1)]))],
        )
        .unwrap();
        let (aug, added) = augment_with_indicators(&k).unwrap();
        assert_eq!(aug.names(), &["f", "g", "I_a", "I_b", "I_c"]);
        assert_eq!(added, vec!["I_a", "I_b", "I_c"]);
        let (again, none) = augment_with_indicators(&aug).unwrap();
        assert_eq!(again, aug);
        assert!(none.is_empty());
    }

    #[test]
    fn augment_skips_present_indicators() {
        let k = GambleSet::new(
            abc(),
            vec![("A".into(), g(&[(1, 1), (0, 1), (0, 1)])), ("f".into(), g(&[(1, 1), (1, 2), (0, 1)]))],
        )
        .unwrap();
        let (aug, added) = augment_with_indicators(&k).unwrap();
        assert_eq!(added, vec!["I_b", "I_c"]);
        assert_eq!(aug.len(), 4);
    }

    #[test]
    fn duplicates_rejected() {
        let f = g(&[(1, 1), (1, 2), (0, 1)]);
        let dup = GambleSet::new(abc(), vec![("f".into(), f.clone()), ("h".into(), f.clone())]);
        assert!(matches!(dup, Err(Error::DuplicateGamble(..))));
        let same_name =
            GambleSet::new(abc(), vec![("f".into(), f.clone()), ("f".into(), g(&[(0, 1), (1, 1), (0, 1)]))]);
        assert!(matches!(same_name, Err(Error::DuplicateName(_))));
    }

    #[test]
    fn previsions_from_names() {
        let k = GambleSet::new(
            abc(),
            vec![("f".into(), g(&[(1, 1), (1, 2), (0, 1)])), ("g".into(), g(&[(0, 1), (2, 3), (1, 1)]))],
        )
        .unwrap();
        let p = LowerPrevision::from_named(&k, &[("g".into(), rat(2, 3)), ("f".into(), rat(1, 2))]).unwrap();
        assert_eq!(p.values(), &[rat(1, 2), rat(2, 3)]);
        assert!(LowerPrevision::from_named(&k, &[("f".into(), r(0))]).is_err());
        assert_eq!(k.vacuous(&Event(BTreeSet::from([0, 1]))).values(), &[rat(1, 2), r(0)]);
        assert_eq!(k.degenerate(1).values(), &[rat(1, 2), rat(2, 3)]);
    }

    fn arb_gamble() -> impl Strategy<Value = Gamble> {
        proptest::collection::vec((-20i64..20, 1i64..7), 2..6)
            .prop_map(|v| Gamble(v.into_iter().map(|(a, b)| rat(a, b)).collect()))
    }

    proptest! {
        #[test]
        fn normalize_inverts(gm in arb_gamble()) {
            match normalize(&gm) {
                None => prop_assert!(gm.is_constant()),
                Some((n, rec)) => {
                    prop_assert!(n.in_l());
                    prop_assert!(rec.scale.is_positive());
                    let back: Vec<Rational> = n.0.iter().map(|x| denormalize_value(x, &rec)).collect();
                    prop_assert_eq!(back, gm.0.clone());
                    let c = complement_gamble(&n).unwrap();
                    prop_assert!(c.in_l());
                    prop_assert_eq!(complement_gamble(&c).unwrap(), n.clone());
                    // max g = 1 in L, so 1 - g vanishes somewhere.
                    prop_assert!(support(&c).len() < gm.len());
                }
            }
        }
    }
}
