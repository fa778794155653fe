//! Experiment families and the end-to-end pipeline: augment, generate,
//! reduce, project, enumerate.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::coherence::generate_constraints;
use crate::error::{Error, Result};
use crate::gambles::{
    augment_with_indicators, complement_gamble, indicator, Event, Gamble, GambleSet, PossibilitySpace,
};
use crate::polytope::{
    adjacency, enumerate_vertices_with, fm_project, remove_redundant, AdjacencyGraph, DdOptions, HRep, VRep,
};
use crate::ratlinalg::{rat, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Single,
    Custom,
    /// Singleton indicators.
    Lmass,
    /// Indicators of singleton complements.
    Umass,
    /// Singletons and their complements.
    Lumass,
    /// Indicators of all nontrivial events.
    Pset,
    /// Gambles in `L` with values in `{l/k : 0 <= l <= k}`.
    ValuesBased,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Single => "single",
            Family::Custom => "custom",
            Family::Lmass => "l",
            Family::Umass => "u",
            Family::Lumass => "lu",
            Family::Pset => "pset",
            Family::ValuesBased => "vb",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "single" => Family::Single,
            "custom" => Family::Custom,
            "l" | "lmass" => Family::Lmass,
            "u" | "umass" => Family::Umass,
            "lu" | "lumass" => Family::Lumass,
            "pset" => Family::Pset,
            "vb" | "values" | "values_based" => Family::ValuesBased,
            _ => return Err(Error::InvalidFamily(format!("unknown family `{s}`"))),
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: Family,
    pub omega_size: usize,
    /// Grid parameter of the values-based family.
    pub k: usize,
    /// Explicit gambles for `single` and `custom`.
    pub gambles: Option<GambleSet>,
}

fn r(n: i64, d: i64) -> Rational {
    rat(n, d)
}

fn vector(v: &[(i64, i64)]) -> Gamble {
    Gamble(v.iter().map(|&(n, d)| r(n, d)).collect())
}

fn named(n: usize, items: Vec<(&str, Gamble)>) -> GambleSet {
    GambleSet::new(PossibilitySpace::letters(n), items.into_iter().map(|(s, g)| (s.to_string(), g)).collect())
        .expect("preset gambles are distinct")
}

/// Names of the built-in gamble sets accepted by [`FamilySpec::preset`].
pub const PRESETS: &[&str] = &["toy", "1on3", "1on3_lu", "2on3", "2on4", "2on5", "3on3", "3on4", "3on5"];

impl FamilySpec {
    pub fn new(family: Family, omega_size: usize, k: usize) -> Result<Self> {
        let spec = FamilySpec { family, omega_size, k, gambles: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn custom(k: GambleSet) -> Self {
        let family = if k.len() == 1 { Family::Single } else { Family::Custom };
        FamilySpec { family, omega_size: k.space().len(), k: 0, gambles: Some(k) }
    }

    /// Small named gamble sets. The `2on4`, `2on5`, `3on4` and `3on5` sets
    /// extend the three-element ones with extra payoffs chosen here, since
    /// no canonical vectors exist for them.
    pub fn preset(name: &str) -> Result<Self> {
        let f = [(1, 1), (1, 2), (0, 1)];
        let k = match name {
            "toy" => named(3, vec![("f", vector(&f)), ("g", vector(&[(0, 1), (2, 3), (1, 1)]))]),
            "1on3" => named(3, vec![("f", vector(&f))]),
            "1on3_lu" => {
                let fg = vector(&f);
                let c = complement_gamble(&fg)?;
                named(3, vec![("f", fg), ("1-f", c)])
            }
            "2on3" => named(3, vec![("f", vector(&f)), ("g", vector(&[(0, 1), (1, 1), (1, 2)]))]),
            "2on4" => named(
                4,
                vec![
                    ("f", vector(&[(1, 1), (1, 2), (0, 1), (1, 4)])),
                    ("g", vector(&[(0, 1), (1, 1), (1, 2), (2, 3)])),
                ],
            ),
            "2on5" => named(
                5,
                vec![
                    ("f", vector(&[(1, 1), (1, 2), (0, 1), (1, 4), (3, 5)])),
                    ("g", vector(&[(0, 1), (1, 1), (1, 2), (2, 3), (1, 5)])),
                ],
            ),
            "3on3" => named(
                3,
                vec![
                    ("f", vector(&[(1, 1), (0, 1), (1, 2)])),
                    ("g", vector(&[(0, 1), (1, 2), (1, 1)])),
                    ("h", vector(&[(1, 2), (1, 1), (0, 1)])),
                ],
            ),
            "3on4" => named(
                4,
                vec![
                    ("f", vector(&[(1, 1), (0, 1), (1, 2), (1, 4)])),
                    ("g", vector(&[(0, 1), (1, 2), (1, 1), (2, 3)])),
                    ("h", vector(&[(1, 2), (1, 1), (0, 1), (1, 3)])),
                ],
            ),
            "3on5" => named(
                5,
                vec![
                    ("f", vector(&[(1, 1), (0, 1), (1, 2), (1, 4), (3, 5)])),
                    ("g", vector(&[(0, 1), (1, 2), (1, 1), (2, 3), (1, 5)])),
                    ("h", vector(&[(1, 2), (1, 1), (0, 1), (1, 3), (4, 5)])),
                ],
            ),
            _ => return Err(Error::InvalidFamily(format!("unknown preset `{name}`"))),
        };
        Ok(FamilySpec::custom(k))
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            Family::Single | Family::Custom => {
                if self.gambles.is_none() {
                    return Err(Error::InvalidFamily(format!("family `{}` needs explicit gambles", self.family)));
                }
            }
            _ => {
                if self.omega_size < 2 {
                    return Err(Error::SpaceTooSmall { min: 2, found: self.omega_size });
                }
                if self.omega_size > 20 {
                    return Err(Error::InvalidFamily(format!("|Ω| = {} is too large", self.omega_size)));
                }
                if self.family == Family::ValuesBased && self.k < 1 {
                    return Err(Error::InvalidFamily("values-based family needs k >= 1".into()));
                }
            }
        }
        Ok(())
    }

    /// Row label, e.g. `lu |Ω|=4` or `vb |Ω|=3 k=2`.
    pub fn label(&self) -> String {
        match self.family {
            Family::ValuesBased => format!("vb |Ω|={} k={}", self.omega_size, self.k),
            _ => format!("{} |Ω|={}", self.family, self.omega_size),
        }
    }
}

fn event_items(space: &PossibilitySpace, events: &[Event]) -> Result<Vec<(String, Gamble)>> {
    events.iter().map(|e| Ok((format!("I_{}", e.label(space)), indicator(e, space)?))).collect()
}

/// Deterministic gamble set for a family.
pub fn family_gambles(spec: &FamilySpec) -> Result<GambleSet> {
    spec.validate()?;
    let n = spec.omega_size;
    let space = PossibilitySpace::letters(n);
    let singletons: Vec<Event> = (0..n).map(Event::singleton).collect();
    let complements: Vec<Event> = (0..n).map(|i| Event((0..n).filter(|&j| j != i).collect())).collect();
    let dedup = |items: Vec<(String, Gamble)>| {
        let mut seen = std::collections::HashSet::new();
        items.into_iter().filter(|(_, g)| seen.insert(g.clone())).collect::<Vec<_>>()
    };
    let items = match spec.family {
        Family::Single | Family::Custom => return Ok(spec.gambles.clone().expect("validated")),
        Family::Lmass => event_items(&space, &singletons)?,
        Family::Umass => dedup(event_items(&space, &complements)?),
        Family::Lumass => {
            let mut all = singletons.clone();
            all.extend(complements);
            dedup(event_items(&space, &all)?)
        }
        Family::Pset => {
            let mut events: Vec<Event> =
                (1u64..(1 << n) - 1).map(|m| Event((0..n).filter(|i| m & (1 << i) != 0).collect())).collect();
            events.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.0.iter().cmp(b.0.iter())));
            event_items(&space, &events)?
        }
        Family::ValuesBased => {
            let k = spec.k;
            let total = (k + 1)
                .checked_pow(n as u32)
                .filter(|&t| t <= 5_000_000)
                .ok_or_else(|| Error::InvalidFamily(format!("values-based family with |Ω|={n}, k={k} is too large")))?;
            let mut items = Vec::new();
            for code in 0..total {
                let mut c = code;
                let mut digits = vec![0usize; n];
                for d in digits.iter_mut().rev() {
                    *d = c % (k + 1);
                    c /= k + 1;
                }
                if digits.iter().min() == Some(&0) && digits.iter().max() == Some(&k) {
                    let g = Gamble(digits.iter().map(|&l| r(l as i64, k as i64)).collect());
                    items.push((format!("g{}", items.len() + 1), g));
                }
            }
            items
        }
    };
    GambleSet::new(space, items)
}

/// Resource limits for one pipeline run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Budget {
    pub max_vertices: Option<usize>,
    /// Cap on intermediate double-description rays.
    pub max_intermediate: Option<usize>,
    pub time_limit: Option<Duration>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineOptions {
    /// Add missing singleton indicators and project them out afterwards.
    pub augment: bool,
    /// Stop after the irredundant constraints when false.
    pub enumerate: bool,
    pub budget: Budget,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { augment: true, enumerate: true, budget: Budget::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineSummary {
    pub gambles: GambleSet,
    /// Constraint emissions before deduplication, in the augmented space.
    pub raw_generated: usize,
    /// Distinct generated constraints, in the augmented space.
    pub generated: usize,
    /// Irredundant constraints over the original gambles.
    pub hrep: HRep,
    pub vertices: Option<VRep>,
    pub adjacency: Option<AdjacencyGraph>,
    /// Why enumeration did not finish, if it did not.
    pub skipped: Option<String>,
    pub timings: Vec<(&'static str, Duration)>,
}

impl PipelineSummary {
    /// `#λ`.
    pub fn irredundant(&self) -> usize {
        self.hrep.len()
    }

    /// `#P`, when enumerated.
    pub fn vertex_count(&self) -> Option<usize> {
        self.vertices.as_ref().map(VRep::len)
    }
}

fn check_time(start: Instant, budget: &Budget, stage: &str) -> Result<()> {
    match budget.time_limit {
        Some(limit) if start.elapsed() > limit => {
            Err(Error::BudgetExceeded(format!("time limit of {}s reached after {stage}", limit.as_secs_f64())))
        }
        _ => Ok(()),
    }
}

/// Runs the full pipeline on a gamble set in `L`.
///
/// Budget overruns during vertex enumeration are reported in
/// [`PipelineSummary::skipped`]; overruns before that are errors.
pub fn run_pipeline(k: &GambleSet, opts: &PipelineOptions) -> Result<PipelineSummary> {
    let start = Instant::now();
    let mut timings = Vec::new();
    let mut lap = Instant::now();
    let mut tick = |name: &'static str, timings: &mut Vec<(&'static str, Duration)>| {
        timings.push((name, lap.elapsed()));
        lap = Instant::now();
    };
    k.require_l()?;
    let (ambient, added) = if opts.augment { augment_with_indicators(k)? } else { (k.clone(), Vec::new()) };
    tick("augment", &mut timings);

    let cs = generate_constraints(&ambient)?;
    tick("generate", &mut timings);
    check_time(start, &opts.budget, "generation")?;

    let reduced = remove_redundant(&cs.to_hrep())?;
    tick("reduce", &mut timings);
    check_time(start, &opts.budget, "redundancy removal")?;

    let hrep = if added.is_empty() {
        reduced
    } else {
        let keep: Vec<usize> = (0..k.len()).collect();
        let projected = fm_project(&reduced, &keep)?;
        tick("project", &mut timings);
        check_time(start, &opts.budget, "projection")?;
        remove_redundant(&projected)?
    };
    let hrep = hrep.with_names(k.names().to_vec())?;

    let mut summary = PipelineSummary {
        gambles: k.clone(),
        raw_generated: cs.raw_count,
        generated: cs.len(),
        hrep,
        vertices: None,
        adjacency: None,
        skipped: None,
        timings,
    };
    if !opts.enumerate {
        return Ok(summary);
    }

    let dd = DdOptions {
        max_rays: opts.budget.max_intermediate,
        deadline: opts.budget.time_limit.map(|t| start + t),
        order: None,
    };
    let mut lap = Instant::now();
    match enumerate_vertices_with(&summary.hrep, &dd) {
        Ok((v, inc)) => {
            if let Some(max) = opts.budget.max_vertices {
                if v.len() > max {
                    summary.skipped = Some(format!("{} vertices exceed the limit of {max}", v.len()));
                    return Ok(summary);
                }
            }
            summary.timings.push(("enumerate", lap.elapsed()));
            lap = Instant::now();
            let adj = adjacency(&summary.hrep, &v, &inc)?;
            summary.timings.push(("adjacency", lap.elapsed()));
            summary.vertices = Some(v.with_names(k.names().to_vec())?);
            summary.adjacency = Some(adj);
        }
        Err(Error::BudgetExceeded(msg)) => summary.skipped = Some(msg),
        Err(e) => return Err(e),
    }
    Ok(summary)
}

/// Checks that for every singleton indicator `I_w` in the gamble set, the
/// degenerate prevision at `w` is the only vertex nonzero on `I_w`.
pub fn check_singleton_vertices(summary: &PipelineSummary) -> std::result::Result<(), String> {
    let Some(v) = &summary.vertices else {
        return Err("vertices were not enumerated".into());
    };
    let k = &summary.gambles;
    for w in 0..k.space().len() {
        let Ok(ind) = indicator(&Event::singleton(w), k.space()) else { continue };
        let Some(col) = k.position_of(&ind) else { continue };
        let nonzero: Vec<&Vec<Rational>> = v.vertices().iter().filter(|x| !x[col].is_zero()).collect();
        let degenerate = k.degenerate(w);
        if nonzero.len() != 1 || nonzero[0].as_slice() != degenerate.values() {
            return Err(format!(
                "{} vertices are nonzero on {}, expected only the degenerate prevision",
                nonzero.len(),
                k.names()[col]
            ));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowStatus {
    Done,
    /// Constraints were computed but vertex enumeration was not.
    VerticesSkipped(String),
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub spec: FamilySpec,
    pub gamble_count: usize,
    pub raw_generated: Option<usize>,
    pub irredundant: Option<usize>,
    pub vertices: Option<usize>,
    pub status: RowStatus,
}

impl TableRow {
    /// Tab-separated: label, |K|, raw, #λ, #P, status.
    pub fn to_line(&self) -> String {
        let opt = |x: Option<usize>| x.map_or("-".to_string(), |v| v.to_string());
        let status = match &self.status {
            RowStatus::Done => "ok".to_string(),
            RowStatus::VerticesSkipped(m) => format!("vertices skipped: {m}"),
            RowStatus::Skipped(m) => format!("skipped: {m}"),
        };
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.spec.label(),
            self.gamble_count,
            opt(self.raw_generated),
            opt(self.irredundant),
            opt(self.vertices),
            status
        )
    }
}

pub const TABLE_HEADER: &str = "family\t|K|\traw\t#lambda\t#P\tstatus";

/// One row per spec; rows over budget are marked, never truncated.
pub fn reproduce_table(specs: &[FamilySpec], opts: &PipelineOptions) -> Vec<TableRow> {
    specs
        .iter()
        .map(|spec| {
            let gambles = family_gambles(spec);
            let gamble_count = gambles.as_ref().map_or(0, GambleSet::len);
            let outcome = gambles.and_then(|k| run_pipeline(&k, opts));
            match outcome {
                Ok(s) => TableRow {
                    spec: spec.clone(),
                    gamble_count,
                    raw_generated: Some(s.raw_generated),
                    irredundant: Some(s.irredundant()),
                    vertices: s.vertex_count(),
                    status: match (&s.skipped, opts.enumerate) {
                        (Some(m), _) => RowStatus::VerticesSkipped(m.clone()),
                        (None, false) => RowStatus::VerticesSkipped("not requested".into()),
                        (None, true) => RowStatus::Done,
                    },
                },
                Err(e) => TableRow {
                    spec: spec.clone(),
                    gamble_count,
                    raw_generated: None,
                    irredundant: None,
                    vertices: None,
                    status: RowStatus::Skipped(e.to_string()),
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(k: &GambleSet) -> (usize, usize) {
        let s = run_pipeline(k, &PipelineOptions::default()).unwrap();
        check_singleton_vertices(&s).unwrap();
        (s.irredundant(), s.vertex_count().unwrap())
    }

    fn fam(f: Family, n: usize) -> GambleSet {
        family_gambles(&FamilySpec::new(f, n, 0).unwrap()).unwrap()
    }

    #[test]
    fn family_sizes() {
        assert_eq!(fam(Family::Pset, 3).len(), 6);
        assert_eq!(fam(Family::Lumass, 2).len(), 2);
        assert_eq!(fam(Family::Umass, 2).len(), 2);
        assert_eq!(fam(Family::Lumass, 4).len(), 8);
        let vb = family_gambles(&FamilySpec::new(Family::ValuesBased, 3, 2).unwrap()).unwrap();
        assert_eq!(vb.len(), 12);
        assert!(FamilySpec::new(Family::ValuesBased, 3, 0).is_err());
        assert!(FamilySpec::new(Family::Pset, 1, 0).is_err());
    }

    #[test]
    fn pset_names_ordered() {
        assert_eq!(fam(Family::Pset, 3).names(), &["I_a", "I_b", "I_c", "I_ab", "I_ac", "I_bc"]);
    }

    #[test]
    fn small_presets() {
        let p = |n: &str| FamilySpec::preset(n).unwrap().gambles.unwrap();
        assert_eq!(counts(&p("1on3")), (2, 2));
        assert_eq!(counts(&p("1on3_lu")), (3, 3));
        assert_eq!(counts(&p("2on3")), (4, 4));
        assert_eq!(counts(&p("toy")), (4, 4));
        assert_eq!(counts(&p("3on3")), (7, 7));
    }

    #[test]
    fn lu_and_pset_agree_on_three() {
        let (lu, ps) = (fam(Family::Lumass, 3), fam(Family::Pset, 3));
        let a = run_pipeline(&lu, &PipelineOptions::default()).unwrap();
        let b = run_pipeline(&ps, &PipelineOptions::default()).unwrap();
        // Column j of `b` holds the gamble at column perm[j] of `a`.
        let perm: Vec<usize> = ps.gambles().iter().map(|g| lu.position_of(g).unwrap()).collect();
        let permute = |x: &[Rational]| perm.iter().map(|&i| x[i].clone()).collect::<Vec<_>>();
        let mut rows_a: Vec<_> = a.hrep.rows().map(|(c, r)| (permute(c), r.clone())).collect();
        rows_a.sort();
        assert_eq!(rows_a, b.hrep.sorted_rows());
        let mut va: Vec<_> = a.vertices.unwrap().vertices().iter().map(|v| permute(v)).collect();
        va.sort();
        assert_eq!(va, b.vertices.unwrap().sorted());
    }

    #[test]
    fn lmass_is_simplex() {
        for n in 2..=4 {
            assert_eq!(counts(&fam(Family::Lmass, n)), (n + 1, n + 1));
        }
    }

    #[test]
    fn vertex_budget_marks_row() {
        let spec = FamilySpec::new(Family::Pset, 3, 0).unwrap();
        let opts =
            PipelineOptions { budget: Budget { max_vertices: Some(3), ..Budget::default() }, ..Default::default() };
        let rows = reproduce_table(&[spec], &opts);
        assert_eq!(rows[0].irredundant, Some(9));
        assert!(matches!(rows[0].status, RowStatus::VerticesSkipped(_)));
        assert_eq!(rows[0].vertices, None);
    }
}
