//! Redundancy removal.
//!
//! Full-dimensional systems are reduced with Clarkson's scheme: every
//! candidate row is tested by an LP over the facets found so far; a
//! candidate that survives yields a witness point outside the polytope, and
//! shooting a ray from a strictly interior point towards the witness hits a
//! new facet first. Systems with implicit equalities are first restricted to
//! their affine hull.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{canonical_row, HRep};
use crate::error::{Error, Result};
use crate::ratlinalg::lp::{optimize, FeasibleDictionary, LpOutcome, Sense, Solution};
use crate::ratlinalg::{dot, solve_affine, Rational};

const BATCH: usize = 32;

/// Outcome of [`remove_redundant_with`].
#[derive(Debug, Clone)]
pub struct Irredundant {
    /// The minimal system: irredundant inequalities plus one `<=`/`>=` pair
    /// per independent implicit equality, in input order.
    pub hrep: HRep,
    /// Input indices of the irredundant inequalities.
    pub inequalities: Vec<usize>,
    /// Input indices of the rows retained as equalities.
    pub equalities: Vec<usize>,
}

impl Irredundant {
    pub fn is_full_dimensional(&self) -> bool {
        self.equalities.is_empty()
    }
}

pub fn remove_redundant(h: &HRep) -> Result<HRep> {
    Ok(remove_redundant_with(h)?.hrep)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Unknown,
    Redundant,
    Facet,
}

type Row = (Vec<Rational>, Rational);

pub fn remove_redundant_with(h: &HRep) -> Result<Irredundant> {
    let dim = h.dim();
    // Canonical, nontrivial, deduplicated rows with their input index.
    let mut seen = HashSet::new();
    let mut rows: Vec<Row> = Vec::new();
    let mut origin: Vec<usize> = Vec::new();
    for (i, (a, b)) in h.rows().enumerate() {
        let (a, b) = canonical_row(a, b);
        if a.iter().all(Rational::is_zero) {
            if b.is_negative() {
                return Err(Error::Infeasible);
            }
            continue;
        }
        if seen.insert((a.clone(), b.clone())) {
            rows.push((a, b));
            origin.push(i);
        }
    }
    let (ineq, eq) = reduce_rows(dim, &rows)?;
    let mut out: Vec<(usize, Vec<Row>)> = Vec::new();
    for &k in &ineq {
        out.push((origin[k], vec![rows[k].clone()]));
    }
    for &k in &eq {
        let (a, b) = &rows[k];
        let neg = (a.iter().map(|x| -x).collect(), -b);
        out.push((origin[k], vec![(a.clone(), b.clone()), neg]));
    }
    out.sort_by_key(|(i, _)| *i);
    let mut hrep = HRep::empty(dim).with_names(h.names().to_vec())?;
    for (_, group) in &out {
        for (a, b) in group {
            hrep.push(a.clone(), b.clone())?;
        }
    }
    let mut inequalities: Vec<usize> = ineq.iter().map(|&k| origin[k]).collect();
    let mut equalities: Vec<usize> = eq.iter().map(|&k| origin[k]).collect();
    inequalities.sort_unstable();
    equalities.sort_unstable();
    Ok(Irredundant { hrep, inequalities, equalities })
}

/// Returns (irredundant inequality rows, independent equality rows) as
/// indices into `rows`, which must be canonical and duplicate-free.
fn reduce_rows(dim: usize, rows: &[Row]) -> Result<(Vec<usize>, Vec<usize>)> {
    if rows.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    let (t, z) = interior_point(dim, rows).ok_or(Error::Infeasible)?;
    if t.is_negative() {
        return Err(Error::Infeasible);
    }
    if t.is_positive() {
        return Ok((clarkson(dim, rows, &z), Vec::new()));
    }

    let eq_rows = implicit_equalities(dim, rows, &z);
    // Independent subset of the equalities, greedily in index order.
    let mut basis: Vec<usize> = Vec::new();
    let mut basis_vecs: Vec<Vec<Rational>> = Vec::new();
    for &k in &eq_rows {
        basis_vecs.push(rows[k].0.clone());
        if crate::ratlinalg::is_independent(&basis_vecs) {
            basis.push(k);
        } else {
            basis_vecs.pop();
        }
    }
    // Parametrize the affine hull as x = x0 + N y.
    let columns: Vec<Vec<Rational>> = (0..dim).map(|j| basis.iter().map(|&k| rows[k].0[j].clone()).collect()).collect();
    let target: Vec<Rational> = basis.iter().map(|&k| rows[k].1.clone()).collect();
    let (x0, null) = solve_affine(&columns, &target)?
        .ok_or_else(|| Error::Inconsistent("implicit equalities are inconsistent".into()))?;
    if null.is_empty() {
        return Ok((Vec::new(), basis));
    }
    let eq_set: HashSet<usize> = eq_rows.iter().copied().collect();
    let mut seen = HashSet::new();
    let mut reduced: Vec<Row> = Vec::new();
    let mut back: Vec<usize> = Vec::new();
    for (k, (a, b)) in rows.iter().enumerate() {
        if eq_set.contains(&k) {
            continue;
        }
        let ay: Vec<Rational> = null.iter().map(|n| dot(a, n)).collect();
        let by = b - dot(a, &x0);
        let (ay, by) = canonical_row(&ay, &by);
        if ay.iter().all(Rational::is_zero) {
            continue;
        }
        if seen.insert((ay.clone(), by.clone())) {
            reduced.push((ay, by));
            back.push(k);
        }
    }
    if reduced.is_empty() {
        return Ok((Vec::new(), basis));
    }
    let (t, zy) = interior_point(null.len(), &reduced).ok_or(Error::Infeasible)?;
    if !t.is_positive() {
        return Err(Error::Inconsistent("affine hull restriction is not full-dimensional".into()));
    }
    let kept = clarkson(null.len(), &reduced, &zy);
    Ok((kept.into_iter().map(|k| back[k]).collect(), basis))
}

/// Maximizes `t` subject to `a x + t <= b`, `t <= 1`. Returns `(t*, x*)`.
fn interior_point(dim: usize, rows: &[Row]) -> Option<(Rational, Vec<Rational>)> {
    let mut ext: Vec<Row> = rows
        .iter()
        .map(|(a, b)| {
            let mut a = a.clone();
            a.push(Rational::one());
            (a, b.clone())
        })
        .collect();
    let mut cap = vec![Rational::zero(); dim + 1];
    cap[dim] = Rational::one();
    ext.push((cap.clone(), Rational::one()));
    match optimize(dim + 1, ext.iter().map(|(a, b)| (a.as_slice(), b)), &cap, Sense::Max) {
        LpOutcome::Optimal { value, mut point } => {
            point.pop();
            Some((value, point))
        }
        _ => None,
    }
}

/// Rows tight everywhere on the (nonempty) polyhedron.
fn implicit_equalities(dim: usize, rows: &[Row], start: &[Rational]) -> Vec<usize> {
    let mut strict = vec![false; rows.len()];
    let mark = |strict: &mut Vec<bool>, x: &[Rational]| {
        for (k, (a, b)) in rows.iter().enumerate() {
            if dot(a, x) < *b {
                strict[k] = true;
            }
        }
    };
    mark(&mut strict, start);
    let mut eq = Vec::new();
    for k in 0..rows.len() {
        if strict[k] {
            continue;
        }
        let out = optimize(dim, rows.iter().map(|(a, b)| (a.as_slice(), b)), &rows[k].0, Sense::Min);
        match out {
            LpOutcome::Optimal { value, point } => {
                if value == rows[k].1 {
                    eq.push(k);
                } else {
                    mark(&mut strict, &point);
                }
            }
            // Unbounded below: certainly not an equality.
            _ => strict[k] = true,
        }
    }
    eq
}

enum Probe {
    Redundant,
    Witness(Vec<Rational>),
}

fn clarkson(dim: usize, rows: &[Row], interior: &[Rational]) -> Vec<usize> {
    let m = rows.len();
    let slack: Vec<Rational> = rows.iter().map(|(a, b)| b - dot(a, interior)).collect();
    let mut status = vec![Status::Unknown; m];
    let mut facets: Vec<usize> = Vec::new();
    let mut queue: std::collections::VecDeque<usize> = (0..m).collect();
    while !queue.is_empty() {
        let mut batch = Vec::with_capacity(BATCH);
        while batch.len() < BATCH {
            match queue.pop_front() {
                Some(i) if status[i] == Status::Unknown => batch.push(i),
                Some(_) => {}
                None => break,
            }
        }
        if batch.is_empty() {
            break;
        }
        let base = FeasibleDictionary::new(dim, facets.iter().map(|&j| (rows[j].0.as_slice(), &rows[j].1)))
            .expect("facet subsystem contains the interior point");
        let chunk = batch.len().div_ceil(rayon::current_num_threads()).max(1);
        let probes: Vec<Probe> = batch
            .par_chunks(chunk)
            .flat_map_iter(|part| {
                let mut dict = base.clone();
                part.iter().map(|&i| probe(&mut dict, &rows[i])).collect::<Vec<_>>()
            })
            .collect();
        let mut retry = Vec::new();
        for (&i, p) in batch.iter().zip(probes) {
            match p {
                Probe::Redundant => status[i] = Status::Redundant,
                Probe::Witness(w) => {
                    if status[i] != Status::Unknown {
                        continue;
                    }
                    let j = ray_shoot(rows, &status, interior, &slack, &w, i as u64);
                    if status[j] == Status::Unknown {
                        status[j] = Status::Facet;
                        facets.push(j);
                    }
                    if status[i] == Status::Unknown {
                        retry.push(i);
                    }
                }
            }
        }
        for i in retry.into_iter().rev() {
            queue.push_front(i);
        }
    }
    let mut out: Vec<usize> = (0..m).filter(|&i| status[i] == Status::Facet).collect();
    out.sort_unstable();
    out
}

fn probe(dict: &mut FeasibleDictionary, (a, b): &Row) -> Probe {
    match dict.maximize_warm(a) {
        Solution::Optimal { value, point } => {
            if value <= *b {
                Probe::Redundant
            } else {
                Probe::Witness(point)
            }
        }
        Solution::Unbounded { point, direction } => {
            let rate = dot(a, &direction);
            let gap = b - dot(a, &point);
            let mut t = &gap / &rate;
            if t.is_negative() {
                t = Rational::zero();
            }
            t += Rational::one();
            Probe::Witness(point.iter().zip(&direction).map(|(p, d)| t.mul_add(d, p)).collect())
        }
    }
}

/// Index of the unique non-redundant row first hit on the segment from an
/// interior point towards `target`. Ties are broken by perturbing the
/// interior point.
fn ray_shoot(
    rows: &[Row],
    status: &[Status],
    interior: &[Rational],
    slack: &[Rational],
    target: &[Rational],
    seed: u64,
) -> usize {
    if let Some(j) = first_hit(rows, status, interior, slack, target) {
        return j;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = interior.len();
    loop {
        let u: Vec<Rational> = (0..dim).map(|_| Rational::from_integer(rng.gen_range(-8..=8))).collect();
        let mut delta = Rational::new(1, 64);
        let half = Rational::new(1, 2);
        let (z, s) = loop {
            let z: Vec<Rational> = interior.iter().zip(&u).map(|(x, d)| delta.mul_add(d, x)).collect();
            let s: Vec<Rational> = rows.iter().map(|(a, b)| b - dot(a, &z)).collect();
            let inside = s.iter().zip(status).all(|(v, st)| *st == Status::Redundant || v.is_positive());
            if inside {
                break (z, s);
            }
            delta = &delta * &half;
        };
        if let Some(j) = first_hit(rows, status, &z, &s, target) {
            return j;
        }
    }
}

fn first_hit(
    rows: &[Row],
    status: &[Status],
    from: &[Rational],
    slack: &[Rational],
    target: &[Rational],
) -> Option<usize> {
    let dir: Vec<Rational> = target.iter().zip(from).map(|(t, z)| t - z).collect();
    let mut best: Option<(Rational, usize)> = None;
    let mut tie = false;
    for (j, (a, _)) in rows.iter().enumerate() {
        if status[j] == Status::Redundant {
            continue;
        }
        let rate = dot(a, &dir);
        if !rate.is_positive() {
            continue;
        }
        let t = &slack[j] / &rate;
        match &best {
            Some((bt, _)) if t > *bt => {}
            Some((bt, _)) if t == *bt => tie = true,
            _ => {
                best = Some((t, j));
                tie = false;
            }
        }
    }
    match best {
        Some((_, j)) if !tie => Some(j),
        _ => None,
    }
}
