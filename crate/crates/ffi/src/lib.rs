//! C interface to `lprev`.
//!
//! Objects are opaque handles created by the parse, builtin and pipeline calls and
//! released with the matching `_free`. Every fallible call returns an
//! [`LprevStatus`]; on failure a message is kept per thread and can be read
//! with [`lprev_last_error`]. Strings returned through `char **` are owned by
//! the caller and must be released with [`lprev_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_double, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use lprev::catalog::{family_gambles, run_pipeline, Family, FamilySpec, PipelineOptions, PipelineSummary};
use lprev::coherence::ConstraintSet;
use lprev::credal::{check_direct_augmented, is_lower_envelope, natural_extension};
use lprev::gambles::{Gamble, GambleSet, LowerPrevision};
use lprev::{io, Error, Rational};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LprevStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Infeasible = 4,
    SureLoss = 5,
    BudgetExceeded = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LprevCheckMode {
    /// Against the generated constraints.
    Constraints = 0,
    /// Over subsets, without generated constraints.
    Direct = 1,
    /// Lower envelope of the credal set.
    Envelope = 2,
}

/// Pipeline settings. Zero means "no limit" for both budgets.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LprevOptions {
    pub augment: bool,
    pub enumerate: bool,
    pub max_vertices: usize,
    pub time_limit_seconds: c_double,
}

/// Opaque set of gambles on a finite possibility space.
pub struct LprevGambles(GambleSet);

/// Opaque result of a pipeline run.
pub struct LprevPolytope(PipelineSummary);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LprevStatus {
    match e {
        Error::Parse { .. } => LprevStatus::Parse,
        Error::Infeasible => LprevStatus::Infeasible,
        Error::SureLoss => LprevStatus::SureLoss,
        Error::BudgetExceeded(_) => LprevStatus::BudgetExceeded,
        Error::Unbounded | Error::Inconsistent(_) | Error::Io { .. } => LprevStatus::Internal,
        _ => LprevStatus::InvalidArgument,
    }
}

struct Fail(LprevStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LprevStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LprevStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            LprevStatus::Internal
        }
    }
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail(LprevStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail(LprevStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn rationals(values: *const *const c_char, n: usize, what: &str) -> Result<Vec<Rational>, Fail> {
    if values.is_null() && n > 0 {
        return Err(Fail(LprevStatus::NullPointer, format!("{what} is null")));
    }
    (0..n)
        .map(|i| {
            let s = text(*values.add(i), what)?;
            s.trim().parse().map_err(|_| Fail(LprevStatus::Parse, format!("{what}[{i}]: bad rational `{s}`")))
        })
        .collect()
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(LprevStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(LprevStatus::NullPointer, "output pointer is null".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(LprevStatus::NullPointer, "output pointer is null".into()));
    }
    *out = CString::new(s).map_err(|_| Fail(LprevStatus::Internal, "interior NUL".into()))?.into_raw();
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lprev_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lprev_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a gamble file (`omega a b c` followed by `name v1 v2 ...` lines).
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lprev_gambles_parse(src: *const c_char, out: *mut *mut LprevGambles) -> LprevStatus {
    guard(|| {
        let (space, items) = io::parse_gambles("<input>", text(src, "src")?)?;
        put(out, LprevGambles(GambleSet::new(space, items)?))
    })
}

/// Built-in gamble set: `toy`, `3on3`, ... or a family name (`l`, `u`, `lu`,
/// `pset`, `vb`) with `omega` and, for `vb`, `k`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lprev_gambles_builtin(
    name: *const c_char,
    omega: usize,
    k: usize,
    out: *mut *mut LprevGambles,
) -> LprevStatus {
    guard(|| {
        let name = text(name, "name")?;
        let spec = match name.parse::<Family>() {
            Ok(f) => FamilySpec::new(f, omega, k)?,
            Err(_) => FamilySpec::preset(name)?,
        };
        put(out, LprevGambles(family_gambles(&spec)?))
    })
}

/// # Safety
/// `g` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lprev_gambles_len(g: *const LprevGambles) -> usize {
    g.as_ref().map_or(0, |g| g.0.len())
}

/// Gambles in file format.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lprev_gambles_format(g: *const LprevGambles, out: *mut *mut c_char) -> LprevStatus {
    guard(|| put_string(out, io::format_gambles(&handle(g, "gambles")?.0)))
}

/// # Safety
/// `g` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lprev_gambles_free(g: *mut LprevGambles) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

#[no_mangle]
pub extern "C" fn lprev_options_default() -> LprevOptions {
    LprevOptions { augment: true, enumerate: true, max_vertices: 0, time_limit_seconds: 0.0 }
}

fn pipeline_options(o: &LprevOptions) -> Result<PipelineOptions, Fail> {
    let mut opts = PipelineOptions { augment: o.augment, enumerate: o.enumerate, ..Default::default() };
    opts.budget.max_vertices = (o.max_vertices > 0).then_some(o.max_vertices);
    if o.time_limit_seconds.is_nan() || o.time_limit_seconds < 0.0 {
        return Err(Fail(LprevStatus::InvalidArgument, "negative time limit".into()));
    }
    if o.time_limit_seconds > 0.0 {
        opts.budget.time_limit = Some(Duration::from_secs_f64(o.time_limit_seconds));
    }
    Ok(opts)
}

/// Runs the full pipeline. `options` may be NULL for the defaults.
///
/// # Safety
/// `g` must be a live handle, `options` NULL or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lprev_pipeline(
    g: *const LprevGambles,
    options: *const LprevOptions,
    out: *mut *mut LprevPolytope,
) -> LprevStatus {
    guard(|| {
        let k = &handle(g, "gambles")?.0;
        let o = options.as_ref().copied().unwrap_or_else(|| lprev_options_default());
        put(out, LprevPolytope(run_pipeline(k, &pipeline_options(&o)?)?))
    })
}

/// # Safety
/// `p` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lprev_polytope_free(p: *mut LprevPolytope) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of irredundant constraints.
///
/// # Safety
/// `p` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lprev_polytope_constraint_count(p: *const LprevPolytope) -> usize {
    p.as_ref().map_or(0, |p| p.0.irredundant())
}

/// Number of vertices, or `SIZE_MAX` when they were not enumerated.
///
/// # Safety
/// `p` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lprev_polytope_vertex_count(p: *const LprevPolytope) -> usize {
    p.as_ref().and_then(|p| p.0.vertex_count()).unwrap_or(usize::MAX)
}

/// Number of edges, or `SIZE_MAX` when vertices were not enumerated.
///
/// # Safety
/// `p` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lprev_polytope_edge_count(p: *const LprevPolytope) -> usize {
    p.as_ref().and_then(|p| p.0.adjacency.as_ref()).map_or(usize::MAX, |g| g.edges.len())
}

/// Constraints in H-representation text format.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lprev_polytope_hrep(p: *const LprevPolytope, out: *mut *mut c_char) -> LprevStatus {
    guard(|| put_string(out, io::format_hrep(&handle(p, "polytope")?.0.hrep)))
}

/// Vertices in V-representation text format.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lprev_polytope_vrep(p: *const LprevPolytope, out: *mut *mut c_char) -> LprevStatus {
    guard(|| {
        let s = &handle(p, "polytope")?.0;
        let v = s.vertices.as_ref().ok_or_else(|| {
            Fail(LprevStatus::BudgetExceeded, s.skipped.clone().unwrap_or_else(|| "vertices not enumerated".into()))
        })?;
        put_string(out, io::format_vrep(v))
    })
}

/// Edge list, one `u v` pair per line.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lprev_polytope_adjacency(p: *const LprevPolytope, out: *mut *mut c_char) -> LprevStatus {
    guard(|| {
        let s = &handle(p, "polytope")?.0;
        let g = s.adjacency.as_ref().ok_or_else(|| {
            Fail(LprevStatus::BudgetExceeded, s.skipped.clone().unwrap_or_else(|| "vertices not enumerated".into()))
        })?;
        put_string(out, io::format_adjacency(g))
    })
}

unsafe fn prevision(k: &GambleSet, values: *const *const c_char, n: usize) -> Result<LowerPrevision, Fail> {
    let p = LowerPrevision(rationals(values, n, "values")?);
    p.check_len(k)?;
    Ok(p)
}

/// Coherence of the lower prevision given as `n` rational strings (`"p/q"`
/// or `"p"`) in gamble order. Writes 1 or 0 to `coherent`. A lower
/// prevision incurring sure loss is reported as incoherent, not as an error.
///
/// # Safety
/// `g` must be a live handle, `values` must hold `n` NUL-terminated strings,
/// `coherent` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lprev_check(
    g: *const LprevGambles,
    values: *const *const c_char,
    n: usize,
    mode: LprevCheckMode,
    coherent: *mut bool,
) -> LprevStatus {
    guard(|| {
        let k = &handle(g, "gambles")?.0;
        let p = prevision(k, values, n)?;
        if coherent.is_null() {
            return Err(Fail(LprevStatus::NullPointer, "coherent is null".into()));
        }
        let verdict = match mode {
            LprevCheckMode::Envelope => is_lower_envelope(&p, k)?,
            LprevCheckMode::Direct => match check_direct_augmented(&p, k) {
                Ok((_, v)) => v.is_coherent(),
                Err(Error::SureLoss) => false,
                Err(e) => return Err(e.into()),
            },
            LprevCheckMode::Constraints => {
                let opts = PipelineOptions { enumerate: false, ..Default::default() };
                let cs = ConstraintSet::from_hrep(k.clone(), &run_pipeline(k, &opts)?.hrep)?;
                lprev::coherence::check_against(&p, &cs)?.is_coherent()
            }
        };
        *coherent = verdict;
        Ok(())
    })
}

/// Natural extension of the lower prevision to the gamble `target` (one
/// rational string per element of the possibility space). The result is
/// written as a rational string.
///
/// # Safety
/// `g` must be a live handle; `values` and `target` must hold `n` and `m`
/// NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lprev_natural_extension(
    g: *const LprevGambles,
    values: *const *const c_char,
    n: usize,
    target: *const *const c_char,
    m: usize,
    out: *mut *mut c_char,
) -> LprevStatus {
    guard(|| {
        let k = &handle(g, "gambles")?.0;
        let p = prevision(k, values, n)?;
        let f = Gamble(rationals(target, m, "target")?);
        put_string(out, natural_extension(&p, k, &f)?.to_string())
    })
}
