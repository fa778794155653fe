//! Command-line interface.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::catalog::{
    family_gambles, reproduce_table, run_pipeline, Budget, Family, FamilySpec, PipelineOptions, PipelineSummary,
    TABLE_HEADER,
};
use crate::coherence::{check_against, check_direct, generate_constraints, ConstraintSet, DirectVerdict, Verdict};
use crate::credal::{check_direct_augmented, credal_vertices, is_lower_envelope, natural_extension};
use crate::error::{Error, Result};
use crate::gambles::{augment_with_indicators, AffineRecord, Gamble, GambleSet, LowerPrevision};
use crate::io;
use crate::polytope::{adjacency, enumerate_vertices_with, fm_project, remove_redundant, DdOptions, HRep, VRep};
use crate::ratlinalg::Rational;

#[derive(Parser, Debug)]
#[command(name = "lprev", version, about = "Exact polytopes of coherent lower previsions")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate the coherence constraints of a gamble set.
    Gen(GenArgs),
    /// Remove redundant rows from an H-representation.
    Reduce(ReduceArgs),
    /// Project an H-representation onto some of its coordinates.
    Project(ProjectArgs),
    /// Enumerate vertices and their adjacency.
    Vertices(VerticesArgs),
    /// Check coherence of a lower prevision.
    Check(CheckArgs),
    /// Vertices of the credal set of a lower prevision.
    Credal(CredalArgs),
    /// Natural extension of a lower prevision to further gambles.
    Extend(ExtendArgs),
    /// Full pipeline: constraints, projection, vertices, adjacency.
    Pipeline(PipelineArgs),
    /// Count table over a range of family sizes.
    Table(TableArgs),
    /// Credal-set vertex coordinates of every extreme lower prevision.
    Plotdata(PlotArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_name = "FILE")]
    pub gambles: PathBuf,
    /// Input already contains every singleton indicator.
    #[arg(long)]
    pub no_augment: bool,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Also write where each constraint came from.
    #[arg(long, value_name = "FILE")]
    pub provenance: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ProjectArgs {
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    /// Coordinates to keep, by name or 1-based position.
    #[arg(long, value_delimiter = ',', required = true)]
    pub keep: Vec<String>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct BudgetArgs {
    /// Give up when there are more vertices than this.
    #[arg(long, value_name = "N")]
    pub max_vertices: Option<usize>,
    /// Cap on intermediate rays during enumeration.
    #[arg(long, value_name = "N")]
    pub max_intermediate: Option<usize>,
    #[arg(long, value_name = "SECONDS")]
    pub time_limit: Option<f64>,
}

impl BudgetArgs {
    fn budget(&self) -> Result<Budget> {
        let time_limit = match self.time_limit {
            Some(s) if !(s.is_finite() && s > 0.0) => {
                return Err(Error::InvalidFamily(format!("time limit must be positive, got {s}")))
            }
            Some(s) => Some(Duration::from_secs_f64(s)),
            None => None,
        };
        Ok(Budget { max_vertices: self.max_vertices, max_intermediate: self.max_intermediate, time_limit })
    }
}

#[derive(Args, Debug)]
pub struct VerticesArgs {
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Also write the edge list.
    #[arg(long, value_name = "FILE")]
    pub adj: Option<PathBuf>,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long, value_name = "FILE")]
    pub gambles: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub prevision: PathBuf,
    /// Check over subsets directly instead of through generated constraints.
    #[arg(long, conflicts_with = "envelope")]
    pub direct: bool,
    /// Check that the credal set's lower envelope reproduces the prevision.
    #[arg(long)]
    pub envelope: bool,
    /// Input already contains every singleton indicator.
    #[arg(long)]
    pub no_augment: bool,
}

#[derive(Args, Debug)]
pub struct CredalArgs {
    #[arg(long, value_name = "FILE")]
    pub gambles: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub prevision: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExtendArgs {
    #[arg(long, value_name = "FILE")]
    pub gambles: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub prevision: PathBuf,
    /// Target gamble as comma-separated values; repeatable.
    #[arg(long, value_name = "VALUES")]
    pub target: Vec<String>,
    /// Gamble file with named targets over the same space.
    #[arg(long, value_name = "FILE")]
    pub targets: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SourceArgs {
    /// Gamble file.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["preset", "family"])]
    pub gambles: Option<PathBuf>,
    /// Built-in gamble set: toy, 1on3, 1on3_lu, 2on3, 2on4, 2on5, 3on3, 3on4, 3on5.
    #[arg(long, conflicts_with = "family")]
    pub preset: Option<String>,
    /// Family: l, u, lu, pset, vb.
    #[arg(long)]
    pub family: Option<String>,
    /// Size of the possibility space.
    #[arg(long, value_name = "N")]
    pub omega: Option<usize>,
    /// Grid parameter of the vb family.
    #[arg(long, value_name = "K")]
    pub k: Option<usize>,
}

#[derive(Args, Debug)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Input already contains every singleton indicator.
    #[arg(long)]
    pub no_augment: bool,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Print stage timings to stderr.
    #[arg(long)]
    pub timings: bool,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    /// Family: l, u, lu, pset, vb.
    #[arg(long)]
    pub family: String,
    /// First value of the varied parameter (|Ω|, or k for vb).
    #[arg(long)]
    pub from: usize,
    /// Last value of the varied parameter.
    #[arg(long)]
    pub to: usize,
    /// |Ω| for the vb family.
    #[arg(long, default_value_t = 3)]
    pub omega: usize,
    /// Only count constraints.
    #[arg(long)]
    pub no_vertices: bool,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Vertices to use instead of running the pipeline.
    #[arg(long, value_name = "FILE")]
    pub vertices: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

/// Runs the tool; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.unwrap_or(0)).build();
    let outcome = match pool {
        Ok(pool) => pool.install(|| dispatch(&cli.command)),
        Err(e) => Err(Error::Inconsistent(format!("cannot start worker threads: {e}"))),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("lprev: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(cmd: &Command) -> Result<i32> {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::Reduce(a) => reduce(a),
        Command::Project(a) => project(a),
        Command::Vertices(a) => vertices(a),
        Command::Check(a) => check(a),
        Command::Credal(a) => credal(a),
        Command::Extend(a) => extend(a),
        Command::Pipeline(a) => pipeline(a),
        Command::Table(a) => table(a),
        Command::Plotdata(a) => plotdata(a),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => io::write_file(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}

/// Gamble file normalized into `L`, with one affine record per gamble.
fn load_gambles(path: &Path) -> Result<(GambleSet, Vec<AffineRecord>)> {
    let (space, items) = io::read_gambles(path)?;
    if let Some((name, _)) = items.iter().find(|(_, g)| g.is_constant()) {
        return Err(Error::ConstantGamble(name.clone()));
    }
    let n = items.len();
    let (k, records, _) = GambleSet::normalized(space, items)?;
    if k.len() != n {
        let names: Vec<&str> = records.iter().map(|r| r.source.as_str()).collect();
        let dup = names.iter().find(|s| k.index_of(s).is_none()).copied().unwrap_or_default();
        return Err(Error::Inconsistent(format!("gamble `{dup}` coincides with another gamble after normalization")));
    }
    if records.iter().any(|r| !(r.scale.is_one() && r.shift.is_zero())) {
        eprintln!("note: gambles rescaled to minimum 0 and maximum 1");
    }
    Ok((k, records))
}

/// Prevision values for the gambles present in the file, mapped to the
/// normalized gambles. Names of `k` missing from the file get `None`.
fn load_prevision(path: &Path, k: &GambleSet, records: &[AffineRecord]) -> Result<Vec<Option<Rational>>> {
    let given = io::read_prevision(path)?;
    let mut out = vec![None; k.len()];
    for (name, v) in given {
        let i = k.index_of(&name).ok_or_else(|| Error::UnknownGamble(name.clone()))?;
        let rec = records.get(i);
        out[i] = Some(match rec {
            Some(rec) => &(&v - &rec.shift) / &rec.scale,
            None => v,
        });
    }
    Ok(out)
}

fn require_all(k: &GambleSet, vals: Vec<Option<Rational>>) -> Result<LowerPrevision> {
    vals.into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::MissingValue(k.names()[i].clone())))
        .collect::<Result<_>>()
        .map(LowerPrevision)
}

fn gen(a: &GenArgs) -> Result<i32> {
    let (k, _) = load_gambles(&a.gambles)?;
    let ambient = if a.no_augment { k } else { augment_with_indicators(&k)?.0 };
    let cs = generate_constraints(&ambient)?;
    eprintln!("generated {} constraints ({} distinct) on {} gambles", cs.raw_count, cs.len(), ambient.len());
    emit(a.out.as_deref(), &io::format_hrep(&cs.to_hrep()))?;
    if let Some(p) = &a.provenance {
        io::write_file(p, &provenance_text(&cs))?;
    }
    Ok(0)
}

fn provenance_text(cs: &ConstraintSet) -> String {
    cs.constraints
        .iter()
        .zip(&cs.provenance)
        .enumerate()
        .map(|(i, (c, p))| format!("{i} {} {}\n", c.kind.tag(), p.describe(&cs.ambient)))
        .collect()
}

fn reduce(a: &ReduceArgs) -> Result<i32> {
    let h = io::read_hrep(&a.input)?;
    let r = remove_redundant(&h)?;
    eprintln!("kept {} of {} rows", r.len(), h.len());
    emit(a.out.as_deref(), &io::format_hrep(&r))?;
    Ok(0)
}

fn coordinate(h: &HRep, key: &str) -> Result<usize> {
    if let Some(i) = h.names().iter().position(|n| n == key) {
        return Ok(i);
    }
    match key.parse::<usize>() {
        Ok(i) if (1..=h.dim()).contains(&i) => Ok(i - 1),
        _ => Err(Error::UnknownGamble(key.to_string())),
    }
}

fn project(a: &ProjectArgs) -> Result<i32> {
    let h = io::read_hrep(&a.input)?;
    let keep = a.keep.iter().map(|k| coordinate(&h, k.trim())).collect::<Result<Vec<_>>>()?;
    let p = remove_redundant(&fm_project(&h, &keep)?)?;
    eprintln!("projected onto {} coordinates: {} rows", p.dim(), p.len());
    emit(a.out.as_deref(), &io::format_hrep(&p))?;
    Ok(0)
}

fn vertices(a: &VerticesArgs) -> Result<i32> {
    let h = io::read_hrep(&a.input)?;
    let budget = a.budget.budget()?;
    let opts = DdOptions {
        max_rays: budget.max_intermediate,
        deadline: budget.time_limit.map(|t| std::time::Instant::now() + t),
        order: None,
    };
    let (v, inc) = enumerate_vertices_with(&h, &opts)?;
    if let Some(max) = budget.max_vertices {
        if v.len() > max {
            return Err(Error::BudgetExceeded(format!("{} vertices exceed the limit of {max}", v.len())));
        }
    }
    let g = adjacency(&h, &v, &inc)?;
    eprintln!("{} vertices, {} edges", v.len(), g.edges.len());
    emit(a.out.as_deref(), &io::format_vrep(&v.with_names(h.names().to_vec())?))?;
    if let Some(p) = &a.adj {
        io::write_file(p, &io::format_adjacency(&g))?;
    }
    Ok(0)
}

fn check(a: &CheckArgs) -> Result<i32> {
    let (k, records) = load_gambles(&a.gambles)?;
    let vals = load_prevision(&a.prevision, &k, &records)?;
    let p = require_all(&k, vals)?;
    let (coherent, detail) = if a.envelope {
        (is_lower_envelope(&p, &k)?, String::new())
    } else if a.direct {
        if a.no_augment {
            direct_verdict(&k, check_direct(&p, &k)?)
        } else {
            match check_direct_augmented(&p, &k) {
                Ok((aug, v)) => direct_verdict(&aug, v),
                Err(Error::SureLoss) => (false, "incurs sure loss\n".to_string()),
                Err(e) => return Err(e),
            }
        }
    } else if a.no_augment {
        constraint_verdict(&p, &generate_constraints(&k)?)?
    } else {
        let opts = PipelineOptions { enumerate: false, ..Default::default() };
        let s = run_pipeline(&k, &opts)?;
        constraint_verdict(&p, &ConstraintSet::from_hrep(k.clone(), &s.hrep)?)?
    };
    if coherent {
        println!("coherent");
        Ok(0)
    } else {
        print!("incoherent\n{detail}");
        Ok(1)
    }
}

fn constraint_verdict(p: &LowerPrevision, cs: &ConstraintSet) -> Result<(bool, String)> {
    Ok(match check_against(p, cs)? {
        Verdict::Coherent => (true, String::new()),
        Verdict::Violation(v) => {
            let mut text = String::new();
            for vc in v {
                let c = &cs.constraints[vc.index];
                let terms: Vec<String> = c
                    .coeffs
                    .iter()
                    .zip(cs.ambient.names())
                    .filter(|(x, _)| !x.is_zero())
                    .map(|(x, n)| format!("{x}*{n}"))
                    .collect();
                text.push_str(&format!("violated: {} <= {} (excess {})\n", terms.join(" + "), c.rhs, vc.slack));
            }
            (false, text)
        }
    })
}

fn direct_verdict(k: &GambleSet, v: DirectVerdict) -> (bool, String) {
    match v {
        DirectVerdict::Coherent => (true, String::new()),
        DirectVerdict::Violation(w) => (false, format!("witness: {}\n", describe_witness(&w, k))),
    }
}

fn describe_witness(w: &crate::coherence::Witness, k: &GambleSet) -> String {
    use crate::coherence::Witness;
    match w {
        Witness::Negative { gamble } => format!("negative value on {}", k.names()[*gamble]),
        Witness::Combination { subset, lambda, gamma } => {
            let terms: Vec<String> = subset.iter().zip(lambda).map(|(&i, l)| format!("{l}*{}", k.names()[i])).collect();
            format!("{} = {gamma} pointwise but its lower prevision exceeds {gamma}", terms.join(" + "))
        }
    }
}

fn credal(a: &CredalArgs) -> Result<i32> {
    let (k, records) = load_gambles(&a.gambles)?;
    let p = require_all(&k, load_prevision(&a.prevision, &k, &records)?)?;
    let c = credal_vertices(&p, &k)?;
    if c.is_empty() {
        return Err(Error::SureLoss);
    }
    let v = VRep::new(k.space().len(), c.vertices.iter().map(|m| m.probabilities().to_vec()).collect())?
        .with_names(k.space().labels().to_vec())?;
    eprintln!("{} credal-set vertices", v.len());
    emit(a.out.as_deref(), &io::format_vrep(&v))?;
    Ok(0)
}

fn extend(a: &ExtendArgs) -> Result<i32> {
    let (space, items) = io::read_gambles(&a.gambles)?;
    let k = GambleSet::new(space.clone(), items)?;
    let p = require_all(&k, load_prevision(&a.prevision, &k, &[])?)?;
    let mut targets: Vec<(String, Gamble)> = Vec::new();
    for (i, t) in a.target.iter().enumerate() {
        let vals = t
            .split(',')
            .map(|x| {
                x.trim().parse::<Rational>().map_err(|_| Error::parse("--target", i + 1, format!("bad value `{x}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        targets.push((format!("t{}", i + 1), Gamble(vals)));
    }
    if let Some(path) = &a.targets {
        let (tspace, items) = io::read_gambles(path)?;
        if tspace != space {
            return Err(Error::Inconsistent("target file uses a different possibility space".into()));
        }
        targets.extend(items);
    }
    if targets.is_empty() {
        return Err(Error::parse("--target", 0, "no target gambles given"));
    }
    let mut out = String::new();
    for (name, g) in &targets {
        out.push_str(&format!("{name} {}\n", natural_extension(&p, &k, g)?));
    }
    emit(None, &out)?;
    Ok(0)
}

fn source_gambles(s: &SourceArgs) -> Result<(GambleSet, String)> {
    if let Some(path) = &s.gambles {
        let label = path.file_name().unwrap_or(path.as_os_str()).to_string_lossy().into_owned();
        return Ok((load_gambles(path)?.0, label));
    }
    if let Some(name) = &s.preset {
        let spec = FamilySpec::preset(name)?;
        return Ok((family_gambles(&spec)?, name.clone()));
    }
    let Some(fam) = &s.family else {
        return Err(Error::InvalidFamily("give one of --gambles, --preset or --family".into()));
    };
    let family: Family = fam.parse()?;
    let omega = s.omega.ok_or_else(|| Error::InvalidFamily("--family needs --omega".into()))?;
    let spec = FamilySpec::new(family, omega, s.k.unwrap_or(0))?;
    Ok((family_gambles(&spec)?, spec.label()))
}

fn summary_text(label: &str, s: &PipelineSummary) -> String {
    let mut t = format!(
        "source {label}\ngambles {}\nraw {}\ngenerated {}\nirredundant {}\n",
        s.gambles.len(),
        s.raw_generated,
        s.generated,
        s.irredundant()
    );
    match (&s.vertices, &s.adjacency) {
        (Some(v), Some(g)) => t.push_str(&format!("vertices {}\nedges {}\n", v.len(), g.edges.len())),
        _ => t.push_str(&format!("vertices skipped: {}\n", s.skipped.as_deref().unwrap_or("not requested"))),
    }
    t
}

fn pipeline(a: &PipelineArgs) -> Result<i32> {
    let (k, label) = source_gambles(&a.source)?;
    let opts = PipelineOptions { augment: !a.no_augment, enumerate: true, budget: a.budget.budget()? };
    let s = run_pipeline(&k, &opts)?;
    let summary = summary_text(&label, &s);
    if let Some(dir) = &a.out {
        io::write_file(&dir.join("gambles.gmb"), &io::format_gambles(&k))?;
        io::write_file(&dir.join("constraints.hrep"), &io::format_hrep(&s.hrep))?;
        if let (Some(v), Some(g)) = (&s.vertices, &s.adjacency) {
            io::write_file(&dir.join("vertices.vrep"), &io::format_vrep(v))?;
            io::write_file(&dir.join("adjacency.adj"), &io::format_adjacency(g))?;
        }
        io::write_file(&dir.join("summary.txt"), &summary)?;
    }
    for (stage, d) in s.timings.iter().filter(|_| a.timings) {
        eprintln!("{stage}: {:.3}s", d.as_secs_f64());
    }
    emit(None, &summary)?;
    Ok(if s.skipped.is_some() { 1 } else { 0 })
}

fn table(a: &TableArgs) -> Result<i32> {
    let family: Family = a.family.parse()?;
    if a.from > a.to {
        return Err(Error::InvalidFamily(format!("empty range {}..{}", a.from, a.to)));
    }
    let specs = (a.from..=a.to)
        .map(|x| match family {
            Family::ValuesBased => FamilySpec::new(family, a.omega, x),
            _ => FamilySpec::new(family, x, 0),
        })
        .collect::<Result<Vec<_>>>()?;
    let opts = PipelineOptions { augment: true, enumerate: !a.no_vertices, budget: a.budget.budget()? };
    let mut out = format!("{TABLE_HEADER}\n");
    for row in reproduce_table(&specs, &opts) {
        out.push_str(&row.to_line());
        out.push('\n');
    }
    emit(None, &out)?;
    Ok(0)
}

fn plotdata(a: &PlotArgs) -> Result<i32> {
    let (k, _) = source_gambles(&a.source)?;
    let verts: Vec<Vec<Rational>> = match &a.vertices {
        Some(path) => {
            let v = io::read_vrep(path)?;
            if v.dim() != k.len() {
                return Err(Error::DimensionMismatch { expected: k.len(), found: v.dim() });
            }
            v.into_vertices()
        }
        None => {
            let s = run_pipeline(&k, &PipelineOptions::default())?;
            match s.vertices {
                Some(v) => v.into_vertices(),
                None => return Err(Error::BudgetExceeded(s.skipped.unwrap_or_default())),
            }
        }
    };
    let mut out = format!("# vertex point {}\n", k.space().labels().join(" "));
    for (i, x) in verts.iter().enumerate() {
        let c = credal_vertices(&LowerPrevision(x.clone()), &k)?;
        for (j, m) in c.vertices.iter().enumerate() {
            let coords: Vec<String> = m.probabilities().iter().map(ToString::to_string).collect();
            out.push_str(&format!("{i} {j} {}\n", coords.join(" ")));
        }
    }
    emit(a.out.as_deref(), &out)?;
    Ok(0)
}
