//! Text formats.
//!
//! * `.gmb`: an `omega <label>...` line, then one `<name> <value>...` line
//!   per gamble.
//! * `.lpv`: `<gamble name> <value>` per line.
//! * `.hrep`: `H <m> <d>`, then `<rhs> <c_1> ... <c_d>` per row, meaning
//!   `<c, x> <= rhs`.
//! * `.vrep`: `V <n> <d>`, then one coordinate row per vertex.
//! * `.adj`: `u v` per edge, 0-based, `u < v`.
//!
//! Values are rationals written `p/q` or `p`. Lines starting with `#` are
//! comments; a `# coords: <name>...` comment in `.hrep` and `.vrep` files
//! names the coordinates.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gambles::{Gamble, GambleSet, LowerPrevision, PossibilitySpace};
use crate::polytope::{AdjacencyGraph, HRep, VRep};
use crate::ratlinalg::Rational;

const COORDS: &str = "# coords:";

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    }
    fs::write(path, contents).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Non-empty, non-comment lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn coord_names(text: &str) -> Option<Vec<String>> {
    text.lines()
        .map(str::trim)
        .find_map(|l| l.strip_prefix(COORDS))
        .map(|rest| rest.split_whitespace().map(str::to_string).collect())
}

fn rational(src: &str, line: usize, tok: &str) -> Result<Rational> {
    tok.parse().map_err(|_| Error::parse(src, line, format!("`{tok}` is not a rational number")))
}

fn count(src: &str, line: usize, tok: Option<&str>, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| Error::parse(src, line, format!("missing {what}")))?;
    tok.parse().map_err(|_| Error::parse(src, line, format!("`{tok}` is not a valid {what}")))
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

pub fn parse_gambles(src: &str, text: &str) -> Result<(PossibilitySpace, Vec<(String, Gamble)>)> {
    let mut lines = content_lines(text);
    let (ln, head) = lines.next().ok_or_else(|| Error::parse(src, 1, "empty gamble file"))?;
    let mut toks = head.split_whitespace();
    if toks.next() != Some("omega") {
        return Err(Error::parse(src, ln, "expected `omega <label>...`"));
    }
    let labels: Vec<String> = toks.map(str::to_string).collect();
    if labels.is_empty() {
        return Err(Error::parse(src, ln, "no elements listed"));
    }
    let space = PossibilitySpace::new(labels).map_err(|e| Error::parse(src, ln, e.to_string()))?;
    let mut items = Vec::new();
    for (ln, line) in lines {
        let mut toks = line.split_whitespace();
        let name = toks.next().expect("line is non-empty").trim_end_matches(':').to_string();
        let values = toks.map(|t| rational(src, ln, t)).collect::<Result<Vec<_>>>()?;
        if values.len() != space.len() {
            return Err(Error::parse(
                src,
                ln,
                format!("gamble `{name}` has {} values, expected {}", values.len(), space.len()),
            ));
        }
        items.push((name, Gamble(values)));
    }
    if items.is_empty() {
        return Err(Error::parse(src, ln, "no gambles listed"));
    }
    Ok((space, items))
}

/// Reads a gamble file as given; gambles need not lie in `L`.
pub fn read_gambles(path: &Path) -> Result<(PossibilitySpace, Vec<(String, Gamble)>)> {
    parse_gambles(&path.display().to_string(), &read_file(path)?)
}

pub fn format_gambles(k: &GambleSet) -> String {
    let mut out = format!("omega {}\n", k.space().labels().join(" "));
    for (name, g) in k.names().iter().zip(k.gambles()) {
        let _ = writeln!(out, "{name} {}", join(g.payoffs()));
    }
    out
}

pub fn parse_prevision(src: &str, text: &str) -> Result<Vec<(String, Rational)>> {
    let mut out: Vec<(String, Rational)> = Vec::new();
    for (ln, line) in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::parse(src, ln, "expected `<gamble> <value>`"));
        }
        let name = toks[0].trim_end_matches(':').to_string();
        if out.iter().any(|(n, _)| *n == name) {
            return Err(Error::parse(src, ln, format!("gamble `{name}` given twice")));
        }
        out.push((name, rational(src, ln, toks[1])?));
    }
    Ok(out)
}

pub fn read_prevision(path: &Path) -> Result<Vec<(String, Rational)>> {
    parse_prevision(&path.display().to_string(), &read_file(path)?)
}

pub fn format_prevision(k: &GambleSet, p: &LowerPrevision) -> String {
    k.names().iter().zip(p.values()).map(|(n, v)| format!("{n} {v}\n")).collect()
}

pub fn parse_hrep(src: &str, text: &str) -> Result<HRep> {
    let mut lines = content_lines(text);
    let (ln, head) = lines.next().ok_or_else(|| Error::parse(src, 1, "empty H-representation"))?;
    let mut toks = head.split_whitespace();
    if toks.next() != Some("H") {
        return Err(Error::parse(src, ln, "expected header `H <m> <d>`"));
    }
    let m = count(src, ln, toks.next(), "row count")?;
    let d = count(src, ln, toks.next(), "dimension")?;
    let mut h = HRep::empty(d);
    for (ln, line) in lines {
        let vals = line.split_whitespace().map(|t| rational(src, ln, t)).collect::<Result<Vec<_>>>()?;
        if vals.len() != d + 1 {
            return Err(Error::parse(src, ln, format!("expected {} numbers, found {}", d + 1, vals.len())));
        }
        let mut it = vals.into_iter();
        let rhs = it.next().expect("nonempty");
        h.push(it.collect(), rhs)?;
    }
    if h.len() != m {
        return Err(Error::parse(src, ln, format!("header announces {m} rows, found {}", h.len())));
    }
    match coord_names(text) {
        Some(names) => h.with_names(names).map_err(|e| Error::parse(src, ln, e.to_string())),
        None => Ok(h),
    }
}

pub fn read_hrep(path: &Path) -> Result<HRep> {
    parse_hrep(&path.display().to_string(), &read_file(path)?)
}

pub fn format_hrep(h: &HRep) -> String {
    let mut out = format!("{COORDS} {}\nH {} {}\n", h.names().join(" "), h.len(), h.dim());
    for (a, b) in h.rows() {
        let _ = writeln!(out, "{b} {}", join(a));
    }
    out
}

pub fn parse_vrep(src: &str, text: &str) -> Result<VRep> {
    let mut lines = content_lines(text);
    let (ln, head) = lines.next().ok_or_else(|| Error::parse(src, 1, "empty V-representation"))?;
    let mut toks = head.split_whitespace();
    if toks.next() != Some("V") {
        return Err(Error::parse(src, ln, "expected header `V <n> <d>`"));
    }
    let n = count(src, ln, toks.next(), "vertex count")?;
    let d = count(src, ln, toks.next(), "dimension")?;
    let mut vs = Vec::new();
    for (ln, line) in lines {
        let vals = line.split_whitespace().map(|t| rational(src, ln, t)).collect::<Result<Vec<_>>>()?;
        if vals.len() != d {
            return Err(Error::parse(src, ln, format!("expected {d} coordinates, found {}", vals.len())));
        }
        vs.push(vals);
    }
    if vs.len() != n {
        return Err(Error::parse(src, ln, format!("header announces {n} vertices, found {}", vs.len())));
    }
    let v = VRep::new(d, vs).map_err(|e| Error::parse(src, ln, e.to_string()))?;
    match coord_names(text) {
        Some(names) => v.with_names(names).map_err(|e| Error::parse(src, ln, e.to_string())),
        None => Ok(v),
    }
}

pub fn read_vrep(path: &Path) -> Result<VRep> {
    parse_vrep(&path.display().to_string(), &read_file(path)?)
}

pub fn format_vrep(v: &VRep) -> String {
    let mut out = format!("{COORDS} {}\nV {} {}\n", v.names().join(" "), v.len(), v.dim());
    for x in v.vertices() {
        let _ = writeln!(out, "{}", join(x));
    }
    out
}

/// Edge list; the vertex count is taken from the caller.
pub fn parse_adjacency(src: &str, text: &str, vertex_count: usize) -> Result<AdjacencyGraph> {
    let mut edges = Vec::new();
    for (ln, line) in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::parse(src, ln, "expected `u v`"));
        }
        let u = count(src, ln, Some(toks[0]), "vertex index")?;
        let v = count(src, ln, Some(toks[1]), "vertex index")?;
        if u >= v || v >= vertex_count {
            return Err(Error::parse(src, ln, format!("invalid edge `{u} {v}`")));
        }
        edges.push((u, v));
    }
    edges.sort_unstable();
    edges.dedup();
    Ok(AdjacencyGraph { vertex_count, edges })
}

pub fn format_adjacency(g: &AdjacencyGraph) -> String {
    g.edges.iter().map(|(u, v)| format!("{u} {v}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlinalg::rat;

    #[test]
    fn gamble_file() {
        let text = "# toy\nomega a b c\nf 1 1/2 0\ng: 0 2/3 1\n";
        let (space, items) = parse_gambles("t.gmb", text).unwrap();
        assert_eq!(space.labels(), &["a", "b", "c"]);
        assert_eq!(items[1].0, "g");
        assert_eq!(items[1].1.payoffs()[1], rat(2, 3));
        let k = GambleSet::new(space, items).unwrap();
        let again = parse_gambles("t.gmb", &format_gambles(&k)).unwrap();
        assert_eq!(GambleSet::new(again.0, again.1).unwrap(), k);
    }

    #[test]
    fn gamble_file_errors() {
        let e = parse_gambles("t.gmb", "omega a b\nf 1 0 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        assert!(parse_gambles("t.gmb", "f 1 0\n").is_err());
        assert!(parse_gambles("t.gmb", "omega a b\nf 1 x\n").is_err());
        assert!(parse_gambles("t.gmb", "omega a a\nf 1 0\n").is_err());
    }

    #[test]
    fn hrep_round_trip() {
        let h = HRep::new(2, vec![(vec![rat(-1, 1), rat(0, 1)], rat(0, 1)), (vec![rat(1, 1), rat(3, 4)], rat(1, 1))])
            .unwrap()
            .with_names(vec!["f".into(), "g".into()])
            .unwrap();
        let text = format_hrep(&h);
        assert_eq!(text, "# coords: f g\nH 2 2\n0 -1 0\n1 1 3/4\n");
        assert_eq!(parse_hrep("x", &text).unwrap(), h);
        assert!(parse_hrep("x", "H 3 2\n0 -1 0\n").is_err());
        assert!(parse_hrep("x", "H 1 2\n0 -1\n").is_err());
    }

    #[test]
    fn vrep_and_adjacency_round_trip() {
        let v = VRep::new(2, vec![vec![rat(0, 1), rat(0, 1)], vec![rat(1, 2), rat(2, 3)]]).unwrap();
        let parsed = parse_vrep("x", &format_vrep(&v)).unwrap();
        assert_eq!(parsed, v);
        let g = AdjacencyGraph { vertex_count: 2, edges: vec![(0, 1)] };
        assert_eq!(parse_adjacency("x", &format_adjacency(&g), 2).unwrap(), g);
        assert!(parse_adjacency("x", "1 0\n", 2).is_err());
    }

    #[test]
    fn prevision_file() {
        let p = parse_prevision("p", "f 1/2\ng 2/3\n").unwrap();
        assert_eq!(p, vec![("f".to_string(), rat(1, 2)), ("g".to_string(), rat(2, 3))]);
        assert!(parse_prevision("p", "f 1/2\nf 1\n").is_err());
        assert!(parse_prevision("p", "f\n").is_err());
    }
}
