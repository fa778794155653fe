use super::{remove_redundant, HRep};
use crate::error::{Error, Result};
use crate::ratlinalg::Rational;

/// Orthogonal projection onto the coordinates `keep` (indices into `h`'s
/// coordinates; output keeps their original relative order).
pub fn fm_project(h: &HRep, keep: &[usize]) -> Result<HRep> {
    fm_project_with(h, keep, |_, _| {})
}

/// [`fm_project`] with a callback `(eliminated coordinate, rows after
/// reduction)` invoked after every elimination step.
pub fn fm_project_with(h: &HRep, keep: &[usize], mut progress: impl FnMut(usize, usize)) -> Result<HRep> {
    let d = h.dim();
    if let Some(&bad) = keep.iter().find(|&&k| k >= d) {
        return Err(Error::DimensionMismatch { expected: d, found: bad + 1 });
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() == d {
        return Ok(h.clone());
    }
    // `coords[j]` is the original index of current column j.
    let mut coords: Vec<usize> = (0..d).collect();
    let mut rows: Vec<(Vec<Rational>, Rational)> = h.rows().map(|(a, b)| (a.to_vec(), b.clone())).collect();
    loop {
        let candidates: Vec<usize> = (0..coords.len()).filter(|&j| !keep_sorted.contains(&coords[j])).collect();
        if candidates.is_empty() {
            break;
        }
        // Cheapest elimination first: fewest new rows.
        let col = *candidates
            .iter()
            .min_by_key(|&&j| {
                let p = rows.iter().filter(|(a, _)| a[j].is_positive()).count();
                let n = rows.iter().filter(|(a, _)| a[j].is_negative()).count();
                ((p * n) as i64 - (p + n) as i64, coords[j])
            })
            .expect("nonempty");
        rows = eliminate(&rows, col);
        let eliminated = coords.remove(col);
        let dim = coords.len();
        let step = HRep::new(dim, rows)?;
        let reduced = remove_redundant(&step)?;
        progress(eliminated, reduced.len());
        rows = reduced.rows().map(|(a, b)| (a.to_vec(), b.clone())).collect();
    }
    let names = coords.iter().map(|&c| h.names()[c].clone()).collect();
    HRep::new(coords.len(), rows)?.with_names(names)
}

/// One Fourier–Motzkin step on column `col`; the column is dropped.
fn eliminate(rows: &[(Vec<Rational>, Rational)], col: usize) -> Vec<(Vec<Rational>, Rational)> {
    let strip = |a: &[Rational]| -> Vec<Rational> {
        a.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, x)| x.clone()).collect()
    };
    let mut out = Vec::new();
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for (a, b) in rows {
        match a[col].signum() {
            0 => out.push((strip(a), b.clone())),
            1 => pos.push((a, b)),
            _ => neg.push((a, b)),
        }
    }
    for (ap, bp) in &pos {
        for (an, bn) in &neg {
            // ap[col] > 0 > an[col]: |an[col]| * row_p + ap[col] * row_n.
            let s = -&an[col];
            let t = &ap[col];
            let a: Vec<Rational> = ap
                .iter()
                .zip(an.iter())
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, (x, y))| s.mul_add(x, &(t * y)))
                .collect();
            let b = s.mul_add(bp, &(t * *bn));
            out.push((a, b));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{enumerate_vertices, remove_redundant};
    use super::*;

    #[test]
    fn cube_to_square() {
        let p = fm_project(&unit_cube(3), &[0, 1]).unwrap();
        let sq = remove_redundant(&unit_cube(2)).unwrap();
        assert_eq!(p.sorted_rows(), sq.sorted_rows());
    }

    #[test]
    fn keep_all_is_identity() {
        let h = toy_eight();
        assert_eq!(fm_project(&h, &[0, 1]).unwrap(), h);
    }

    #[test]
    fn triangle_shadow() {
        // Simplex {x,y,z >= 0, x+y+z <= 1} projected on (x, z).
        let mut h = HRep::empty(3);
        for j in 0..3 {
            let mut e = vec![r(0); 3];
            e[j] = r(-1);
            h.push(e, r(0)).unwrap();
        }
        h.push(vec![r(1), r(1), r(1)], r(1)).unwrap();
        let p = fm_project(&h, &[2, 0]).unwrap();
        assert_eq!(p.names(), &["x1".to_string(), "x3".to_string()]);
        let (v, _) = enumerate_vertices(&p).unwrap();
        assert_eq!(v.vertices(), &[vec![r(0), r(0)], vec![r(0), r(1)], vec![r(1), r(0)]]);
    }
}
