//! The "M3T v1" ASCII mesh format.
//!
//! ```text
//! m3t 1
//! vertices N
//! coords            # optional: N lines of "x y z"
//! ...
//! tets T            # T lines of four 0-based oriented vertex ids
//! ...
//! lengths E         # optional: E lines of "edge-index length", edges in
//! ...               # canonical sorted-pair order
//! ```
//!
//! Only vertex-faithful complexes are representable; writing a complex
//! with lift-distinguished duplicate simplices is an error.

use super::VerifyError;
use crate::complex::SimplicialComplex3;
use crate::metric::ReggeMetric;
use std::path::Path;

pub struct M3tContents {
    pub complex: SimplicialComplex3,
    pub lengths: Option<Vec<f64>>,
}

pub fn write_m3t(
    path: &Path,
    c: &SimplicialComplex3,
    metric: Option<&ReggeMetric>,
) -> Result<(), VerifyError> {
    if !c.is_vertex_faithful() {
        return Err(VerifyError::Precondition(
            "mesh has duplicate simplices under vertex-id gluing and cannot be written as m3t; \
             rebuild with a finer subdivision"
                .into(),
        ));
    }
    let mut out = String::new();
    out.push_str("m3t 1\n");
    out.push_str(&format!("vertices {}\n", c.vertex_count()));
    if let Some(coords) = c.coords() {
        out.push_str("coords\n");
        for p in coords {
            out.push_str(&format!("{} {} {}\n", p[0], p[1], p[2]));
        }
    }
    out.push_str(&format!("tets {}\n", c.tet_count()));
    for t in c.tetrahedra() {
        out.push_str(&format!("{} {} {} {}\n", t[0], t[1], t[2], t[3]));
    }
    if let Some(g) = metric {
        // canonical order: edges sorted by vertex pair
        let order = sorted_edge_order(c);
        out.push_str(&format!("lengths {}\n", c.edge_count()));
        for (slot, &e) in order.iter().enumerate() {
            out.push_str(&format!("{slot} {}\n", g.lengths()[e]));
        }
    }
    std::fs::write(path, out).map_err(|source| VerifyError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn sorted_edge_order(c: &SimplicialComplex3) -> Vec<usize> {
    let mut order: Vec<usize> = (0..c.edge_count()).collect();
    order.sort_by_key(|&e| c.edges()[e]);
    order
}

pub fn read_m3t(path: &Path) -> Result<M3tContents, VerifyError> {
    let text = std::fs::read_to_string(path).map_err(|source| VerifyError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let p = path.display().to_string();
    let fail = |line: usize, message: String| VerifyError::Parse {
        path: p.clone(),
        line,
        message,
    };

    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .collect();
    let mut cursor = 0usize;
    fn take<'a>(
        lines: &[(usize, &'a str)],
        cursor: &mut usize,
        path: &str,
        what: &str,
    ) -> Result<(usize, &'a str), VerifyError> {
        let item = lines
            .get(*cursor)
            .copied()
            .ok_or_else(|| VerifyError::Parse {
                path: path.to_string(),
                line: 0,
                message: format!("unexpected end of file, expected {what}"),
            })?;
        *cursor += 1;
        Ok(item)
    }

    let (ln, header) = take(&lines, &mut cursor, &p, "header")?;
    if header.trim() != "m3t 1" {
        return Err(fail(
            ln + 1,
            format!("bad header {header:?}, expected \"m3t 1\""),
        ));
    }
    let (ln, vline) = take(&lines, &mut cursor, &p, "vertices")?;
    let n: usize = parse_block_header(vline, "vertices").map_err(|m| fail(ln + 1, m))?;

    let (mut ln, mut block) = take(&lines, &mut cursor, &p, "coords or tets")?;
    let mut coords = None;
    if block.trim() == "coords" {
        let mut cs = Vec::with_capacity(n);
        for _ in 0..n {
            let (cl, cline) = take(&lines, &mut cursor, &p, "coordinate line")?;
            let vals: Result<Vec<f64>, _> =
                cline.split_whitespace().map(str::parse::<f64>).collect();
            let vals = vals.map_err(|e| fail(cl + 1, format!("bad coordinate: {e}")))?;
            if vals.len() != 3 {
                return Err(fail(
                    cl + 1,
                    format!("expected 3 coordinates, got {}", vals.len()),
                ));
            }
            cs.push([vals[0], vals[1], vals[2]]);
        }
        coords = Some(cs);
        let nx = take(&lines, &mut cursor, &p, "tets")?;
        ln = nx.0;
        block = nx.1;
    }
    let t: usize = parse_block_header(block, "tets").map_err(|m| fail(ln + 1, m))?;
    let mut tets = Vec::with_capacity(t);
    for _ in 0..t {
        let (tl, tline) = take(&lines, &mut cursor, &p, "tetrahedron line")?;
        let vals: Result<Vec<usize>, _> =
            tline.split_whitespace().map(str::parse::<usize>).collect();
        let vals = vals.map_err(|e| fail(tl + 1, format!("bad vertex id: {e}")))?;
        if vals.len() != 4 {
            return Err(fail(
                tl + 1,
                format!("expected 4 vertex ids, got {}", vals.len()),
            ));
        }
        if vals.iter().any(|&v| v >= n) {
            return Err(fail(tl + 1, "vertex id beyond vertex count".into()));
        }
        tets.push([vals[0], vals[1], vals[2], vals[3]]);
    }

    let lifts = vec![[[0i64; 3]; 4]; tets.len()];
    let complex = SimplicialComplex3::from_lifted_tetrahedra(n, tets, lifts, coords)
        .map_err(|e| fail(0, e.to_string()))?;

    let mut lengths = None;
    if cursor < lines.len() {
        let (ll, lline) = take(&lines, &mut cursor, &p, "lengths")?;
        let e: usize = parse_block_header(lline, "lengths").map_err(|m| fail(ll + 1, m))?;
        if e != complex.edge_count() {
            return Err(fail(
                ll + 1,
                format!(
                    "lengths block has {e} entries, mesh has {} edges",
                    complex.edge_count()
                ),
            ));
        }
        let order = sorted_edge_order(&complex);
        let mut vals = vec![f64::NAN; complex.edge_count()];
        for _ in 0..e {
            let (vl, vline) = take(&lines, &mut cursor, &p, "length line")?;
            let mut it = vline.split_whitespace();
            let idx: usize = it
                .next()
                .ok_or_else(|| fail(vl + 1, "missing edge index".into()))?
                .parse()
                .map_err(|e| fail(vl + 1, format!("bad edge index: {e}")))?;
            let len: f64 = it
                .next()
                .ok_or_else(|| fail(vl + 1, "missing length".into()))?
                .parse()
                .map_err(|e| fail(vl + 1, format!("bad length: {e}")))?;
            if idx >= vals.len() {
                return Err(fail(vl + 1, format!("edge index {idx} out of range")));
            }
            vals[order[idx]] = len;
        }
        if vals.iter().any(|v| v.is_nan()) {
            return Err(fail(0, "lengths block left some edges unset".into()));
        }
        lengths = Some(vals);
    }
    if cursor < lines.len() {
        let (xl, xline) = lines[cursor];
        return Err(fail(
            xl + 1,
            format!("unexpected trailing content {xline:?}"),
        ));
    }
    Ok(M3tContents { complex, lengths })
}

fn parse_block_header(line: &str, keyword: &str) -> Result<usize, String> {
    let mut it = line.trim().split_whitespace();
    match (it.next(), it.next(), it.next()) {
        (Some(k), Some(v), None) if k == keyword => {
            v.parse().map_err(|e| format!("bad {keyword} count: {e}"))
        }
        _ => Err(format!("expected \"{keyword} N\", got {line:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_three_torus;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("hfib-m3t-test");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn roundtrip_with_lengths() {
        let mesh = build_three_torus(3).unwrap();
        let g = ReggeMetric::from_model(&mesh).unwrap();
        let path = tmp("torus3.m3t");
        write_m3t(&path, &mesh.complex, Some(&g)).unwrap();
        let back = read_m3t(&path).unwrap();
        assert_eq!(back.complex.vertex_count(), 27);
        assert_eq!(back.complex.tet_count(), mesh.complex.tet_count());
        assert!(back.complex.validate().is_valid());
        let lengths = back.lengths.unwrap();
        let g2 = ReggeMetric::from_lengths(&back.complex, lengths).unwrap();
        assert!((g2.total_volume() - g.total_volume()).abs() <= 1e-12);
        assert_eq!(back.complex.betti_numbers(), (1, 3, 3, 1));
    }

    #[test]
    fn rejects_unfaithful_mesh() {
        let mesh = build_three_torus(2).unwrap();
        let path = tmp("torus2.m3t");
        match write_m3t(&path, &mesh.complex, None) {
            Err(VerifyError::Precondition(_)) => {}
            other => panic!("expected precondition error, got ok={}", other.is_ok()),
        }
    }

    #[test]
    fn parse_errors_carry_lines() {
        let path = tmp("bad.m3t");
        std::fs::write(&path, "m3t 2\nvertices 1\n").unwrap();
        match read_m3t(&path) {
            Err(VerifyError::Parse { line, .. }) => assert_eq!(line, 1),
            _ => panic!("expected parse error"),
        }
        std::fs::write(&path, "m3t 1\nvertices 4\ntets 1\n0 1 2\n").unwrap();
        match read_m3t(&path) {
            Err(VerifyError::Parse { line, .. }) => assert_eq!(line, 4),
            _ => panic!("expected parse error"),
        }
        std::fs::write(&path, "m3t 1\nvertices 4\ntets 1\n0 1 2 9\n").unwrap();
        assert!(read_m3t(&path).is_err());
    }
}
