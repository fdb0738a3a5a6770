//! Instance and graph files.
//!
//! Instance text:
//!
//! ```text
//! # optional comments
//! stqp 3
//! 1
//! 0.5 2
//! -1 0 3
//! ```
//!
//! Row `i` lists `Q[i][0..=i]`. The JSON mirror is
//! `{"name": ..., "n": ..., "lower_triangle": [[...], ...]}`.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::instance::{Origin, StqpInstance};
use crate::matrix::SymmetricMatrix;

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Strips a trailing `#` comment.
fn content(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

pub fn parse_instance_text(name: &str, text: &str) -> Result<StqpInstance> {
    let mut n: Option<usize> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = content(raw);
        if line.is_empty() {
            continue;
        }
        let Some(n) = n else {
            let mut it = line.split_whitespace();
            if it.next() != Some("stqp") {
                return Err(perr(line_no, "expected header `stqp <n>`"));
            }
            let v = it
                .next()
                .and_then(|t| t.parse::<usize>().ok())
                .ok_or_else(|| perr(line_no, "header needs a positive integer size"))?;
            if it.next().is_some() {
                return Err(perr(line_no, "trailing tokens after header"));
            }
            if v == 0 {
                return Err(perr(line_no, "size must be positive"));
            }
            n = Some(v);
            continue;
        };
        if rows.len() == n {
            return Err(perr(line_no, format!("more than {n} matrix rows")));
        }
        let row = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| perr(line_no, format!("bad number `{t}`"))))
            .collect::<Result<Vec<f64>>>()?;
        let expect = rows.len() + 1;
        if row.len() != expect {
            return Err(perr(
                line_no,
                format!("row {} needs {expect} entries, found {}", expect, row.len()),
            ));
        }
        if let Some(v) = row.iter().find(|v| !v.is_finite()) {
            return Err(perr(line_no, format!("non-finite entry {v}")));
        }
        rows.push(row);
    }
    let Some(n) = n else {
        return Err(perr(last_line.max(1), "missing `stqp <n>` header"));
    };
    if rows.len() != n {
        return Err(perr(last_line, format!("expected {n} rows, found {}", rows.len())));
    }
    let q = SymmetricMatrix::from_lower_triangle(&rows)?;
    StqpInstance::new(name, q, Origin::File)
}

/// Text form; numbers use the shortest representation that reads back exactly.
pub fn format_instance_text(inst: &StqpInstance) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {}", inst.name);
    let _ = writeln!(s, "stqp {}", inst.n());
    for row in inst.q.lower_triangle() {
        let parts: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(s, "{}", parts.join(" "));
    }
    s
}

#[derive(Debug, Serialize, Deserialize)]
struct InstanceJson {
    name: String,
    n: usize,
    lower_triangle: Vec<Vec<f64>>,
}

pub fn parse_instance_json(text: &str) -> Result<StqpInstance> {
    let j: InstanceJson = serde_json::from_str(text)?;
    if j.lower_triangle.len() != j.n {
        return Err(Error::Dimension {
            expected: j.n,
            got: j.lower_triangle.len(),
        });
    }
    let q = SymmetricMatrix::from_lower_triangle(&j.lower_triangle)?;
    StqpInstance::new(j.name, q, Origin::File)
}

pub fn format_instance_json(inst: &StqpInstance) -> String {
    let j = InstanceJson {
        name: inst.name.clone(),
        n: inst.n(),
        lower_triangle: inst.q.lower_triangle(),
    };
    serde_json::to_string_pretty(&j).expect("plain data serializes")
}

fn is_json(path: &Path, text: &str) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) || text.trim_start().starts_with('{')
}

/// Reads text or JSON, chosen by extension or a leading `{`.
pub fn load_instance(path: impl AsRef<Path>) -> Result<StqpInstance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    if is_json(path, &text) {
        parse_instance_json(&text)
    } else {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "instance".into());
        let mut inst = parse_instance_text(&name, &text)?;
        inst.name = name;
        Ok(inst)
    }
}

/// Writes JSON for `.json` paths and text otherwise.
pub fn save_instance(inst: &StqpInstance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let body = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        format_instance_json(inst)
    } else {
        format_instance_text(inst)
    };
    std::fs::write(path, body)?;
    Ok(())
}

/// DIMACS edge format with 1-based vertices. Duplicate edges are merged.
pub fn parse_dimacs(text: &str, complement: bool) -> Result<SimpleGraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        let mut it = line.split_whitespace();
        match it.next() {
            None | Some("c") => continue,
            Some("p") => {
                if header.is_some() {
                    return Err(perr(line_no, "duplicate problem line"));
                }
                let kind = it.next().unwrap_or("");
                if kind != "edge" && kind != "col" {
                    return Err(perr(line_no, format!("unsupported problem type `{kind}`")));
                }
                let n = it.next().and_then(|t| t.parse::<usize>().ok());
                let m = it.next().and_then(|t| t.parse::<usize>().ok());
                match (n, m) {
                    (Some(n), Some(m)) => header = Some((n, m)),
                    _ => return Err(perr(line_no, "expected `p edge <n> <m>`")),
                }
            }
            Some("e") => {
                let Some((n, _)) = header else {
                    return Err(perr(line_no, "edge before problem line"));
                };
                let mut end = || -> Result<usize> {
                    let t = it.next().ok_or_else(|| perr(line_no, "edge needs two endpoints"))?;
                    let v: usize = t.parse().map_err(|_| perr(line_no, format!("bad vertex `{t}`")))?;
                    if v == 0 || v > n {
                        return Err(perr(line_no, format!("vertex {v} outside 1..={n}")));
                    }
                    Ok(v - 1)
                };
                let a = end()?;
                let b = end()?;
                if a == b {
                    return Err(perr(line_no, "self-loop"));
                }
                edges.push((a.min(b), a.max(b)));
            }
            Some(t) => return Err(perr(line_no, format!("unknown line type `{t}`"))),
        }
    }
    let Some((n, _)) = header else {
        return Err(perr(text.lines().count().max(1), "missing problem line"));
    };
    edges.sort_unstable();
    edges.dedup();
    let g = SimpleGraph::new(n, edges)?;
    Ok(if complement { g.complement() } else { g })
}

pub fn load_dimacs(path: impl AsRef<Path>, complement: bool) -> Result<SimpleGraph> {
    parse_dimacs(&std::fs::read_to_string(path)?, complement)
}

pub fn format_dimacs(g: &SimpleGraph) -> String {
    let mut s = format!("p edge {} {}\n", g.n(), g.edges().len());
    for &(a, b) in g.edges() {
        let _ = writeln!(s, "e {} {}", a + 1, b + 1);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_blst, TriangularSpec};
    use crate::graph::motzkin_straus;
    use crate::oracle::oracle_solve;

    const C5: &str = "c five-cycle\np edge 5 5\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 5 1\n";

    #[test]
    fn text_parse() {
        let inst = parse_instance_text("a", "# hi\nstqp 2\n1 # diag\n0.5 2\n").unwrap();
        assert_eq!(inst.q.get(0, 1), 0.5);
        assert_eq!(inst.q.get(1, 1), 2.0);
    }

    #[test]
    fn text_errors_carry_lines() {
        let cases = [
            ("stqp 2\n1\n0.5\n", 3),
            ("stqp 2\n1\n0.5 x\n", 3),
            ("\nstqpx 2\n", 2),
            ("stqp 2\n1\n", 2),
            ("stqp 1\n1\n2\n", 3),
        ];
        for (text, line) in cases {
            match parse_instance_text("e", text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn round_trips_are_bit_identical() {
        let dir = tempdir();
        let inst = gen_blst(9, TriangularSpec::new(-1.0, 0.3, 1.0, 5).unwrap()).unwrap();
        for ext in ["txt", "json"] {
            let p = dir.join(format!("i.{ext}"));
            save_instance(&inst, &p).unwrap();
            let back = load_instance(&p).unwrap();
            assert_eq!(back.q, inst.q);
        }
        let _ = std::fs::remove_dir_all(dir);
    }

    fn tempdir() -> std::path::PathBuf {
        let d = std::env::temp_dir().join(format!("stqp-io-{}", std::process::id()));
        std::fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn dimacs_c5_complement() {
        let g = parse_dimacs(C5, true).unwrap();
        assert_eq!(g.edges().len(), 5);
        let s = oracle_solve(&motzkin_straus(&g), Default::default()).unwrap();
        assert!((s.value - 0.5).abs() < 1e-12);
        let back = parse_dimacs(&format_dimacs(&g), false).unwrap();
        assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn dimacs_rejects_zero_based() {
        match parse_dimacs("p edge 4 1\ne 0 3\n", false) {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_dimacs("e 1 2\n", false).is_err());
        assert!(parse_dimacs("p edge 3 1\ne 1 4\n", false).is_err());
    }
}
