//! CPLEX-style LP text export and a reader for our own output.
//!
//! Every column is listed in `Bounds` in index order so the reader recovers the
//! original column order. Variable roles travel as `\ role` comment lines,
//! which other LP readers ignore.

use std::fmt::Write;

use super::{Constraint, MilpModel, Relation, Roles, VarKind, Variable};
use crate::error::{Error, Result};

const TERMS_PER_LINE: usize = 8;

fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:?}")
    }
}

fn write_terms(out: &mut String, model: &MilpModel, terms: &[(usize, f64)]) {
    for (k, &(i, c)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if c.is_sign_negative() { '-' } else { '+' };
        let _ = write!(out, " {sign} {} {}", fmt_num(c.abs()), model.variables[i].name);
    }
}

pub fn export_lp_text(model: &MilpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ model {}", model.name);
    let names = |idx: &[usize]| {
        idx.iter()
            .map(|&i| model.variables[i].name.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    };
    for (role, idx) in [
        ("x", &model.roles.x),
        ("slack", &model.roles.slack),
        ("y", &model.roles.y),
    ] {
        if !idx.is_empty() {
            let _ = writeln!(out, "\\ role {role} {}", names(idx));
        }
    }
    if let Some(l) = model.roles.level {
        let _ = writeln!(out, "\\ role level {}", model.variables[l].name);
    }

    out.push_str("Minimize\n obj:");
    write_terms(&mut out, model, &model.objective);
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        let _ = write!(out, " {}:", c.name);
        write_terms(&mut out, model, &c.coeffs);
        if c.coeffs.is_empty() {
            let _ = write!(out, " + 0 {}", model.variables[0].name);
        }
        let rel = match c.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        let _ = writeln!(out, " {rel} {}", fmt_num(c.rhs));
    }
    out.push_str("Bounds\n");
    for v in &model.variables {
        let _ = writeln!(out, " {} <= {} <= {}", fmt_num(v.lower), v.name, fmt_num(v.upper));
    }
    let bins: Vec<&str> = model
        .variables
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !bins.is_empty() {
        out.push_str("Binaries\n");
        for chunk in bins.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    Binaries,
    End,
}

fn section_of(line: &str) -> Option<Section> {
    match line.trim().to_ascii_lowercase().as_str() {
        "minimize" | "minimise" | "min" => Some(Section::Objective),
        "subject to" | "st" | "s.t." | "such that" => Some(Section::Constraints),
        "bounds" => Some(Section::Bounds),
        "binaries" | "binary" | "bin" => Some(Section::Binaries),
        "end" => Some(Section::End),
        _ => None,
    }
}

fn parse_num(tok: &str, line: usize) -> Result<f64> {
    match tok {
        "+inf" | "inf" | "+infinity" | "infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => tok.parse::<f64>().map_err(|_| Error::Parse {
            line,
            msg: format!("expected a number, found `{tok}`"),
        }),
    }
}

struct Reader {
    names: Vec<String>,
    index: std::collections::HashMap<String, usize>,
}

impl Reader {
    fn var(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), self.names.len() - 1);
        self.names.len() - 1
    }
}

/// `(token, line)` stream of a linear expression; returns the terms.
fn parse_terms(reader: &mut Reader, toks: &[(String, usize)]) -> Result<Vec<(usize, f64)>> {
    let mut terms = Vec::new();
    let mut k = 0;
    while k < toks.len() {
        let (sign_tok, line) = &toks[k];
        let sign = match sign_tok.as_str() {
            "+" => 1.0,
            "-" => -1.0,
            _ => {
                return Err(Error::Parse {
                    line: *line,
                    msg: format!("expected `+` or `-`, found `{sign_tok}`"),
                })
            }
        };
        let (coef_tok, cl) = toks.get(k + 1).ok_or(Error::Parse {
            line: *line,
            msg: "truncated term".into(),
        })?;
        let (name_tok, _) = toks.get(k + 2).ok_or(Error::Parse {
            line: *cl,
            msg: "truncated term".into(),
        })?;
        let coef = parse_num(coef_tok, *cl)?;
        let idx = reader.var(name_tok);
        terms.push((idx, sign * coef));
        k += 3;
    }
    Ok(terms)
}

/// Reads LP text produced by [`export_lp_text`].
pub fn parse_lp_text(text: &str) -> Result<MilpModel> {
    let mut section = Section::Preamble;
    let mut name = String::new();
    let mut role_lines: Vec<(String, Vec<String>)> = Vec::new();
    let mut obj_toks: Vec<(String, usize)> = Vec::new();
    let mut con_toks: Vec<(String, usize)> = Vec::new();
    let mut bound_lines: Vec<(Vec<String>, usize)> = Vec::new();
    let mut binaries: Vec<String> = Vec::new();

    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let trimmed = raw.trim();
        if let Some(comment) = trimmed.strip_prefix('\\') {
            let mut parts = comment.split_whitespace();
            match parts.next() {
                Some("model") => name = parts.collect::<Vec<_>>().join(" "),
                Some("role") => {
                    let kind = parts.next().unwrap_or_default().to_string();
                    role_lines.push((kind, parts.map(String::from).collect()));
                }
                _ => {}
            }
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        if let Some(s) = section_of(trimmed) {
            section = s;
            continue;
        }
        let toks = trimmed.split_whitespace().map(|t| (t.to_string(), line_no));
        match section {
            Section::Objective => obj_toks.extend(toks),
            Section::Constraints => con_toks.extend(toks),
            Section::Bounds => bound_lines.push((trimmed.split_whitespace().map(String::from).collect(), line_no)),
            Section::Binaries => binaries.extend(trimmed.split_whitespace().map(String::from)),
            Section::Preamble | Section::End => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("unexpected content `{trimmed}`"),
                })
            }
        }
    }

    let mut reader = Reader {
        names: Vec::new(),
        index: Default::default(),
    };
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    // Bounds first so column order follows the listing.
    for (toks, line) in &bound_lines {
        if toks.len() != 5 || toks[1] != "<=" || toks[3] != "<=" {
            return Err(Error::Parse {
                line: *line,
                msg: "expected `lo <= name <= hi`".into(),
            });
        }
        let i = reader.var(&toks[2]);
        if lower.len() <= i {
            lower.resize(i + 1, 0.0);
            upper.resize(i + 1, f64::INFINITY);
        }
        lower[i] = parse_num(&toks[0], *line)?;
        upper[i] = parse_num(&toks[4], *line)?;
    }

    let obj_body: &[(String, usize)] = match obj_toks.first() {
        Some((t, _)) if t.ends_with(':') => &obj_toks[1..],
        _ => &obj_toks,
    };
    let mut objective = parse_terms(&mut reader, obj_body)?;
    objective.sort_by_key(|(i, _)| *i);

    let mut constraints = Vec::new();
    let mut k = 0;
    while k < con_toks.len() {
        let (head, line) = &con_toks[k];
        let cname = head.strip_suffix(':').ok_or(Error::Parse {
            line: *line,
            msg: format!("expected a row name, found `{head}`"),
        })?;
        k += 1;
        let start = k;
        while k < con_toks.len() && !matches!(con_toks[k].0.as_str(), "<=" | ">=" | "=") {
            k += 1;
        }
        let (rel_tok, rl) = con_toks.get(k).ok_or(Error::Parse {
            line: *line,
            msg: format!("row `{cname}` has no relation"),
        })?;
        let relation = match rel_tok.as_str() {
            "<=" => Relation::Le,
            ">=" => Relation::Ge,
            _ => Relation::Eq,
        };
        let (rhs_tok, _) = con_toks.get(k + 1).ok_or(Error::Parse {
            line: *rl,
            msg: format!("row `{cname}` has no right-hand side"),
        })?;
        let rhs = parse_num(rhs_tok, *rl)?;
        let mut coeffs: Vec<(usize, f64)> = parse_terms(&mut reader, &con_toks[start..k])?
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .collect();
        coeffs.sort_by_key(|(i, _)| *i);
        constraints.push(Constraint {
            name: cname.to_string(),
            coeffs,
            relation,
            rhs,
        });
        k += 2;
    }

    let bin_set: std::collections::HashSet<usize> = binaries.iter().map(|b| reader.var(b)).collect();
    let n = reader.names.len();
    lower.resize(n, 0.0);
    upper.resize(n, f64::INFINITY);
    let variables: Vec<Variable> = (0..n)
        .map(|i| {
            let binary = bin_set.contains(&i);
            Variable {
                name: reader.names[i].clone(),
                kind: if binary { VarKind::Binary } else { VarKind::Continuous },
                lower: lower[i],
                upper: upper[i],
            }
        })
        .collect();

    let mut roles = Roles::default();
    for (kind, names) in role_lines {
        let idx: Vec<usize> = names.iter().filter_map(|nm| reader.index.get(nm).copied()).collect();
        match kind.as_str() {
            "x" => roles.x = idx,
            "slack" => roles.slack = idx,
            "y" => roles.y = idx,
            "level" => roles.level = idx.first().copied(),
            _ => {}
        }
    }

    Ok(MilpModel {
        name,
        variables,
        objective,
        constraints,
        roles,
    })
}
