//! Benchmark harness: run variants over instance sets, write reports,
//! summarize in table form and compute performance profiles.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bounds::{lb2, BoundCertificate, SplittingConfig};
use crate::error::Result;
use crate::instance::{preprocess_trivial, StqpInstance};
use crate::milp::{build_variant, BoundChoice, FormulationConfig};
use crate::oracle::{oracle_solve, OracleConfig};
use crate::solution::{relative_gap, Status, StqpSolution};
use crate::solver::{solve_milp, variant_bound, SolverConfig};

pub const ORACLE_LABEL: &str = "ORACLE";
pub const DNN_LABEL: &str = "DNN";

/// What a benchmark column runs.
#[derive(Debug, Clone, PartialEq)]
pub enum BenchVariant {
    Milp(FormulationConfig),
    Oracle,
    /// Time to compute the doubly nonnegative bound alone.
    Dnn,
}

impl BenchVariant {
    pub fn label(&self) -> String {
        match self {
            BenchVariant::Milp(c) => c.label(),
            BenchVariant::Oracle => ORACLE_LABEL.into(),
            BenchVariant::Dnn => DNN_LABEL.into(),
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        if s.eq_ignore_ascii_case(ORACLE_LABEL) {
            Some(BenchVariant::Oracle)
        } else if s.eq_ignore_ascii_case(DNN_LABEL) {
            Some(BenchVariant::Dnn)
        } else {
            FormulationConfig::from_label(s).map(BenchVariant::Milp)
        }
    }

    /// The eight model variants.
    pub fn all_milp() -> Vec<Self> {
        FormulationConfig::all_variants()
            .into_iter()
            .map(BenchVariant::Milp)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: String,
    pub variant: String,
    pub status: Status,
    pub value: Option<f64>,
    pub bound: Option<f64>,
    pub gap: Option<f64>,
    pub nodes: u64,
    pub lp_count: u64,
    pub support_size: Option<usize>,
    pub wall_s: f64,
    pub bound_s: f64,
    pub note: String,
}

/// Columns that hold measured times.
pub const TIME_COLUMNS: [&str; 2] = ["wall_s", "bound_s"];

#[derive(Debug, Clone, Default)]
pub struct BenchConfig {
    pub solver: SolverConfig,
    pub oracle: OracleConfig,
    pub splitting: SplittingConfig,
    /// Instances processed concurrently.
    pub jobs: usize,
}

fn from_solution(instance: &str, variant: String, s: &StqpSolution, wall_s: f64, bound_s: f64) -> BenchRecord {
    BenchRecord {
        instance: instance.to_string(),
        variant,
        status: s.status,
        value: Some(s.value),
        bound: Some(s.best_bound),
        gap: Some(relative_gap(s.best_bound, s.value)),
        nodes: s.stats.nodes,
        lp_count: s.stats.lp_count,
        support_size: Some(s.support.len()),
        wall_s,
        bound_s,
        note: String::new(),
    }
}

fn failure(instance: &str, variant: String, wall_s: f64, msg: String) -> BenchRecord {
    BenchRecord {
        instance: instance.to_string(),
        variant,
        status: Status::Error,
        value: None,
        bound: None,
        gap: None,
        nodes: 0,
        lp_count: 0,
        support_size: None,
        wall_s,
        bound_s: 0.0,
        note: msg,
    }
}

/// All variants on one instance. The doubly nonnegative bound is computed at
/// most once and shared by every variant that needs it.
pub fn bench_instance(inst: &StqpInstance, variants: &[BenchVariant], cfg: &BenchConfig) -> Vec<BenchRecord> {
    let mut l2: Option<(Result<BoundCertificate>, f64)> = None;
    let get_l2 = |l2: &mut Option<(Result<BoundCertificate>, f64)>| {
        if l2.is_none() {
            let t = Instant::now();
            let r = lb2(inst, &cfg.splitting);
            *l2 = Some((r, t.elapsed().as_secs_f64()));
        }
        let (r, s) = l2.as_ref().unwrap();
        (r.as_ref().cloned().map_err(|e| e.to_string()), *s)
    };
    let mut out = Vec::with_capacity(variants.len());
    for v in variants {
        let label = v.label();
        let t = Instant::now();
        let rec = match v {
            BenchVariant::Oracle => match oracle_solve(inst, cfg.oracle) {
                Ok(s) => from_solution(&inst.name, label, &s, t.elapsed().as_secs_f64(), 0.0),
                Err(e) => failure(&inst.name, label, t.elapsed().as_secs_f64(), e.to_string()),
            },
            BenchVariant::Dnn => match get_l2(&mut l2) {
                (Ok(b), s) => BenchRecord {
                    instance: inst.name.clone(),
                    variant: label,
                    status: Status::Optimal,
                    value: None,
                    bound: Some(b.value),
                    gap: None,
                    nodes: 0,
                    lp_count: 0,
                    support_size: None,
                    wall_s: s,
                    bound_s: s,
                    note: String::new(),
                },
                (Err(e), s) => failure(&inst.name, label, s, e),
            },
            BenchVariant::Milp(fc) => {
                if let Some(s) = preprocess_trivial(inst) {
                    let mut r = from_solution(&inst.name, label, &s, t.elapsed().as_secs_f64(), 0.0);
                    r.note = "trivial".into();
                    r
                } else {
                    let (bound, bound_s) = match fc.bound_kind {
                        BoundChoice::L2 => get_l2(&mut l2),
                        BoundChoice::L1 => (variant_bound(inst, BoundChoice::L1).map_err(|e| e.to_string()), 0.0),
                    };
                    let t = Instant::now();
                    let solved = bound.and_then(|lb| {
                        let model = build_variant(inst, fc, &lb).map_err(|e| e.to_string())?;
                        solve_milp(&model, &cfg.solver).map_err(|e| e.to_string())
                    });
                    let wall = t.elapsed().as_secs_f64();
                    match solved {
                        Ok(s) => from_solution(&inst.name, label, &s, wall, bound_s),
                        Err(e) => failure(&inst.name, label, wall, e),
                    }
                }
            }
        };
        out.push(rec);
    }
    out
}

/// Records in instance-major order, independent of how many workers run.
pub fn bench_run(instances: &[StqpInstance], variants: &[BenchVariant], cfg: &BenchConfig) -> Vec<BenchRecord> {
    let jobs = cfg.jobs.max(1).min(instances.len().max(1));
    let slots: Vec<Mutex<Vec<BenchRecord>>> = instances.iter().map(|_| Mutex::new(Vec::new())).collect();
    let next = AtomicUsize::new(0);
    let work = || loop {
        let i = next.fetch_add(1, Ordering::SeqCst);
        if i >= instances.len() {
            break;
        }
        *slots[i].lock().unwrap() = bench_instance(&instances[i], variants, cfg);
    };
    if jobs == 1 {
        work();
    } else {
        std::thread::scope(|s| {
            for _ in 0..jobs {
                s.spawn(work);
            }
        });
    }
    slots.into_iter().flat_map(|m| m.into_inner().unwrap()).collect()
}

pub fn records_to_csv(records: &[BenchRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn records_from_csv(text: &str) -> Result<Vec<BenchRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in r.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

pub fn write_csv(path: impl AsRef<Path>, records: &[BenchRecord]) -> Result<()> {
    std::fs::write(path, records_to_csv(records)?)?;
    Ok(())
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<BenchRecord>> {
    records_from_csv(&std::fs::read_to_string(path)?)
}

pub fn write_json(path: impl AsRef<Path>, records: &[BenchRecord]) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(records)?)?;
    Ok(())
}

/// Drops the named columns from CSV text.
pub fn strip_csv_columns(text: &str, drop: &[&str]) -> Result<String> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers()?.clone();
    let keep: Vec<usize> = (0..headers.len()).filter(|&i| !drop.contains(&&headers[i])).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(keep.iter().map(|&i| &headers[i]))?;
    for rec in r.records() {
        let rec = rec?;
        w.write_record(keep.iter().map(|&i| &rec[i]))?;
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// One row of the per-variant table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub variant: String,
    pub total_time: f64,
    pub optimal: usize,
    pub time_limit: usize,
    /// Mean gap over TimeLimit records; `None` when there are none.
    pub average_gap: Option<f64>,
}

/// Groups by variant in order of first appearance.
pub fn summarize(records: &[BenchRecord]) -> Vec<SummaryRow> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<&str, Vec<&BenchRecord>> = HashMap::new();
    for r in records {
        if !groups.contains_key(r.variant.as_str()) {
            order.push(r.variant.clone());
        }
        groups.entry(r.variant.as_str()).or_default().push(r);
    }
    order
        .into_iter()
        .map(|v| {
            let g = &groups[v.as_str()];
            let gaps: Vec<f64> = g
                .iter()
                .filter(|r| r.status == Status::TimeLimit)
                .filter_map(|r| r.gap)
                .collect();
            SummaryRow {
                total_time: g.iter().map(|r| r.wall_s).sum(),
                optimal: g.iter().filter(|r| r.status == Status::Optimal).count(),
                time_limit: g.iter().filter(|r| r.status == Status::TimeLimit).count(),
                average_gap: if gaps.is_empty() {
                    None
                } else {
                    Some(gaps.iter().sum::<f64>() / gaps.len() as f64)
                },
                variant: v,
            }
        })
        .collect()
}

/// Fixed-width table; gaps in percent, `--` when there is nothing to average.
pub fn format_summary(rows: &[SummaryRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<14} {:>12} {:>6} {:>10} {:>12}",
        "Variant", "Total Time", "OPT", "Time Limit", "Average Gap"
    );
    for r in rows {
        let gap = r
            .average_gap
            .map_or_else(|| "--".to_string(), |g| format!("{:.2}%", 100.0 * g));
        let _ = writeln!(
            s,
            "{:<14} {:>12.2} {:>6} {:>10} {:>12}",
            r.variant, r.total_time, r.optimal, r.time_limit, gap
        );
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub variant: String,
    pub tau: f64,
    pub fraction: f64,
}

/// Time ratios per variant, `f64::INFINITY` where the variant did not solve
/// the instance. Only instances solved by some variant are kept.
pub fn performance_ratios(records: &[BenchRecord]) -> Vec<(String, Vec<f64>)> {
    let mut variants: Vec<String> = Vec::new();
    let mut instances: Vec<String> = Vec::new();
    let mut time: HashMap<(&str, &str), f64> = HashMap::new();
    for r in records.iter().filter(|r| r.variant != DNN_LABEL) {
        if !variants.contains(&r.variant) {
            variants.push(r.variant.clone());
        }
        if !instances.contains(&r.instance) {
            instances.push(r.instance.clone());
        }
        if r.status == Status::Optimal {
            time.insert((r.variant.as_str(), r.instance.as_str()), r.wall_s.max(1e-9));
        }
    }
    let best: Vec<Option<f64>> = instances
        .iter()
        .map(|i| {
            variants
                .iter()
                .filter_map(|v| time.get(&(v.as_str(), i.as_str())).copied())
                .reduce(f64::min)
        })
        .collect();
    variants
        .iter()
        .map(|v| {
            let ratios = instances
                .iter()
                .zip(&best)
                .filter_map(|(i, b)| {
                    let b = (*b)?;
                    Some(time.get(&(v.as_str(), i.as_str())).map_or(f64::INFINITY, |t| t / b))
                })
                .collect();
            (v.clone(), ratios)
        })
        .collect()
}

/// Cumulative fraction of instances each variant solves within ratio `tau`,
/// evaluated at every finite ratio observed for any variant.
pub fn performance_profile(records: &[BenchRecord]) -> Vec<ProfilePoint> {
    let ratios = performance_ratios(records);
    let mut taus: Vec<f64> = ratios
        .iter()
        .flat_map(|(_, r)| r.iter().copied())
        .filter(|t| t.is_finite())
        .collect();
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    let mut out = Vec::new();
    for (v, r) in &ratios {
        let total = r.len() as f64;
        for &tau in &taus {
            let hit = r.iter().filter(|&&x| x <= tau).count() as f64;
            out.push(ProfilePoint {
                variant: v.clone(),
                tau,
                fraction: if total > 0.0 { hit / total } else { 0.0 },
            });
        }
    }
    out
}

pub fn profile_to_csv(points: &[ProfilePoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in points {
        w.serialize(p)?;
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Step plot of the profile with a log2 ratio axis.
pub fn profile_svg(points: &[ProfilePoint]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 50.0;
    const COLORS: [&str; 8] = [
        "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
    ];
    let max_tau = points.iter().map(|p| p.tau).fold(1.0_f64, f64::max);
    let span = max_tau.log2().max(1.0);
    let sx = |t: f64| PAD + (W - 2.0 * PAD) * t.log2() / span;
    let sy = |f: f64| H - PAD - (H - 2.0 * PAD) * f;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{PAD},{} V{} H{}" stroke="black" fill="none"/>"#,
        PAD,
        H - PAD,
        W - PAD
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">log2(tau)</text>"#,
        W / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">fraction solved</text>"#,
        H / 2.0,
        H / 2.0
    );
    let mut variants: Vec<&str> = Vec::new();
    for p in points {
        if !variants.contains(&p.variant.as_str()) {
            variants.push(&p.variant);
        }
    }
    for (k, v) in variants.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut d = format!("M{:.2},{:.2}", sx(1.0), sy(0.0));
        for p in points.iter().filter(|p| p.variant == *v) {
            let _ = write!(d, " H{:.2} V{:.2}", sx(p.tau), sy(p.fraction));
        }
        let _ = write!(d, " H{:.2}", W - PAD);
        let _ = writeln!(s, r#"<path d="{d}" stroke="{color}" stroke-width="2" fill="none"/>"#);
        let y = PAD + 16.0 * k as f64;
        let _ = writeln!(s, r#"<text x="{}" y="{y}" fill="{color}">{v}</text>"#, W - PAD - 110.0);
    }
    s.push_str("</svg>\n");
    s
}
