//! `stqp` command-line tool.

mod config;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use stqp::bench::{
    bench_run, format_summary, performance_profile, profile_svg, profile_to_csv, read_csv, summarize, write_csv,
    write_json, BenchConfig, BenchVariant,
};
use stqp::bounds::{big_m, lb1, lb2, SplittingConfig};
use stqp::gen::{gen_blst_batch, gen_st_density, DensitySpec, TriangularSpec};
use stqp::graph::{alpha_bruteforce, motzkin_straus, ALPHA_MAX_NODES};
use stqp::instance::preprocess_trivial;
use stqp::io::{load_dimacs, load_instance, save_instance};
use stqp::milp::{build_stable_set_ilp, build_variant, export_lp_text, BoundChoice, Formulation, FormulationConfig};
use stqp::oracle::{oracle_solve, OracleConfig};
use stqp::solver::{solve_milp, solve_mip, variant_bound, Branching, NodeSelection, SolverConfig};
use stqp::{Error, Status, StqpSolution};

use config::Settings;

const EXIT_PARSE: u8 = 2;
const EXIT_TIME_LIMIT: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "stqp", version, about = "Global solver for standard quadratic programs")]
struct Cli {
    /// `key = value` file; keys are the long flag names.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with one model variant.
    Solve(SolveArgs),
    /// Print both lower bounds, residuals and big-M constants.
    Bound { instance: PathBuf },
    /// Solve by support enumeration.
    Oracle { instance: PathBuf },
    /// Write random instances.
    Generate(GenerateArgs),
    /// Run variants over instances and write CSV/JSON reports.
    Bench(BenchArgs),
    /// Performance profile from a bench CSV.
    Profile(ProfileArgs),
    /// Stable-set ILP next to the Motzkin-Straus reduction for a DIMACS graph.
    Stableset(StablesetArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Milp1,
    Milp2,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundArg {
    L1,
    L2,
}

#[derive(Clone, Copy, ValueEnum)]
enum NodeSelArg {
    BestBound,
    DepthFirst,
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    MostFractional,
    MaxPseudocost,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Blst,
    St,
}

macro_rules! from_str_via_value_enum {
    ($($t:ty),*) => {$(
        impl FromStr for $t {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                <$t as ValueEnum>::from_str(s, true)
            }
        }
    )*};
}
from_str_via_value_enum!(FormArg, BoundArg, NodeSelArg, BranchArg);

#[derive(Args, Clone, Default)]
struct SolverArgs {
    #[arg(long)]
    gap: Option<f64>,
    /// Wall-clock seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    deterministic: bool,
    #[arg(long, value_enum)]
    node_selection: Option<NodeSelArg>,
    #[arg(long, value_enum)]
    branching: Option<BranchArg>,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum)]
    formulation: Option<FormArg>,
    #[arg(long, value_enum)]
    bound: Option<BoundArg>,
    /// Add the convexity-graph valid inequalities.
    #[arg(long)]
    vi: bool,
    #[arg(long)]
    export_lp: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    n: usize,
    /// `a,c,b` for blst (default 0,0.5,1); the density for st.
    #[arg(long)]
    params: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Write the JSON form instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance files or directories.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Comma-separated labels such as MILP1-L2-VI, ORACLE, DNN; default all eight models.
    #[arg(long)]
    variants: Option<String>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    /// Instances solved concurrently.
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct ProfileArgs {
    records: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct StablesetArgs {
    graph: PathBuf,
    /// Use the complement graph.
    #[arg(long)]
    complement: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::Json(_)
            | Error::Csv(_)
            | Error::Dimension { .. }
            | Error::NotSymmetric { .. }
            | Error::NonFinite { .. }
            | Error::Empty
            | Error::InvalidParameter(_)
            | Error::Io(_) => EXIT_PARSE,
            _ => EXIT_INTERNAL,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let settings = Settings::load(cli.config.as_deref())?;
    match cli.command {
        Command::Solve(a) => cmd_solve(&settings, a),
        Command::Bound { instance } => cmd_bound(&instance),
        Command::Oracle { instance } => cmd_oracle(&instance),
        Command::Generate(a) => cmd_generate(a),
        Command::Bench(a) => cmd_bench(&settings, a),
        Command::Profile(a) => cmd_profile(a),
        Command::Stableset(a) => cmd_stableset(&settings, a),
    }
}

fn solver_config(s: &Settings, a: &SolverArgs) -> Result<SolverConfig, Error> {
    let d = SolverConfig::default();
    let cfg = SolverConfig {
        gap_tol: s.get("gap", a.gap, d.gap_tol)?,
        time_limit_s: s.get("time-limit", a.time_limit, d.time_limit_s)?,
        threads: s.get("threads", a.threads, d.threads)?,
        deterministic: s.flag("deterministic", a.deterministic)?,
        node_selection: match s.get("node-selection", a.node_selection, NodeSelArg::BestBound)? {
            NodeSelArg::BestBound => NodeSelection::BestBound,
            NodeSelArg::DepthFirst => NodeSelection::DepthFirst,
        },
        branching: match s.get("branching", a.branching, BranchArg::MostFractional)? {
            BranchArg::MostFractional => Branching::MostFractional,
            BranchArg::MaxPseudocost => Branching::MaxPseudocost,
        },
    };
    cfg.validate()?;
    Ok(cfg)
}

fn solution_json(s: &StqpSolution) -> Value {
    json!({
        "value": s.value,
        "bound": s.best_bound,
        "gap": s.gap,
        "support": s.support,
        "x": s.x.as_slice(),
        "status": s.status.to_string(),
        "nodes": s.stats.nodes,
        "lp_count": s.stats.lp_count,
        "wall_s": s.stats.wall_s,
    })
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print_json(v: &Value) {
    emit(&format!(
        "{}\n",
        serde_json::to_string_pretty(v).expect("json values serialize")
    ));
}

fn exit_for(s: &StqpSolution, gap_tol: f64) -> u8 {
    match s.status {
        Status::TimeLimit if s.gap > gap_tol => EXIT_TIME_LIMIT,
        Status::Error | Status::InfeasibleModel => EXIT_INTERNAL,
        _ => 0,
    }
}

fn cmd_solve(s: &Settings, a: SolveArgs) -> Result<u8, Failure> {
    let scfg = solver_config(s, &a.solver)?;
    let formulation = match s.get("formulation", a.formulation, FormArg::Milp1)? {
        FormArg::Milp1 => Formulation::Milp1,
        FormArg::Milp2 => Formulation::Milp2,
    };
    let bound = match s.get("bound", a.bound, BoundArg::L1)? {
        BoundArg::L1 => BoundChoice::L1,
        BoundArg::L2 => BoundChoice::L2,
    };
    let fcfg = FormulationConfig::new(formulation, bound, s.flag("vi", a.vi)?);
    let export = match a.export_lp {
        Some(p) => Some(p),
        None => s
            .get::<String>("export-lp", None, String::new())
            .map(|v| (!v.is_empty()).then(|| v.into()))?,
    };
    let inst = load_instance(&a.instance)?;
    let start = Instant::now();
    let trivial = preprocess_trivial(&inst);
    let model = if export.is_some() || trivial.is_none() {
        let lb = variant_bound(&inst, fcfg.bound_kind)?;
        Some(build_variant(&inst, &fcfg, &lb)?)
    } else {
        None
    };
    if let (Some(path), Some(m)) = (&export, &model) {
        std::fs::write(path, export_lp_text(m)).map_err(Error::from)?;
    }
    let mut sol = match (trivial, &model) {
        (Some(t), _) => t,
        (None, Some(m)) => solve_milp(m, &scfg)?,
        (None, None) => unreachable!("model is built whenever preprocessing fails"),
    };
    sol.stats.wall_s = start.elapsed().as_secs_f64();
    let mut out = solution_json(&sol);
    out["instance"] = json!(inst.name);
    out["variant"] = json!(fcfg.label());
    print_json(&out);
    Ok(exit_for(&sol, scfg.gap_tol))
}

fn cmd_bound(path: &Path) -> Result<u8, Failure> {
    let inst = load_instance(path)?;
    let l1 = lb1(&inst);
    let l2 = lb2(&inst, &SplittingConfig::default())?;
    let dual = l2.dual.as_ref();
    let out = json!({
        "instance": inst.name,
        "n": inst.n(),
        "gamma0": inst.q.min_entry(),
        "gamma1": inst.q.min_diag(),
        "l1": l1.value,
        "l2": l2.value,
        "residuals": dual.map(|d| json!({
            "primal": d.residuals.primal,
            "dual": d.residuals.dual,
            "shift": d.residuals.shift,
            "identity": d.identity_residual(&inst.q, l2.value),
        })),
        "iterations": dual.map(|d| d.iterations),
        "converged": dual.map(|d| d.converged),
        "big_m": big_m(&inst, &l2).m,
        "big_m_l1": big_m(&inst, &l1).m,
    });
    print_json(&out);
    Ok(0)
}

fn cmd_oracle(path: &Path) -> Result<u8, Failure> {
    let inst = load_instance(path)?;
    let sol = oracle_solve(&inst, OracleConfig::default())?;
    let mut out = solution_json(&sol);
    out["instance"] = json!(inst.name);
    out["variant"] = json!("ORACLE");
    print_json(&out);
    Ok(0)
}

fn parse_floats(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad number `{t}` in --params")))
        })
        .collect()
}

fn cmd_generate(a: GenerateArgs) -> Result<u8, Failure> {
    std::fs::create_dir_all(&a.out_dir).map_err(Error::from)?;
    let ext = if a.json { "json" } else { "txt" };
    let mut files = Vec::new();
    let mut summary = json!({"family": match a.family { Family::Blst => "blst", Family::St => "st" }, "n": a.n});
    match a.family {
        Family::Blst => {
            let p = parse_floats(a.params.as_deref().unwrap_or("0,0.5,1"))?;
            let [lo, mode, hi] = p[..] else {
                return Err(Error::InvalidParameter("blst --params needs a,c,b".into()).into());
            };
            let spec = TriangularSpec::new(lo, mode, hi, a.seed)?;
            let batch = gen_blst_batch(a.n, spec, a.count)?;
            for inst in &batch.instances {
                let path = a.out_dir.join(format!("{}.{ext}", inst.name));
                save_instance(inst, &path)?;
                files.push(path.display().to_string());
            }
            summary["trivial"] = json!(batch.trivial);
            summary["trivial_fraction"] = json!(batch.trivial_fraction());
        }
        Family::St => {
            let p = parse_floats(a.params.as_deref().unwrap_or("0.5"))?;
            let [density] = p[..] else {
                return Err(Error::InvalidParameter("st --params needs one density".into()).into());
            };
            for k in 0..a.count {
                let inst = gen_st_density(DensitySpec {
                    n: a.n,
                    target_density: density,
                    seed: a.seed.wrapping_add(k as u64),
                })?;
                let path = a.out_dir.join(format!("{}.{ext}", inst.name));
                save_instance(&inst, &path)?;
                files.push(path.display().to_string());
            }
        }
    }
    summary["files"] = json!(files);
    print_json(&summary);
    Ok(0)
}

fn collect_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Error> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(p)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|e| e == "txt" || e == "json" || e == "stqp"))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn cmd_bench(s: &Settings, a: BenchArgs) -> Result<u8, Failure> {
    let solver = solver_config(s, &a.solver)?;
    let variants = match a.variants.or(s
        .get::<String>("variants", None, String::new())
        .ok()
        .filter(|v| !v.is_empty()))
    {
        None => BenchVariant::all_milp(),
        Some(list) => list
            .split(',')
            .map(|l| {
                BenchVariant::from_label(l.trim())
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown variant `{}`", l.trim())))
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    let jobs = if solver.deterministic {
        1
    } else {
        s.get("jobs", a.jobs, 1usize)?
    };
    let instances = collect_inputs(&a.inputs)?
        .iter()
        .map(load_instance)
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = BenchConfig {
        solver,
        jobs,
        ..Default::default()
    };
    let records = bench_run(&instances, &variants, &cfg);
    if let Some(p) = &a.csv {
        write_csv(p, &records)?;
    }
    if let Some(p) = &a.json {
        write_json(p, &records)?;
    }
    emit(&format_summary(&summarize(&records)));
    let timed_out = records
        .iter()
        .any(|r| r.status == Status::TimeLimit && r.gap.is_some_and(|g| g > cfg.solver.gap_tol));
    let failed = records.iter().any(|r| r.status == Status::Error);
    Ok(if failed {
        EXIT_INTERNAL
    } else if timed_out {
        EXIT_TIME_LIMIT
    } else {
        0
    })
}

fn cmd_profile(a: ProfileArgs) -> Result<u8, Failure> {
    let records = read_csv(&a.records)?;
    let points = performance_profile(&records);
    let csv = profile_to_csv(&points)?;
    match &a.out {
        Some(p) => std::fs::write(p, csv).map_err(Error::from)?,
        None => emit(&csv),
    }
    if let Some(p) = &a.svg {
        std::fs::write(p, profile_svg(&points)).map_err(Error::from)?;
    }
    Ok(0)
}

fn cmd_stableset(s: &Settings, a: StablesetArgs) -> Result<u8, Failure> {
    let scfg = solver_config(s, &a.solver)?;
    let g = load_dimacs(&a.graph, a.complement)?;
    let t = Instant::now();
    let ilp = solve_mip(&build_stable_set_ilp(&g), &scfg, None, None)?;
    let ilp_s = t.elapsed().as_secs_f64();
    let alpha_ilp = ilp.incumbent.as_ref().map(|i| (-i.value).round() as i64);
    let inst = motzkin_straus(&g);
    let t = Instant::now();
    let ms = match preprocess_trivial(&inst) {
        Some(sol) => sol,
        None => {
            let lb = variant_bound(&inst, BoundChoice::L1)?;
            let model = build_variant(
                &inst,
                &FormulationConfig::new(Formulation::Milp2, BoundChoice::L1, true),
                &lb,
            )?;
            solve_milp(&model, &scfg)?
        }
    };
    let ms_s = t.elapsed().as_secs_f64();
    let alpha_ms = (1.0 / ms.value).round() as i64;
    let brute = if g.n() <= ALPHA_MAX_NODES {
        Some(alpha_bruteforce(&g)?)
    } else {
        None
    };
    let out = json!({
        "n": g.n(),
        "edges": g.edges().len(),
        "complement": a.complement,
        "ilp": {"alpha": alpha_ilp, "status": ilp.status.to_string(), "nodes": ilp.stats.nodes, "wall_s": ilp_s},
        "motzkin_straus": {
            "value": ms.value,
            "alpha": alpha_ms,
            "support": ms.support,
            "status": ms.status.to_string(),
            "nodes": ms.stats.nodes,
            "wall_s": ms_s,
        },
        "alpha_bruteforce": brute,
        "consistent": alpha_ilp == Some(alpha_ms),
    });
    print_json(&out);
    let limited = [ilp.status, ms.status].contains(&Status::TimeLimit);
    Ok(if limited { EXIT_TIME_LIMIT } else { 0 })
}
