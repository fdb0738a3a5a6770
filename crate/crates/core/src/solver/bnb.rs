//! Best-bound branch-and-bound over binary columns.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::{Arc, Condvar, Mutex};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::simplex::{Basis, LpProblem, LpResult, LpSolver, LpStatus};
use crate::error::{Error, Result};
use crate::milp::{MilpModel, VarKind};
use crate::solution::{relative_gap, SolveStats, Status};

/// A binary is fractional when its distance to the nearest integer exceeds this.
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NodeSelection {
    #[default]
    BestBound,
    DepthFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Branching {
    #[default]
    MostFractional,
    MaxPseudocost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub gap_tol: f64,
    pub time_limit_s: f64,
    pub node_selection: NodeSelection,
    pub branching: Branching,
    pub deterministic: bool,
    pub threads: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gap_tol: 1e-6,
            time_limit_s: 3600.0,
            node_selection: NodeSelection::BestBound,
            branching: Branching::MostFractional,
            deterministic: false,
            threads: 1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gap_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gap_tol must be positive, got {}",
                self.gap_tol
            )));
        }
        if !(self.time_limit_s > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "time_limit_s must be positive, got {}",
                self.time_limit_s
            )));
        }
        Ok(())
    }

    pub fn workers(&self) -> usize {
        if self.deterministic {
            1
        } else {
            self.threads.max(1)
        }
    }
}

/// Open subproblem: binaries fixed so far plus the bound inherited from its parent.
#[derive(Debug, Clone)]
pub struct BnbNode {
    /// `(column, value)` with value 0 or 1.
    pub fixings: Vec<(usize, u8)>,
    pub parent_bound: f64,
    pub depth: usize,
    id: u64,
    parent: Option<u64>,
    basis: Option<Arc<Basis>>,
    /// Branching record for pseudocost updates: column, up?, fractional distance, parent LP value.
    branched: Option<(usize, bool, f64, f64)>,
    order: (f64, usize, u64),
}

struct Queued {
    node: BnbNode,
    depth_first: bool,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    // BinaryHeap is a max-heap: "greater" pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        let (ba, da, sa) = self.node.order;
        let (bb, db, sb) = other.node.order;
        if self.depth_first {
            da.cmp(&db).then(sb.cmp(&sa))
        } else {
            bb.total_cmp(&ba).then(da.cmp(&db)).then(sb.cmp(&sa))
        }
    }
}

/// Feasible point for the objective being minimized.
#[derive(Debug, Clone, PartialEq)]
pub struct Incumbent {
    pub value: f64,
    /// Full column vector.
    pub values: Vec<f64>,
}

/// Branching outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchChoice {
    Variable(usize),
    /// Every binary is integral at this node.
    NoFractional,
}

/// Most-fractional binary among `binaries`; ties go to the earliest listed.
pub fn branch_select(lp: &LpResult, binaries: &[usize]) -> BranchChoice {
    most_fractional(&lp.values, binaries)
}

fn most_fractional(values: &[f64], binaries: &[usize]) -> BranchChoice {
    let mut best: Option<(usize, f64)> = None;
    for &j in binaries {
        let v = values[j];
        let f = v.min(1.0 - v).max(0.0);
        if f > INTEGRALITY_TOL && best.is_none_or(|(_, bf)| f > bf) {
            best = Some((j, f));
        }
    }
    match best {
        Some((j, _)) => BranchChoice::Variable(j),
        None => BranchChoice::NoFractional,
    }
}

#[derive(Debug, Clone, Default)]
struct Pseudocosts {
    up: Vec<(f64, u32)>,
    down: Vec<(f64, u32)>,
}

impl Pseudocosts {
    fn new(n: usize) -> Self {
        Self {
            up: vec![(0.0, 0); n],
            down: vec![(0.0, 0); n],
        }
    }

    fn record(&mut self, col: usize, up: bool, dist: f64, gain: f64) {
        if dist <= INTEGRALITY_TOL {
            return;
        }
        let e = if up { &mut self.up[col] } else { &mut self.down[col] };
        e.0 += gain.max(0.0) / dist;
        e.1 += 1;
    }

    fn mean(v: &[(f64, u32)]) -> f64 {
        let (s, c) = v
            .iter()
            .filter(|e| e.1 > 0)
            .fold((0.0, 0u32), |(s, c), e| (s + e.0 / e.1 as f64, c + 1));
        if c == 0 {
            1.0
        } else {
            s / c as f64
        }
    }

    fn select(&self, values: &[f64], binaries: &[usize]) -> BranchChoice {
        let mu = Self::mean(&self.up);
        let md = Self::mean(&self.down);
        let mut best: Option<(usize, f64)> = None;
        for &j in binaries {
            let v = values[j];
            if v.min(1.0 - v) <= INTEGRALITY_TOL {
                continue;
            }
            let pu = if self.up[j].1 > 0 {
                self.up[j].0 / self.up[j].1 as f64
            } else {
                mu
            };
            let pd = if self.down[j].1 > 0 {
                self.down[j].0 / self.down[j].1 as f64
            } else {
                md
            };
            let score = (pd * v).max(1e-6) * (pu * (1.0 - v)).max(1e-6);
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((j, score));
            }
        }
        match best {
            Some((j, _)) => BranchChoice::Variable(j),
            None => BranchChoice::NoFractional,
        }
    }
}

/// Outcome of a branch-and-bound run.
#[derive(Debug, Clone)]
pub struct MipOutcome {
    pub status: Status,
    pub incumbent: Option<Incumbent>,
    pub best_bound: f64,
    pub gap: f64,
    pub stats: SolveStats,
}

/// Callback run on every node LP solution; may return a better feasible point.
pub type HeuristicFn<'a> = dyn Fn(&[f64]) -> Option<Incumbent> + Sync + 'a;

struct Shared {
    heap: BinaryHeap<Queued>,
    incumbent: Option<Incumbent>,
    /// Smallest bound among nodes discarded by the gap test.
    pruned_min: f64,
    active: usize,
    active_bounds: Vec<(u64, f64)>,
    next_id: u64,
    nodes: u64,
    lp_count: u64,
    timed_out: bool,
    failure: Option<Error>,
    pseudo: Pseudocosts,
}

impl Shared {
    fn upper(&self) -> f64 {
        self.incumbent.as_ref().map_or(f64::INFINITY, |i| i.value)
    }

    fn offer(&mut self, cand: Incumbent) {
        if cand.value.is_finite() && cand.value < self.upper() {
            self.incumbent = Some(cand);
        }
    }
}

fn prune_threshold(upper: f64, gap_tol: f64) -> f64 {
    if upper.is_finite() {
        upper - gap_tol * (1e-10 + upper.abs())
    } else {
        f64::INFINITY
    }
}

/// Minimizes `model` by LP-based branch-and-bound on its binary columns.
pub fn solve_mip(
    model: &MilpModel,
    cfg: &SolverConfig,
    initial: Option<Incumbent>,
    heuristic: Option<&HeuristicFn<'_>>,
) -> Result<MipOutcome> {
    cfg.validate()?;
    let start = Instant::now();
    let prob = LpProblem::from_model(model);
    let binaries: Vec<usize> = model
        .variables
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Binary)
        .map(|(j, _)| j)
        .collect();
    let root = BnbNode {
        fixings: Vec::new(),
        parent_bound: f64::NEG_INFINITY,
        depth: 0,
        id: 0,
        parent: None,
        basis: None,
        branched: None,
        order: (f64::NEG_INFINITY, 0, 0),
    };
    let depth_first = cfg.node_selection == NodeSelection::DepthFirst;
    let mut heap = BinaryHeap::new();
    heap.push(Queued {
        node: root,
        depth_first,
    });
    let shared = Mutex::new(Shared {
        heap,
        incumbent: None,
        pruned_min: f64::INFINITY,
        active: 0,
        active_bounds: Vec::new(),
        next_id: 1,
        nodes: 0,
        lp_count: 0,
        timed_out: false,
        failure: None,
        pseudo: Pseudocosts::new(prob.num_struct),
    });
    if let Some(inc) = initial {
        shared.lock().unwrap().offer(inc);
    }
    let cv = Condvar::new();
    let workers = cfg.workers();
    let ctx = Ctx {
        prob: &prob,
        binaries: &binaries,
        cfg,
        start,
        shared: &shared,
        cv: &cv,
        heuristic,
        depth_first,
    };
    if workers == 1 {
        ctx.worker();
    } else {
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| ctx.worker());
            }
        });
    }
    let mut sh = shared.into_inner().unwrap();
    if let Some(e) = sh.failure.take() {
        return Err(e);
    }
    let upper = sh.upper();
    let mut lower = sh.pruned_min.min(upper);
    for q in sh.heap.iter() {
        lower = lower.min(q.node.parent_bound);
    }
    let stats = SolveStats {
        nodes: sh.nodes,
        lp_count: sh.lp_count,
        wall_s: start.elapsed().as_secs_f64(),
    };
    let status = if sh.timed_out && !sh.heap.is_empty() {
        Status::TimeLimit
    } else if sh.incumbent.is_none() {
        Status::InfeasibleModel
    } else {
        Status::Optimal
    };
    let gap = if upper.is_finite() && lower.is_finite() {
        relative_gap(lower, upper)
    } else {
        f64::INFINITY
    };
    Ok(MipOutcome {
        status,
        incumbent: sh.incumbent,
        best_bound: lower,
        gap,
        stats,
    })
}

struct Ctx<'a, 'h> {
    prob: &'a LpProblem,
    binaries: &'a [usize],
    cfg: &'a SolverConfig,
    start: Instant,
    shared: &'a Mutex<Shared>,
    cv: &'a Condvar,
    heuristic: Option<&'a HeuristicFn<'h>>,
    depth_first: bool,
}

impl<'a> Ctx<'a, '_> {
    fn worker(&self) {
        let mut lp = LpSolver::new(self.prob);
        let mut last_solved: Option<u64> = None;
        loop {
            let node = {
                let mut sh = self.shared.lock().unwrap();
                loop {
                    if sh.failure.is_some() || sh.timed_out {
                        return;
                    }
                    if self.start.elapsed().as_secs_f64() >= self.cfg.time_limit_s {
                        sh.timed_out = true;
                        self.cv.notify_all();
                        return;
                    }
                    let threshold = prune_threshold(sh.upper(), self.cfg.gap_tol);
                    match sh.heap.pop() {
                        Some(q) => {
                            if q.node.parent_bound >= threshold {
                                sh.pruned_min = sh.pruned_min.min(q.node.parent_bound);
                                continue;
                            }
                            sh.active += 1;
                            sh.active_bounds.push((q.node.id, q.node.parent_bound));
                            break q.node;
                        }
                        None if sh.active == 0 => {
                            self.cv.notify_all();
                            return;
                        }
                        None => {
                            sh = self.cv.wait(sh).unwrap();
                        }
                    }
                }
            };
            let outcome = self.process(&mut lp, &mut last_solved, &node);
            let mut sh = self.shared.lock().unwrap();
            sh.active -= 1;
            sh.active_bounds.retain(|&(id, _)| id != node.id);
            match outcome {
                Ok(done) => self.commit(&mut sh, &node, done),
                Err(e) => {
                    sh.failure.get_or_insert(e);
                }
            }
            self.cv.notify_all();
        }
    }

    fn process(&self, lp: &mut LpSolver<'a>, last: &mut Option<u64>, node: &BnbNode) -> Result<NodeResult> {
        lp.reset_bounds();
        for &(j, v) in &node.fixings {
            lp.set_bounds(j, v as f64, v as f64);
        }
        let warm = node.parent.is_some() && *last == node.parent;
        if !warm {
            if let Some(b) = &node.basis {
                lp.load_basis(b);
            }
        }
        let res = lp.solve();
        let res = match res {
            Ok(r) => r,
            Err(_) => {
                // Retry from scratch once.
                let mut fresh = LpSolver::new(self.prob);
                for &(j, v) in &node.fixings {
                    fresh.set_bounds(j, v as f64, v as f64);
                }
                let r = fresh.solve()?;
                *lp = fresh;
                r
            }
        };
        *last = Some(node.id);
        let cand = match (res.status, self.heuristic) {
            (LpStatus::Optimal, Some(h)) => h(&res.values),
            _ => None,
        };
        Ok(NodeResult { lp: res, cand })
    }

    fn commit(&self, sh: &mut Shared, node: &BnbNode, done: NodeResult) {
        sh.nodes += 1;
        sh.lp_count += 1;
        let NodeResult { lp, cand } = done;
        match lp.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return,
            LpStatus::Unbounded => {
                sh.failure
                    .get_or_insert(Error::NumericalFailure("unbounded LP relaxation".into()));
                return;
            }
        }
        if let Some((col, up, dist, parent_obj)) = node.branched {
            sh.pseudo.record(col, up, dist, lp.objective - parent_obj);
        }
        if let Some(c) = cand {
            sh.offer(c);
        }
        let bound = lp.objective.max(node.parent_bound);
        let choice = match self.cfg.branching {
            Branching::MostFractional => most_fractional(&lp.values, self.binaries),
            Branching::MaxPseudocost => sh.pseudo.select(&lp.values, self.binaries),
        };
        let col = match choice {
            BranchChoice::NoFractional => {
                let mut values = lp.values;
                for &j in self.binaries {
                    values[j] = values[j].round();
                }
                sh.offer(Incumbent {
                    value: lp.objective,
                    values,
                });
                return;
            }
            BranchChoice::Variable(j) => j,
        };
        if bound >= prune_threshold(sh.upper(), self.cfg.gap_tol) {
            sh.pruned_min = sh.pruned_min.min(bound);
            return;
        }
        let basis = Arc::new(lp.basis);
        let v = lp.values[col];
        for (val, dist) in [(1u8, 1.0 - v), (0u8, v)] {
            let id = sh.next_id;
            sh.next_id += 1;
            let mut fixings = node.fixings.clone();
            fixings.push((col, val));
            let child = BnbNode {
                fixings,
                parent_bound: bound,
                depth: node.depth + 1,
                id,
                parent: Some(node.id),
                basis: Some(basis.clone()),
                branched: Some((col, val == 1, dist, lp.objective)),
                order: (bound, node.depth + 1, id),
            };
            sh.heap.push(Queued {
                node: child,
                depth_first: self.depth_first,
            });
        }
    }
}

struct NodeResult {
    lp: LpResult,
    cand: Option<Incumbent>,
}
