//! Convexity graphs, plain graphs, clique enumeration and the stable-set
//! reduction.
//!
//! The convexity graph of `Q` joins `i` and `j` exactly when `x'Qx` is strictly
//! convex on the simplex edge between `e_i` and `e_j`, i.e. when
//! `Q_ii + Q_jj - 2 Q_ij > 0`. Some global minimizer is supported on a clique
//! of this graph, so every non-edge `(i, j)` yields the cut `y_i + y_j <= 1`.

use crate::error::{Error, Result};
use crate::instance::{Origin, StqpInstance};
use crate::matrix::SymmetricMatrix;

/// Undirected graph on `0..n` stored as a dense adjacency matrix plus a sorted
/// edge list with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<bool>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj = vec![false; n * n];
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a}, {b}) out of range for {n} nodes"
                )));
            }
            if a == b {
                return Err(Error::InvalidParameter(format!("self-loop at node {a}")));
            }
            adj[a * n + b] = true;
            adj[b * n + a] = true;
        }
        Ok(Self::from_adjacency(n, adj))
    }

    fn from_adjacency(n: usize, adj: Vec<bool>) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if adj[i * n + j] {
                    edges.push((i, j));
                }
            }
        }
        Self { n, edges, adj }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_adjacency(n, vec![false; n * n])
    }

    pub fn complete(n: usize) -> Self {
        let mut adj = vec![true; n * n];
        for k in 0..n {
            adj[k * n + k] = false;
        }
        Self::from_adjacency(n, adj)
    }

    pub fn cycle(n: usize) -> Self {
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle needs n >= 3")
    }

    /// The Petersen graph: outer 5-cycle, inner pentagram, five spokes.
    pub fn petersen() -> Self {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        Self::new(10, outer.chain(inner).chain(spokes)).unwrap()
    }

    pub fn complement(&self) -> Self {
        let n = self.n;
        let mut adj = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                adj[i * n + j] = i != j && !self.adj[i * n + j];
            }
        }
        Self::from_adjacency(n, adj)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.n + j]
    }

    /// `|E| / (n(n-1)/2)`, with density 1 for a single node.
    pub fn density(&self) -> f64 {
        if self.n <= 1 {
            return 1.0;
        }
        self.edges.len() as f64 / (self.n * (self.n - 1) / 2) as f64
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.adj[i * self.n + j])
    }

    /// Visits every clique (not only maximal ones) exactly once, in
    /// lexicographic order, skipping cliques larger than `max_size`.
    ///
    /// Fails once more than `cap` cliques have been visited.
    pub fn for_each_clique<F>(&self, max_size: usize, cap: usize, mut visit: F) -> Result<usize>
    where
        F: FnMut(&[usize]),
    {
        let mut count = 0usize;
        let mut clique = Vec::new();
        let all: Vec<usize> = (0..self.n).collect();
        self.extend_cliques(&mut clique, &all, max_size, cap, &mut count, &mut visit)?;
        Ok(count)
    }

    fn extend_cliques<F>(
        &self,
        clique: &mut Vec<usize>,
        candidates: &[usize],
        max_size: usize,
        cap: usize,
        count: &mut usize,
        visit: &mut F,
    ) -> Result<()>
    where
        F: FnMut(&[usize]),
    {
        if clique.len() >= max_size {
            return Ok(());
        }
        for (pos, &v) in candidates.iter().enumerate() {
            clique.push(v);
            *count += 1;
            if *count > cap {
                return Err(Error::EnumerationBudgetExceeded { cap });
            }
            visit(clique);
            let next: Vec<usize> = candidates[pos + 1..]
                .iter()
                .copied()
                .filter(|&w| self.has_edge(v, w))
                .collect();
            if !next.is_empty() {
                self.extend_cliques(clique, &next, max_size, cap, count, visit)?;
            }
            clique.pop();
        }
        Ok(())
    }
}

/// Convexity graph of a symmetric matrix together with its non-edges.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityGraph {
    pub graph: SimpleGraph,
    pub density: f64,
}

impl ConvexityGraph {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        self.graph.edges()
    }
}

#[inline]
pub fn convexity_discriminant(q: &SymmetricMatrix, i: usize, j: usize) -> f64 {
    q.get(i, i) + q.get(j, j) - 2.0 * q.get(i, j)
}

pub fn build_convexity_graph(inst: &StqpInstance) -> ConvexityGraph {
    let q = &inst.q;
    let n = q.n();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if convexity_discriminant(q, i, j) > 0.0 {
                edges.push((i, j));
            }
        }
    }
    let graph = SimpleGraph::new(n, edges).expect("indices in range");
    let density = graph.density();
    ConvexityGraph { graph, density }
}

/// Pairs `(i, j)`, `i < j`, that are not edges of the convexity graph.
pub fn valid_inequality_pairs(g: &ConvexityGraph) -> Vec<(usize, usize)> {
    let n = g.n();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2 - g.edges().len());
    for i in 0..n {
        for j in i + 1..n {
            if !g.graph.has_edge(i, j) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Stable-set reduction: `Q = I + A_G`, whose optimal value is `1 / alpha(G)`.
pub fn motzkin_straus(g: &SimpleGraph) -> StqpInstance {
    let n = g.n();
    let mut q = SymmetricMatrix::identity(n);
    for &(i, j) in g.edges() {
        q.set(i, j, 1.0);
    }
    StqpInstance {
        name: format!("ms-{n}"),
        origin: Origin::ReducedFromGraph,
        q,
    }
}

pub const ALPHA_MAX_NODES: usize = 25;

/// Exact stability number by branch and bound over node bitmasks.
pub fn alpha_bruteforce(g: &SimpleGraph) -> Result<usize> {
    let n = g.n();
    if n > ALPHA_MAX_NODES {
        return Err(Error::SizeLimitExceeded {
            what: "exhaustive stable set search",
            n,
            limit: ALPHA_MAX_NODES,
        });
    }
    let closed: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).fold(1u32 << v, |m, w| m | (1 << w)))
        .collect();
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut best = 0;
    mis(full, 0, &closed, &mut best);
    Ok(best)
}

fn mis(cand: u32, size: usize, closed: &[u32], best: &mut usize) {
    if cand == 0 {
        *best = (*best).max(size);
        return;
    }
    if size + cand.count_ones() as usize <= *best {
        return;
    }
    // Branch on the candidate with most neighbours inside `cand`; an isolated
    // candidate is always taken.
    let mut pick = cand.trailing_zeros() as usize;
    let mut pick_deg = 0;
    let mut rest = cand;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let deg = (closed[v] & cand).count_ones() - 1;
        if deg == 0 {
            mis(cand & !(1 << v), size + 1, closed, best);
            return;
        }
        if deg > pick_deg {
            pick = v;
            pick_deg = deg;
        }
    }
    mis(cand & !closed[pick], size + 1, closed, best);
    mis(cand & !(1 << pick), size, closed, best);
}
