//! Seeded instance generators.
//!
//! Every generator draws from `ChaCha8Rng::seed_from_u64(seed)`, so outputs are
//! identical across platforms for the same arguments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Triangular};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::instance::{preprocess_trivial, Origin, StqpInstance};
use crate::matrix::SymmetricMatrix;

/// Resampling attempts before [`gen_st_density`] gives up.
pub const REJECTION_CAP: usize = 1000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Triangular distribution `(a, c, b)` = (min, mode, max).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangularSpec {
    pub a: f64,
    pub c: f64,
    pub b: f64,
    pub seed: u64,
}

impl TriangularSpec {
    pub fn new(a: f64, c: f64, b: f64, seed: u64) -> Result<Self> {
        let s = Self { a, c, b, seed };
        s.validate()?;
        Ok(s)
    }

    /// `(0, 0.5, 1)`.
    pub fn standard(seed: u64) -> Self {
        Self {
            a: 0.0,
            c: 0.5,
            b: 1.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.a, self.b, self.c].iter().all(|v| v.is_finite())
            && self.a < self.b
            && self.a <= self.c
            && self.c <= self.b;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "triangular parameters need a <= c <= b and a < b, got ({}, {}, {})",
                self.a, self.c, self.b
            )))
        }
    }

    pub fn mean(&self) -> f64 {
        (self.a + self.b + self.c) / 3.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensitySpec {
    pub n: usize,
    pub target_density: f64,
    pub seed: u64,
}

impl DensitySpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!("n must be at least 2, got {}", self.n)));
        }
        if !(0.0..=1.0).contains(&self.target_density) {
            return Err(Error::InvalidParameter(format!(
                "density must lie in [0, 1], got {}",
                self.target_density
            )));
        }
        Ok(())
    }
}

/// Symmetric matrix with i.i.d. triangular entries on and above the diagonal.
pub fn gen_blst(n: usize, spec: TriangularSpec) -> Result<StqpInstance> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
    }
    spec.validate()?;
    let dist = Triangular::new(spec.a, spec.b, spec.c).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = rng(spec.seed);
    let mut q = SymmetricMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            q.set(i, j, dist.sample(&mut rng));
        }
    }
    StqpInstance::new(format!("blst-n{n}-s{}", spec.seed), q, Origin::Generated)
}

/// A batch of BLST instances with consecutive seeds and the share that
/// preprocessing solves outright.
#[derive(Debug, Clone)]
pub struct BlstBatch {
    pub instances: Vec<StqpInstance>,
    pub trivial: usize,
}

impl BlstBatch {
    pub fn trivial_fraction(&self) -> f64 {
        if self.instances.is_empty() {
            0.0
        } else {
            self.trivial as f64 / self.instances.len() as f64
        }
    }
}

pub fn gen_blst_batch(n: usize, spec: TriangularSpec, count: usize) -> Result<BlstBatch> {
    let mut instances = Vec::with_capacity(count);
    let mut trivial = 0;
    for k in 0..count {
        let inst = gen_blst(
            n,
            TriangularSpec {
                seed: spec.seed.wrapping_add(k as u64),
                ..spec
            },
        )?;
        if preprocess_trivial(&inst).is_some() {
            trivial += 1;
        }
        instances.push(inst);
    }
    Ok(BlstBatch { instances, trivial })
}

/// Erdős–Rényi graph `G(n, p)`: each pair independently with probability `p`.
pub fn random_graph(n: usize, p: f64, rng: &mut impl Rng) -> SimpleGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    SimpleGraph::new(n, edges).expect("pairs are in range and distinct")
}

/// Instance whose convexity graph is a sampled `G(n, δ)`.
///
/// Values are redrawn (keeping the graph) until the smallest entry is off the
/// diagonal. An edgeless graph forces every off-diagonal entry above the
/// diagonal, so that case is returned as is.
pub fn gen_st_density(spec: DensitySpec) -> Result<StqpInstance> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = rng(spec.seed);
    let g = random_graph(n, spec.target_density, &mut rng);
    let name = format!("st-n{n}-d{}-s{}", spec.target_density, spec.seed);
    for _ in 0..REJECTION_CAP {
        let q = st_values(&g, &mut rng);
        let inst = StqpInstance::new(name.clone(), q, Origin::Generated)?;
        if g.edges().is_empty() || preprocess_trivial(&inst).is_none() {
            return Ok(inst);
        }
    }
    Err(Error::RejectionCapExceeded(REJECTION_CAP))
}

fn st_values(g: &SimpleGraph, rng: &mut ChaCha8Rng) -> SymmetricMatrix {
    let n = g.n();
    let mut q = SymmetricMatrix::zeros(n);
    let diag: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..=2.0)).collect();
    for (k, &d) in diag.iter().enumerate() {
        q.set(k, k, d);
    }
    for i in 0..n {
        for j in i + 1..n {
            let mid = 0.5 * (diag[i] + diag[j]);
            let v = if g.has_edge(i, j) {
                rng.random_range(0.0..=mid - 0.1)
            } else {
                rng.random_range(mid + 0.1..=mid + 1.0)
            };
            q.set(i, j, v);
        }
    }
    q
}

/// Entries i.i.d. uniform on `[lo, hi]`.
pub fn gen_uniform(n: usize, lo: f64, hi: f64, seed: u64) -> Result<StqpInstance> {
    if !(lo < hi) || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "need n >= 1 and lo < hi, got n={n}, [{lo}, {hi}]"
        )));
    }
    let mut rng = rng(seed);
    let mut q = SymmetricMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            q.set(i, j, rng.random_range(lo..=hi));
        }
    }
    StqpInstance::new(format!("unif-n{n}-s{seed}"), q, Origin::Generated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_convexity_graph, valid_inequality_pairs};

    #[test]
    fn blst_support_and_determinism() {
        let a = gen_blst(12, TriangularSpec::standard(7)).unwrap();
        let b = gen_blst(12, TriangularSpec::standard(7)).unwrap();
        assert_eq!(a, b);
        for i in 0..12 {
            for j in 0..12 {
                let v = a.q.get(i, j);
                assert!((0.0..=1.0).contains(&v));
            }
        }
        assert_ne!(a.q, gen_blst(12, TriangularSpec::standard(8)).unwrap().q);
    }

    #[test]
    fn blst_sample_mean() {
        // Variance of Triangular(a, c, b) is (a² + b² + c² - ab - ac - bc) / 18.
        let spec = TriangularSpec::new(-1.0, 0.2, 2.0, 3).unwrap();
        let mut sum = 0.0;
        let mut count = 0usize;
        let mut seed = 0;
        while count < 10_000 {
            let inst = gen_blst(30, TriangularSpec { seed, ..spec }).unwrap();
            for i in 0..30 {
                for j in i..30 {
                    sum += inst.q.get(i, j);
                    count += 1;
                }
            }
            seed += 1;
        }
        let (a, b, c) = (spec.a, spec.b, spec.c);
        let var = (a * a + b * b + c * c - a * b - a * c - b * c) / 18.0;
        let sigma = (var / count as f64).sqrt();
        assert!((sum / count as f64 - spec.mean()).abs() <= 3.0 * sigma);
    }

    #[test]
    fn invalid_specs() {
        assert!(TriangularSpec::new(1.0, 1.0, 1.0, 0).is_err());
        assert!(TriangularSpec::new(0.0, 2.0, 1.0, 0).is_err());
        assert!(gen_blst(1, TriangularSpec::standard(0)).is_err());
        assert!(gen_st_density(DensitySpec {
            n: 5,
            target_density: 1.5,
            seed: 0
        })
        .is_err());
    }

    #[test]
    fn st_density_is_exact() {
        for (k, d) in [0.0, 0.2, 0.5, 0.8, 1.0].into_iter().enumerate() {
            let spec = DensitySpec {
                n: 14,
                target_density: d,
                seed: 40 + k as u64,
            };
            let inst = gen_st_density(spec).unwrap();
            let mut r = rng(spec.seed);
            let g = random_graph(14, d, &mut r);
            let cg = build_convexity_graph(&inst);
            assert_eq!(cg.edges(), g.edges());
            assert_eq!(cg.density, g.density());
            if !g.edges().is_empty() {
                assert!(preprocess_trivial(&inst).is_none());
            }
        }
    }

    #[test]
    fn st_extremes() {
        let full = gen_st_density(DensitySpec {
            n: 8,
            target_density: 1.0,
            seed: 1,
        })
        .unwrap();
        assert!(valid_inequality_pairs(&build_convexity_graph(&full)).is_empty());
        let empty = gen_st_density(DensitySpec {
            n: 8,
            target_density: 0.0,
            seed: 1,
        })
        .unwrap();
        assert!(build_convexity_graph(&empty).edges().is_empty());
        assert!(preprocess_trivial(&empty).is_some());
    }

    #[test]
    fn batch_counts_trivial() {
        let b = gen_blst_batch(5, TriangularSpec::standard(100), 50).unwrap();
        let direct = b.instances.iter().filter(|i| preprocess_trivial(i).is_some()).count();
        assert_eq!(b.trivial, direct);
        assert!(b.trivial_fraction() <= 1.0);
    }
}
