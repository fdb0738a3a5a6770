use proptest::prelude::*;

use stqp::bench::{performance_profile, records_from_csv, records_to_csv, summarize, BenchRecord};
use stqp::bounds::{big_m, lb1, lb2, SplittingConfig};
use stqp::gen::{gen_blst, gen_st_density, DensitySpec, TriangularSpec};
use stqp::graph::{build_convexity_graph, convexity_discriminant, motzkin_straus, valid_inequality_pairs, SimpleGraph};
use stqp::instance::{Origin, StqpInstance};
use stqp::kkt::support_sandwich;
use stqp::milp::{build_milp1, build_milp2, build_variant, BoundChoice, Formulation, FormulationConfig};
use stqp::oracle::oracle_solve;
use stqp::solver::{solve_lp, solve_milp, solve_variant, LpStatus, SolverConfig};
use stqp::{Status, SymmetricMatrix};

fn matrix(n: usize, vals: &[f64]) -> SymmetricMatrix {
    let mut q = SymmetricMatrix::zeros(n);
    let mut k = 0;
    for i in 0..n {
        for j in 0..=i {
            q.set(i, j, vals[k]);
            k += 1;
        }
    }
    q
}

fn arb_instance(max_n: usize) -> impl Strategy<Value = StqpInstance> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-1.0f64..1.0, n * (n + 1) / 2)
            .prop_map(move |v| StqpInstance::new("p", matrix(n, &v), Origin::Generated).unwrap())
    })
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = SimpleGraph> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * (n.max(1) - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits[k] {
                        edges.push((i, j));
                    }
                    k += 1;
                }
            }
            SimpleGraph::new(n, edges).unwrap()
        })
    })
}

fn oracle_value(inst: &StqpInstance) -> f64 {
    oracle_solve(inst, Default::default()).unwrap().value
}

fn det() -> SolverConfig {
    SolverConfig {
        deterministic: true,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn shift_covariance(inst in arb_instance(6), gamma in -3.0f64..3.0) {
        let shifted = StqpInstance::new("s", inst.q.shifted(gamma), Origin::Generated).unwrap();
        let cfg = FormulationConfig::new(Formulation::Milp1, BoundChoice::L1, false);
        let a = solve_variant(&inst, &cfg, &det()).unwrap();
        let b = solve_variant(&shifted, &cfg, &det()).unwrap();
        prop_assert!((b.value - a.value - gamma).abs() <= 1e-6);
        prop_assert!((oracle_value(&shifted) - oracle_value(&inst) - gamma).abs() <= 1e-9);
        let l1 = lb1(&inst).value;
        let l1s = lb1(&shifted).value;
        prop_assert!((l1s - l1 - gamma).abs() <= 1e-12 * (1.0 + gamma.abs() + l1.abs()));
    }

    #[test]
    fn shift_keeps_support_when_unique(inst in arb_instance(6), gamma in -3.0f64..3.0) {
        let shifted = StqpInstance::new("s", inst.q.shifted(gamma), Origin::Generated).unwrap();
        let cfg = FormulationConfig::new(Formulation::Milp2, BoundChoice::L1, true);
        let a = solve_variant(&inst, &cfg, &det()).unwrap();
        let b = solve_variant(&shifted, &cfg, &det()).unwrap();
        let o = oracle_solve(&inst, Default::default()).unwrap();
        // Compare supports only when the optimum is well separated from other KKT values.
        let unique = a.support == o.support;
        if unique {
            prop_assert_eq!(&a.support, &b.support);
        }
    }

    #[test]
    fn monotonicity(inst in arb_instance(6), bump in prop::collection::vec(0.0f64..0.5, 21)) {
        let n = inst.n();
        let mut q2 = inst.q.clone();
        let mut k = 0;
        for i in 0..n {
            for j in 0..=i {
                q2.set(i, j, inst.q.get(i, j) + bump[k]);
                k += 1;
            }
        }
        let big = StqpInstance::new("b", q2, Origin::Generated).unwrap();
        let s1 = solve_variant(&big, &FormulationConfig::default(), &det()).unwrap();
        let s2 = solve_variant(&inst, &FormulationConfig::default(), &det()).unwrap();
        prop_assert!(s1.value >= s2.value - 1e-6);
    }

    #[test]
    fn diagonal_formula(d in prop::collection::vec(0.05f64..5.0, 1..9)) {
        let inst = StqpInstance::new("d", SymmetricMatrix::diagonal(&d), Origin::Generated).unwrap();
        let expect = 1.0 / d.iter().map(|v| 1.0 / v).sum::<f64>();
        for f in [Formulation::Milp1, Formulation::Milp2] {
            let s = solve_variant(&inst, &FormulationConfig::new(f, BoundChoice::L1, false), &det()).unwrap();
            prop_assert!((s.value - expect).abs() <= 1e-8);
        }
    }

    #[test]
    fn bracketing_and_certificates(inst in arb_instance(7)) {
        let g0 = inst.q.min_entry();
        let g1 = inst.q.min_diag();
        for cfg in [FormulationConfig::default(), FormulationConfig::new(Formulation::Milp2, BoundChoice::L2, true)] {
            let s = solve_variant(&inst, &cfg, &det()).unwrap();
            prop_assert_eq!(s.status, Status::Optimal);
            prop_assert!(g0 <= s.value + 1e-12 && s.value <= g1 + 1e-12);
            prop_assert!(s.certificate.as_ref().unwrap().is_valid(stqp::TOL_KKT));
            let (lo, hi) = support_sandwich(&inst.q, s.x.as_slice(), stqp::SUPPORT_THRESHOLD);
            prop_assert!(hi - lo <= 1e-6);
        }
    }

    #[test]
    fn oracle_matches_both_formulations(inst in arb_instance(7)) {
        let o = oracle_value(&inst);
        for f in [Formulation::Milp1, Formulation::Milp2] {
            let s = solve_variant(&inst, &FormulationConfig::new(f, BoundChoice::L1, false), &det()).unwrap();
            prop_assert!((s.value - o).abs() <= 1e-6, "{:?}: {} vs {}", f, s.value, o);
        }
    }

    #[test]
    fn bound_ordering(inst in arb_instance(7)) {
        let nu = oracle_value(&inst);
        let l1 = lb1(&inst);
        let l2 = lb2(&inst, &SplittingConfig::default()).unwrap();
        let shift = l2.dual.as_ref().map_or(0.0, |d| d.residuals.shift);
        prop_assert!(l1.value <= l2.value + shift + 1e-9);
        prop_assert!(l2.value <= nu + 1e-6);
        prop_assert!(l1.value <= nu + 1e-12);
        if inst.q.min_entry() == inst.q.min_diag() {
            prop_assert_eq!(l1.value, nu);
        }
    }

    #[test]
    fn sandwich_on_random_points(inst in arb_instance(8), raw in prop::collection::vec(0.0f64..1.0, 8), mask in prop::collection::vec(any::<bool>(), 8)) {
        let n = inst.n();
        let mut x: Vec<f64> = (0..n).map(|j| if mask[j] || j == 0 { raw[j] + 1e-3 } else { 0.0 }).collect();
        let s: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v /= s);
        let (lo, hi) = support_sandwich(&inst.q, &x, stqp::SUPPORT_THRESHOLD);
        let v = inst.q.quad_form(&x);
        prop_assert!(lo <= v + 1e-12 && v <= hi + 1e-12);
    }

    #[test]
    fn convexity_graph_of_reduction_is_complement(g in arb_graph(9)) {
        let cg = build_convexity_graph(&motzkin_straus(&g));
        let comp = g.complement();
        prop_assert_eq!(cg.edges(), comp.edges());
    }

    #[test]
    fn valid_inequalities_respected(inst in arb_instance(7)) {
        let cg = build_convexity_graph(&inst);
        let pairs = valid_inequality_pairs(&cg);
        for &(i, j) in &pairs {
            prop_assert!(convexity_discriminant(&inst.q, i, j) <= 0.0);
        }
        let s = solve_variant(&inst, &FormulationConfig::new(Formulation::Milp1, BoundChoice::L1, true), &det()).unwrap();
        for &(i, j) in &pairs {
            prop_assert!(!(s.support.contains(&i) && s.support.contains(&j)));
        }
    }

    #[test]
    fn larger_big_m_keeps_value(inst in arb_instance(6), extra in prop::collection::vec(0.0f64..2.0, 6)) {
        let lb = lb1(&inst);
        let m = big_m(&inst, &lb);
        let mut cfg = FormulationConfig::new(Formulation::Milp1, BoundChoice::L1, false);
        let base = solve_milp(&build_variant(&inst, &cfg, &lb).unwrap(), &det()).unwrap();
        cfg.big_m_override = Some(m.m.iter().zip(&extra).map(|(a, b)| a + b).collect());
        let looser = solve_milp(&build_variant(&inst, &cfg, &lb).unwrap(), &det()).unwrap();
        prop_assert!((base.value - looser.value).abs() <= 1e-6);
    }

    #[test]
    fn milp1_points_are_milp2_points(inst in arb_instance(6)) {
        let lb = lb1(&inst);
        let bm = big_m(&inst, &lb);
        let m1 = build_milp1(&inst, &lb, &bm).unwrap();
        let m2 = build_milp2(&inst, &lb, &bm).unwrap();
        let o = oracle_solve(&inst, Default::default()).unwrap();
        let fix: Vec<(usize, f64)> = m1.roles.y.iter().enumerate()
            .map(|(j, &c)| (c, if o.support.contains(&j) { 1.0 } else { 0.0 }))
            .collect();
        let leaf = solve_lp(&m1, &fix).unwrap();
        prop_assert_eq!(leaf.status, LpStatus::Optimal);
        prop_assert!(m1.max_violation(&leaf.values) <= 1e-9);
        prop_assert!(m2.max_violation(&leaf.values) <= 1e-9);
        // Complementarity on the integer leaf.
        for j in 0..inst.n() {
            let xs = leaf.values[m1.roles.x[j]] * leaf.values[m1.roles.slack[j]];
            prop_assert!(xs.abs() <= 1e-8);
        }
        prop_assert!((leaf.objective - o.value).abs() <= 1e-8);
    }

    #[test]
    fn more_fixings_never_lower_the_lp(inst in arb_instance(6), pattern in prop::collection::vec(0u8..3, 6)) {
        let lb = lb1(&inst);
        let m = build_milp2(&inst, &lb, &big_m(&inst, &lb)).unwrap();
        let parent = solve_lp(&m, &[]).unwrap();
        let fix: Vec<(usize, f64)> = m.roles.y.iter().enumerate()
            .filter(|(j, _)| pattern[*j] < 2)
            .map(|(j, &c)| (c, pattern[j] as f64))
            .collect();
        let child = solve_lp(&m, &fix).unwrap();
        if child.status == LpStatus::Optimal {
            prop_assert!(child.objective >= parent.objective - 1e-9);
            prop_assert!(m.max_violation(&child.values) <= 1e-9);
        }
    }

    #[test]
    fn generators_are_reproducible(n in 2usize..12, seed in any::<u64>(), d in 0.0f64..=1.0) {
        let spec = TriangularSpec::standard(seed);
        prop_assert_eq!(gen_blst(n, spec).unwrap(), gen_blst(n, spec).unwrap());
        let ds = DensitySpec { n, target_density: d, seed };
        let a = gen_st_density(ds).unwrap();
        prop_assert_eq!(&a, &gen_st_density(ds).unwrap());
    }
}

fn arb_record() -> impl Strategy<Value = BenchRecord> {
    (
        0usize..4,
        0usize..3,
        prop_oneof![Just(Status::Optimal), Just(Status::TimeLimit), Just(Status::Error)],
        -10.0f64..10.0,
        0.0f64..1.0,
        0.0f64..100.0,
        0u64..1000,
    )
        .prop_map(|(i, v, status, value, gap, t, nodes)| BenchRecord {
            instance: format!("inst{i}"),
            variant: ["A", "B", "C"][v].into(),
            status,
            value: Some(value),
            bound: Some(value - gap),
            gap: Some(gap),
            nodes,
            lp_count: nodes,
            support_size: Some(1),
            wall_s: t,
            bound_s: 0.0,
            note: String::new(),
        })
}

proptest! {
    #[test]
    fn csv_round_trip(recs in prop::collection::vec(arb_record(), 0..20)) {
        let text = records_to_csv(&recs).unwrap();
        prop_assert_eq!(records_from_csv(&text).unwrap(), recs);
    }

    #[test]
    fn summary_totals(recs in prop::collection::vec(arb_record(), 1..30)) {
        let rows = summarize(&recs);
        for r in rows {
            let total: f64 = recs.iter().filter(|x| x.variant == r.variant).map(|x| x.wall_s).sum();
            prop_assert!((r.total_time - total).abs() <= 1e-6);
        }
    }

    #[test]
    fn profile_monotone_and_bounded(recs in prop::collection::vec(arb_record(), 1..30)) {
        let pts = performance_profile(&recs);
        let mut by_variant: std::collections::BTreeMap<String, Vec<(f64, f64)>> = Default::default();
        for p in &pts {
            prop_assert!(p.tau >= 1.0);
            by_variant.entry(p.variant.clone()).or_default().push((p.tau, p.fraction));
        }
        // Instances solved by somebody.
        let mut solved_any: Vec<&str> = recs.iter().filter(|r| r.status == Status::Optimal).map(|r| r.instance.as_str()).collect();
        solved_any.sort();
        solved_any.dedup();
        for (v, series) in by_variant {
            for w in series.windows(2) {
                prop_assert!(w[0].0 <= w[1].0 && w[0].1 <= w[1].1);
            }
            let mut mine: Vec<&str> = recs.iter()
                .filter(|r| r.variant == v && r.status == Status::Optimal)
                .map(|r| r.instance.as_str())
                .collect();
            mine.sort();
            mine.dedup();
            let cap = mine.len() as f64 / solved_any.len() as f64;
            prop_assert!(series.iter().all(|&(_, f)| f <= cap + 1e-15));
        }
    }
}
