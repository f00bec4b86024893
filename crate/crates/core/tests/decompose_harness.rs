#![allow(clippy::needless_range_loop)]
mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use prec_sched::decompose::{build_grid, derandomize_b, partition_jobs, shift_scale, solve_with_offset};
use prec_sched::exact::{exact_contribution, exact_opt, DP_CAP};
use prec_sched::harness::{bench, run_pipeline, Family, GeneratorConfig, PipelineOptions};
use prec_sched::{decompose_and_solve, solve_bounded, solve_lp, tighten, BoundedConfig, Epsilon, LpConfig, OffsetMode};

fn eps(s: &str) -> Epsilon {
    s.parse().unwrap()
}

fn groups(inst_len: usize, completion: &[f64], e: Epsilon, b: f64) -> Vec<Vec<usize>> {
    let grid = build_grid(e, b, completion.iter().copied().fold(0.0, f64::max)).unwrap();
    let mut by: std::collections::BTreeMap<i64, Vec<usize>> = Default::default();
    for j in 0..inst_len {
        // Recompute the interval by scanning breakpoints from below.
        let mut i = -200i64;
        while grid.breakpoint(i + 1) <= completion[j] {
            i += 1;
        }
        by.entry(i).or_default().push(j);
    }
    by.into_values().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_is_a_consistent_cover(inst in common::instance(1..=8), which in 0usize..3, u in 0.0f64..1.0) {
        let e = [eps("1"), eps("1/2"), eps("2")][which];
        let lp = solve_lp(&inst, &LpConfig::default()).unwrap();
        let b = u * shift_scale(e);
        let grid = build_grid(e, b, lp.max_completion()).unwrap();
        let subs = partition_jobs(&inst, &lp.completion, &grid);
        let mut seen = vec![false; inst.len()];
        for w in subs.windows(2) {
            prop_assert!(w[0].index < w[1].index);
        }
        for sub in &subs {
            prop_assert!(!sub.is_empty());
            prop_assert_eq!(sub.floor, 3.0 * grid.breakpoint(sub.index));
            for (k, &j) in sub.parent.iter().enumerate() {
                prop_assert!(!seen[j]);
                seen[j] = true;
                let c = lp.completion[j];
                prop_assert!(grid.breakpoint(sub.index) <= c && c < grid.breakpoint(sub.index + 1));
                prop_assert_eq!(sub.instance.job(k).r, inst.job(j).r.max(sub.floor));
            }
        }
        prop_assert!(seen.iter().all(|&s| s));
        prop_assert_eq!(subs.iter().map(|s| s.parent.clone()).collect::<Vec<_>>(), groups(inst.len(), &lp.completion, e, b));
    }

    #[test]
    fn candidate_offsets_cover_a_fine_sweep(inst in common::instance(1..=7), which in 0usize..2) {
        let e = [eps("1"), eps("1/2")][which];
        let a = shift_scale(e);
        let lp = solve_lp(&inst, &LpConfig::default()).unwrap();
        let candidates = derandomize_b(&lp.completion, a);
        prop_assert!(candidates.len() <= inst.len() + 1);
        let from_candidates: BTreeSet<Vec<Vec<usize>>> =
            candidates.iter().map(|&b| groups(inst.len(), &lp.completion, e, b)).collect();
        let from_sweep: BTreeSet<Vec<Vec<usize>>> =
            (0..10_000).map(|k| groups(inst.len(), &lp.completion, e, a * k as f64 / 10_000.0)).collect();
        prop_assert!(from_sweep.is_subset(&from_candidates), "sweep found a partition no candidate gives");
    }

    #[test]
    fn interval_optimum_within_shifted_restriction(inst in common::instance(1..=7), u in 0.0f64..1.0) {
        let e = eps("1");
        let lp = solve_lp(&inst, &LpConfig::default()).unwrap();
        let opt = exact_opt(&inst, DP_CAP).unwrap();
        let grid = build_grid(e, u * shift_scale(e), lp.max_completion()).unwrap();
        for sub in partition_jobs(&inst, &lp.completion, &grid) {
            let local = exact_opt(&sub.instance, DP_CAP).unwrap().cost;
            let weight: f64 = sub.parent.iter().map(|&j| inst.job(j).w).sum();
            let shifted = exact_contribution(&inst, &opt.schedule, &sub.parent) + sub.floor * weight;
            prop_assert!(local <= shifted + 1e-9 * shifted.max(1.0));
        }
    }

    #[test]
    fn intervals_report_the_bounded_solver(inst in common::instance(1..=8), u in 0.0f64..1.0) {
        let e = eps("1");
        let cfg = BoundedConfig::default();
        let lp = solve_lp(&inst, &cfg.lp).unwrap();
        let b = u * shift_scale(e);
        let res = solve_with_offset(&inst, &lp, e, b, &cfg).unwrap();
        res.schedule.check_feasible(&inst).unwrap();
        let subs = partition_jobs(&inst, &lp.completion, &res.grid);
        prop_assert_eq!(subs.len(), res.intervals.len());
        let mut total = 0.0;
        for (sub, rep) in subs.iter().zip(&res.intervals) {
            let direct = solve_bounded(sub, e, &cfg).unwrap();
            let sigma = tighten(&direct.schedule, &sub.instance);
            prop_assert_eq!(sigma.weighted_completion(&sub.instance), rep.cost);
            prop_assert_eq!(&sub.parent, &rep.jobs);
            total += exact_contribution(&inst, &res.schedule, &sub.parent);
        }
        prop_assert!((total - res.cost).abs() <= 1e-9 * res.cost.max(1.0));
    }

    #[test]
    fn derandomized_is_best_candidate(inst in common::instance(1..=7)) {
        let e = eps("1");
        let cfg = BoundedConfig::default();
        let best = decompose_and_solve(&inst, e, OffsetMode::Derandomized, &cfg).unwrap();
        let lp = solve_lp(&inst, &cfg.lp).unwrap();
        let candidates = derandomize_b(&lp.completion, shift_scale(e));
        prop_assert_eq!(best.offsets_tried, candidates.len());
        for b in candidates {
            prop_assert!(solve_with_offset(&inst, &lp, e, b, &cfg).unwrap().cost >= best.cost);
        }
        let again = decompose_and_solve(&inst, e, OffsetMode::Derandomized, &cfg).unwrap();
        prop_assert_eq!(again.cost.to_bits(), best.cost.to_bits());
        prop_assert_eq!(again.b.to_bits(), best.b.to_bits());
    }
}

#[test]
fn bench_on_release_dominated_family_certifies() {
    let cfgs: Vec<GeneratorConfig> = [5, 7].iter().map(|&n| GeneratorConfig::new(Family::PLeR, n, 11)).collect();
    let opts = PipelineOptions { exact_cap: Some(DP_CAP), baselines: true, ..Default::default() };
    let rep = bench(&cfgs, &[eps("1"), eps("1/2")], 3, &opts).unwrap();
    assert_eq!(rep.records.len(), 12);
    assert!(rep.violations.is_empty(), "{:?}", rep.violations);
    assert_eq!(rep.summary.len(), 2);
    assert!(rep.summary.iter().all(|s| s.count == 6 && s.max_lpls_ratio_lp.unwrap() <= 2.0 + 1e-6));
    for r in &rep.records {
        assert!(r.run.z_lp <= r.run.opt_cost.unwrap() + 1e-6);
    }
}

#[test]
fn bench_is_deterministic_apart_from_timing() {
    let cfgs: Vec<GeneratorConfig> = Family::RANDOM.iter().map(|&f| GeneratorConfig::new(f, 6, 3)).collect();
    let opts = PipelineOptions { exact_cap: Some(8), ..Default::default() };
    let strip = |mut v: serde_json::Value| {
        for r in v["records"].as_array_mut().unwrap() {
            r.as_object_mut().unwrap().remove("wall_ms");
        }
        v
    };
    let one = strip(serde_json::to_value(bench(&cfgs, &[eps("1")], 2, &opts).unwrap()).unwrap());
    let two = strip(serde_json::to_value(bench(&cfgs, &[eps("1")], 2, &opts).unwrap()).unwrap());
    assert_eq!(one, two);
    assert_eq!(one["records"][0]["family"], "uniform");
    assert_eq!(one["records"][1]["seed"], 4);
}

#[test]
fn pipeline_errors_name_the_instance() {
    let inst = prec_sched::Instance::from_triples(&[(1, 0, 1)]).unwrap();
    let err = run_pipeline(&inst, eps("3"), &PipelineOptions::default()).unwrap_err();
    assert!(err.to_string().contains(&inst.digest()));
}
