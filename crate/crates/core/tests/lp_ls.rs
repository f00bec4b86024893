mod common;

use proptest::prelude::*;

use prec_sched::list_sched::{check_lp_ls_trace, check_ls_property, list_schedule, lp_ls, JobOrder, LsVariant};
use prec_sched::lp::{separate_exhaustive, separate_fast, solve_lp, LpConfig, Separation};
use prec_sched::{Instance, Schedule};

/// Violation of the load constraint of every nonempty subset, from the formula.
fn all_violations(c: &[f64], inst: &Instance) -> Vec<(Vec<usize>, f64)> {
    let n = inst.len();
    (1u32..1 << n)
        .map(|mask| {
            let subset: Vec<usize> = (0..n).filter(|&j| mask >> j & 1 == 1).collect();
            let p: f64 = subset.iter().map(|&j| inst.job(j).p).sum();
            let lhs: f64 = subset.iter().map(|&j| inst.job(j).p * c[j]).sum();
            let rmin = subset.iter().map(|&j| inst.job(j).r).fold(f64::INFINITY, f64::min);
            let v = rmin * p + p * p / 2.0 - lhs;
            (subset, v)
        })
        .collect()
}

/// Discrete-clock simulation of list scheduling (all data integral).
fn simulate_ls(inst: &Instance, order: &[usize]) -> Vec<f64> {
    let n = inst.len();
    let mut start = vec![f64::NAN; n];
    let mut finish = vec![f64::INFINITY; n];
    let mut free_at = 0i64;
    let mut t = 0i64;
    let mut placed = 0;
    while placed < n {
        if t >= free_at {
            let now = t as f64;
            let next = order.iter().copied().find(|&j| {
                start[j].is_nan() && inst.job(j).r <= now && inst.preds(j).iter().all(|&k| finish[k] <= now)
            });
            if let Some(j) = next {
                start[j] = now;
                finish[j] = now + inst.job(j).p;
                free_at = t + inst.job(j).p as i64;
                placed += 1;
                continue;
            }
        }
        t += 1;
    }
    start
}

fn sequences_opt(inst: &Instance) -> f64 {
    common::linear_extensions(inst).iter().map(|s| common::sequence_cost(inst, s)).fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn separation_oracles_agree_with_enumeration(
        inst in common::instance(1..=9),
        noise in prop::collection::vec(0.0f64..1.0, 9),
    ) {
        let total = inst.total_processing();
        let c: Vec<f64> = (0..inst.len()).map(|j| inst.job(j).r + inst.job(j).p / 2.0 + noise[j] * total).collect();
        let worst = all_violations(&c, &inst).into_iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
        let exact = separate_exhaustive(&c, &inst, 1e-9, 12).unwrap();
        let fast = separate_fast(&c, &inst, 1e-9);
        if worst > 1e-9 {
            let (cut, v) = exact.unwrap();
            prop_assert!((v - worst).abs() <= 1e-9 * worst.max(1.0));
            prop_assert!((cut.violation(&c, &inst) - worst).abs() <= 1e-9 * worst.max(1.0));
            // The prefix search attains the maximum as well.
            let (_, vf) = fast.unwrap();
            prop_assert!((vf - worst).abs() <= 1e-9 * worst.max(1.0), "fast {} vs {}", vf, worst);
        } else {
            prop_assert!(exact.is_none());
            prop_assert!(fast.is_none());
        }
    }

    #[test]
    fn lp_is_feasible_and_below_optimum(inst in common::instance(1..=7)) {
        let lp = solve_lp(&inst, &LpConfig::default()).unwrap();
        let tol = 1e-6;
        for (subset, v) in all_violations(&lp.completion, &inst) {
            prop_assert!(v <= tol, "subset {:?} violated by {}", subset, v);
        }
        for &(a, b) in inst.prec() {
            prop_assert!(lp.completion[a] <= lp.completion[b] + tol);
        }
        prop_assert!(lp.objective <= sequences_opt(&inst) + tol);
        prop_assert!(lp.objective_trace.windows(2).all(|w| w[1] >= w[0] - tol));
    }

    #[test]
    fn separation_choice_does_not_change_value(inst in common::instance(1..=10)) {
        let ex = solve_lp(&inst, &LpConfig { separation: Separation::Exhaustive, ..Default::default() }).unwrap();
        let fast = solve_lp(&inst, &LpConfig { separation: Separation::Fast, ..Default::default() }).unwrap();
        prop_assert!((ex.objective - fast.objective).abs() <= 1e-6 * ex.objective.max(1.0));
    }

    #[test]
    fn list_schedule_matches_clock_simulation(inst in common::instance(1..=8), keys in prop::collection::vec(0u32..1000, 8)) {
        // Random priority list consistent with the precedence relation.
        let c: Vec<f64> = (0..inst.len()).map(|j| keys[j] as f64).collect();
        let order = JobOrder::from_completion(&c, &inst, 0.0);
        let s = list_schedule(&inst, &order);
        prop_assert_eq!(&s.start, &simulate_ls(&inst, order.order()));
        prop_assert!(check_ls_property(&s, &inst, &order).is_empty());
        s.check_feasible(&inst).unwrap();
    }

    #[test]
    fn lp_ls_traces_satisfy_window_bounds(inst in common::instance(1..=8)) {
        let run = lp_ls(&inst, &LpConfig::default(), LsVariant::Available).unwrap();
        prop_assert!(check_ls_property(&run.schedule, &inst, &run.order).is_empty());
        let v = check_lp_ls_trace(&run.schedule, &run.lp.completion, &inst, &run.order, 1e-6);
        prop_assert!(v.is_empty(), "{:?}", v);
        prop_assert!(run.cost >= sequences_opt(&inst) - 1e-9);
    }

    #[test]
    fn small_jobs_give_factor_two(
        data in prop::collection::vec((1i64..=10, 0i64..=20, 0i64..=10), 1..=8),
    ) {
        let triples: Vec<(i64, i64, i64)> = data.into_iter().map(|(p, extra, w)| (p, p + extra, w)).collect();
        let inst = Instance::from_triples(&triples).unwrap();
        let run = lp_ls(&inst, &LpConfig::default(), LsVariant::Available).unwrap();
        prop_assert!(run.cost <= 2.0 * run.lp.objective + 1e-6);
    }
}

#[test]
fn strict_order_breaks_the_list_property() {
    let inst = Instance::from_triples(&[(1, 1, 10), (10, 0, 0)]).unwrap();
    let order = JobOrder::new(vec![0, 1], &inst).unwrap();
    let strict = Schedule::new(vec![1.0, 2.0]);
    assert!(!check_ls_property(&strict, &inst, &order).is_empty());
}
