//! List scheduling and list scheduling in order of LP values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::lp::{solve_lp, LpConfig, LpSolution};
use crate::schedule::Schedule;

/// A priority list: earlier position means higher priority.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JobOrder {
    order: Vec<usize>,
    #[serde(skip)]
    position: Vec<usize>,
}

impl JobOrder {
    /// Checks that `order` is a permutation consistent with the precedence relation.
    pub fn new(order: Vec<usize>, instance: &Instance) -> Result<Self> {
        let n = instance.len();
        let mut position = vec![usize::MAX; n];
        if order.len() != n {
            return Err(Error::InvalidParameter(format!("order has {} entries for {n} jobs", order.len())));
        }
        for (i, &j) in order.iter().enumerate() {
            if j >= n || position[j] != usize::MAX {
                return Err(Error::InvalidParameter(format!("order is not a permutation (job {j})")));
            }
            position[j] = i;
        }
        if let Some(&(a, b)) = instance.prec().iter().find(|&&(a, b)| position[a] > position[b]) {
            return Err(Error::InvalidParameter(format!("order puts job {b} before its predecessor {a}")));
        }
        Ok(JobOrder { order, position })
    }

    /// Sorts by `completion` ascending. Values within `tol` of each other
    /// count as ties; ties go to a job whose predecessors are already placed,
    /// then to the smaller id.
    pub fn from_completion(completion: &[f64], instance: &Instance, tol: f64) -> Self {
        let n = instance.len();
        let mut missing: Vec<usize> = (0..n).map(|j| instance.preds(j).len()).collect();
        let mut placed = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for _ in 0..n {
            let ready = (0..n).filter(|&j| !placed[j] && missing[j] == 0);
            let low = ready.clone().map(|j| completion[j]).fold(f64::INFINITY, f64::min);
            let pick = ready
                .filter(|&j| completion[j] <= low + tol)
                .min()
                .expect("a DAG always has a ready job");
            placed[pick] = true;
            order.push(pick);
            for &k in instance.succs(pick) {
                missing[k] -= 1;
            }
        }
        let mut position = vec![0; n];
        for (i, &j) in order.iter().enumerate() {
            position[j] = i;
        }
        JobOrder { order, position }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn position(&self, j: usize) -> usize {
        self.position[j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LsVariant {
    /// Whenever the machine is free, start the highest-priority available job.
    #[default]
    Available,
    /// Start jobs exactly in list order, each as early as possible.
    Strict,
}

/// List scheduling over available jobs. A job is available at `t` if it is
/// released, unscheduled and all its predecessors have completed.
pub fn list_schedule(instance: &Instance, order: &JobOrder) -> Schedule {
    let n = instance.len();
    let tol = instance.time_tol();
    let mut start = vec![f64::NAN; n];
    let mut done = vec![false; n];
    let mut t = 0.0_f64;
    for _ in 0..n {
        let ready: Vec<usize> = order
            .order()
            .iter()
            .copied()
            .filter(|&j| !done[j] && instance.preds(j).iter().all(|&k| done[k]))
            .collect();
        let pick = match ready.iter().copied().find(|&j| instance.job(j).r <= t + tol) {
            Some(j) => j,
            None => {
                // Idle until the next release among jobs whose predecessors are done.
                t = ready.iter().map(|&j| instance.job(j).r).fold(f64::INFINITY, f64::min);
                ready
                    .iter()
                    .copied()
                    .find(|&j| instance.job(j).r <= t + tol)
                    .expect("ready set is nonempty")
            }
        };
        start[pick] = t;
        done[pick] = true;
        t += instance.job(pick).p;
    }
    Schedule::new(start)
}

/// Schedules jobs exactly in list order, each at the earliest feasible time.
pub fn list_schedule_strict(instance: &Instance, order: &JobOrder) -> Schedule {
    let mut start = vec![0.0; instance.len()];
    let mut t = 0.0_f64;
    for &j in order.order() {
        start[j] = t.max(instance.job(j).r);
        t = start[j] + instance.job(j).p;
    }
    Schedule::new(start)
}

pub fn run_list_schedule(instance: &Instance, order: &JobOrder, variant: LsVariant) -> Schedule {
    match variant {
        LsVariant::Available => list_schedule(instance, order),
        LsVariant::Strict => list_schedule_strict(instance, order),
    }
}

/// A time at which the machine is free and `job` is released but unstarted,
/// yet no job of equal or higher priority starts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LsViolation {
    pub time: f64,
    pub job: usize,
    pub started: Option<usize>,
}

/// Checks the list-scheduling property: whenever the machine is available at
/// `t` and some released job `j` has not started, a job with priority at
/// least that of `j` starts at `t`. Only event times need checking.
pub fn check_ls_property(schedule: &Schedule, instance: &Instance, order: &JobOrder) -> Vec<LsViolation> {
    let n = instance.len();
    let tol = instance.time_tol();
    let mut events: Vec<f64> = vec![0.0];
    for j in 0..n {
        events.extend([schedule.start[j], schedule.completion(instance, j), instance.job(j).r]);
    }
    events.sort_by(f64::total_cmp);
    events.dedup_by(|a, b| (*a - *b).abs() <= tol);

    let mut violations = Vec::new();
    for &t in &events {
        let busy = (0..n).any(|h| schedule.start[h] + tol < t && t < schedule.completion(instance, h) - tol);
        if busy {
            continue;
        }
        let started = (0..n).find(|&h| (schedule.start[h] - t).abs() <= tol);
        for j in 0..n {
            if Some(j) == started || schedule.start[j] <= t + tol || instance.job(j).r > t + tol {
                continue;
            }
            let ok = started.is_some_and(|h| order.position(h) <= order.position(j));
            if !ok {
                violations.push(LsViolation { time: t, job: j, started });
            }
        }
    }
    violations
}

#[derive(Debug, Clone)]
pub struct LpLsResult {
    pub schedule: Schedule,
    pub lp: LpSolution,
    pub order: JobOrder,
    pub cost: f64,
}

/// Solves the relaxation, orders jobs by LP completion time and list schedules.
pub fn lp_ls(instance: &Instance, config: &LpConfig, variant: LsVariant) -> Result<LpLsResult> {
    let lp = solve_lp(instance, config)?;
    let order = JobOrder::from_completion(&lp.completion, instance, config.tol);
    let schedule = run_list_schedule(instance, &order, variant);
    let cost = schedule.weighted_completion(instance);
    Ok(LpLsResult { schedule, lp, order, cost })
}

/// Which inequality of the busy-window analysis failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowBound {
    /// `C^s_j <= t + 2 C_j - 2 r_min(U)`
    Span,
    /// `C^s_j <= 2 C_j` when nothing completes at `t`
    Double,
    /// `r_min(U) > s` when job `k` started at `s` completes at `t`
    Blocker,
    /// `C_h <= C_j` for every `h` in `U`
    Order,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowViolation {
    pub job: usize,
    pub bound: WindowBound,
    pub excess: f64,
}

/// The maximal busy window `[t, C^s_j]` ending at `j` that only contains jobs
/// of priority at least `j`'s, and the job completing at `t` if any.
#[derive(Debug, Clone, PartialEq)]
pub struct BusyWindow {
    pub t: f64,
    pub jobs: Vec<usize>,
    pub blocker: Option<usize>,
}

pub fn busy_window(schedule: &Schedule, instance: &Instance, order: &JobOrder, j: usize) -> BusyWindow {
    let tol = instance.time_tol();
    let seq = schedule.job_sequence();
    let mut idx = seq.iter().position(|&x| x == j).expect("job is scheduled");
    let mut jobs = vec![j];
    let mut blocker = None;
    while idx > 0 {
        let prev = seq[idx - 1];
        let contiguous = (schedule.completion(instance, prev) - schedule.start[seq[idx]]).abs() <= tol;
        if !contiguous {
            break;
        }
        if order.position(prev) <= order.position(j) {
            jobs.push(prev);
            idx -= 1;
        } else {
            blocker = Some(prev);
            break;
        }
    }
    BusyWindow { t: schedule.start[seq[idx]], jobs, blocker }
}

/// Recomputes the busy-window inequalities for every job of an LP-ordered
/// list schedule; `completion` are the LP values the order came from.
pub fn check_lp_ls_trace(
    schedule: &Schedule,
    completion: &[f64],
    instance: &Instance,
    order: &JobOrder,
    tol: f64,
) -> Vec<WindowViolation> {
    let mut out = Vec::new();
    for j in 0..instance.len() {
        let window = busy_window(schedule, instance, order, j);
        let actual = schedule.completion(instance, j);
        let lp = completion[j];
        let rmin = window.jobs.iter().map(|&h| instance.job(h).r).fold(f64::INFINITY, f64::min);
        let mut flag = |bound, excess: f64| {
            if excess > tol {
                out.push(WindowViolation { job: j, bound, excess });
            }
        };
        let order_excess = window.jobs.iter().map(|&h| completion[h] - lp).fold(0.0, f64::max);
        flag(WindowBound::Order, order_excess);
        flag(WindowBound::Span, actual - (window.t + 2.0 * lp - 2.0 * rmin));
        match window.blocker {
            None => flag(WindowBound::Double, actual - 2.0 * lp),
            Some(k) => flag(WindowBound::Blocker, schedule.start[k] - rmin),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{InstanceFile, JobSpec};

    fn paper_example() -> Instance {
        Instance::from_triples(&[(1, 1, 10), (10, 0, 0)]).unwrap()
    }

    #[test]
    fn list_schedule_runs_only_available_job() {
        let inst = paper_example();
        for order in [vec![1, 0], vec![0, 1]] {
            let order = JobOrder::new(order, &inst).unwrap();
            let s = list_schedule(&inst, &order);
            assert_eq!(s.start, vec![10.0, 0.0]);
            assert_eq!(s.weighted_completion(&inst), 110.0);
        }
    }

    #[test]
    fn strict_variant_waits() {
        let inst = paper_example();
        let order = JobOrder::new(vec![0, 1], &inst).unwrap();
        let s = list_schedule_strict(&inst, &order);
        assert_eq!(s.start, vec![1.0, 2.0]);
        assert_eq!(s.weighted_completion(&inst), 20.0);
    }

    #[test]
    fn single_job_starts_at_release() {
        let inst = Instance::from_triples(&[(3, 7, 2)]).unwrap();
        let order = JobOrder::new(vec![0], &inst).unwrap();
        assert_eq!(list_schedule(&inst, &order).start, vec![7.0]);
        let res = lp_ls(&inst, &LpConfig::default(), LsVariant::Available).unwrap();
        assert_eq!(res.cost, 20.0);
    }

    #[test]
    fn lp_ls_on_paper_example() {
        let res = lp_ls(&paper_example(), &LpConfig::default(), LsVariant::Available).unwrap();
        assert_eq!(res.order.order(), &[0, 1]);
        assert_eq!(res.cost, 110.0);
    }

    #[test]
    fn inconsistent_order_is_rejected() {
        let inst = InstanceFile {
            jobs: vec![JobSpec { p: 1, r: 0, w: 1 }; 2],
            prec: vec![[0, 1]],
        }
        .into_instance()
        .unwrap();
        assert!(JobOrder::new(vec![1, 0], &inst).is_err());
        assert!(JobOrder::new(vec![0, 0], &inst).is_err());
    }

    #[test]
    fn ties_respect_precedence_then_id() {
        let inst = InstanceFile {
            jobs: vec![JobSpec { p: 1, r: 0, w: 1 }; 3],
            prec: vec![[2, 0]],
        }
        .into_instance()
        .unwrap();
        let order = JobOrder::from_completion(&[1.0, 1.0, 1.0], &inst, 1e-9);
        assert_eq!(order.order(), &[1, 2, 0]);
    }

    #[test]
    fn idle_gap_before_available_job_is_flagged() {
        let inst = Instance::from_triples(&[(1, 0, 1), (1, 0, 1)]).unwrap();
        let order = JobOrder::new(vec![0, 1], &inst).unwrap();
        let trace = Schedule::new(vec![0.0, 3.0]);
        let v = check_ls_property(&trace, &inst, &order);
        assert!(v.iter().any(|x| x.job == 1 && x.time == 1.0 && x.started.is_none()));
        assert!(check_ls_property(&list_schedule(&inst, &order), &inst, &order).is_empty());
    }

    #[test]
    fn lower_priority_start_is_flagged() {
        let inst = Instance::from_triples(&[(1, 0, 1), (1, 0, 1)]).unwrap();
        let order = JobOrder::new(vec![0, 1], &inst).unwrap();
        let v = check_ls_property(&Schedule::new(vec![1.0, 0.0]), &inst, &order);
        assert_eq!(v, vec![LsViolation { time: 0.0, job: 0, started: Some(1) }]);
    }

    #[test]
    fn busy_window_of_paper_example() {
        let inst = paper_example();
        let res = lp_ls(&inst, &LpConfig::default(), LsVariant::Available).unwrap();
        let w = busy_window(&res.schedule, &inst, &res.order, 0);
        assert_eq!(w.t, 10.0);
        assert_eq!(w.jobs, vec![0]);
        assert_eq!(w.blocker, Some(1));
        assert!(check_lp_ls_trace(&res.schedule, &res.lp.completion, &inst, &res.order, 1e-6).is_empty());
    }
}
