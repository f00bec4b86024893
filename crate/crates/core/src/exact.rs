//! Exact optimum for small instances.
//!
//! For a fixed job sequence, starting every job at `max(makespan, r_j)` is
//! optimal, so it suffices to search sequences. The dynamic program keeps,
//! for every precedence-closed subset of scheduled jobs, the Pareto frontier
//! of `(makespan, cost)` pairs over all sequences of that subset.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::schedule::Schedule;

pub const DP_CAP: usize = 12;
pub const PERMUTATION_CAP: usize = 9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactSolution {
    pub cost: f64,
    pub schedule: Schedule,
    /// Optimal job sequence.
    pub sequence: Vec<usize>,
}

/// One non-dominated partial schedule of a subset.
#[derive(Debug, Clone, Copy)]
struct Label {
    makespan: f64,
    cost: f64,
    parent: usize,
    job: usize,
}

/// Frontier of one subset: makespan ascending, cost strictly descending.
#[derive(Debug, Clone, Default)]
pub struct ParetoState {
    labels: Vec<Label>,
}

impl ParetoState {
    fn prune(&mut self) {
        self.labels.sort_by(|a, b| a.makespan.total_cmp(&b.makespan).then(a.cost.total_cmp(&b.cost)));
        let mut kept: Vec<Label> = Vec::with_capacity(self.labels.len());
        for l in self.labels.drain(..) {
            if kept.last().is_none_or(|k| l.cost < k.cost) {
                kept.push(l);
            }
        }
        self.labels = kept;
    }

    pub fn frontier(&self) -> Vec<(f64, f64)> {
        self.labels.iter().map(|l| (l.makespan, l.cost)).collect()
    }
}

/// Greedy timing of a sequence: each job starts at `max(makespan, r_j)`.
pub fn time_sequence(instance: &Instance, sequence: &[usize]) -> (Schedule, f64) {
    let mut start = vec![0.0; instance.len()];
    let (mut t, mut cost) = (0.0_f64, 0.0);
    for &j in sequence {
        let job = instance.job(j);
        start[j] = t.max(job.r);
        t = start[j] + job.p;
        cost += job.w * t;
    }
    (Schedule::new(start), cost)
}

fn pred_masks(instance: &Instance) -> Vec<usize> {
    (0..instance.len())
        .map(|j| instance.preds(j).iter().fold(0usize, |m, &k| m | 1 << k))
        .collect()
}

/// Minimum weighted completion time by the Pareto subset dynamic program.
pub fn exact_opt(instance: &Instance, cap: usize) -> Result<ExactSolution> {
    let n = instance.len();
    if n > cap || n > 24 {
        return Err(Error::OracleTooLarge { n, cap });
    }
    let preds = pred_masks(instance);
    let full = (1usize << n) - 1;
    let mut states = vec![ParetoState::default(); full + 1];
    states[0].labels.push(Label { makespan: 0.0, cost: 0.0, parent: usize::MAX, job: usize::MAX });
    for mask in 0..full {
        if states[mask].labels.is_empty() {
            continue;
        }
        states[mask].prune();
        for j in 0..n {
            if mask >> j & 1 == 1 || preds[j] & !mask != 0 {
                continue;
            }
            let job = instance.job(j);
            let next = mask | 1 << j;
            for idx in 0..states[mask].labels.len() {
                let l = states[mask].labels[idx];
                let end = l.makespan.max(job.r) + job.p;
                let label = Label { makespan: end, cost: l.cost + job.w * end, parent: idx, job: j };
                states[next].labels.push(label);
            }
        }
    }
    states[full].prune();
    let best = states[full]
        .labels
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cost.total_cmp(&b.1.cost))
        .map(|(i, _)| i)
        .expect("full set is reachable");
    let mut sequence = Vec::with_capacity(n);
    let (mut mask, mut idx) = (full, best);
    while mask != 0 {
        let l = states[mask].labels[idx];
        sequence.push(l.job);
        mask &= !(1 << l.job);
        idx = l.parent;
    }
    sequence.reverse();
    let (schedule, cost) = time_sequence(instance, &sequence);
    debug_assert_eq!(cost, states[full].labels[best].cost);
    Ok(ExactSolution { cost, schedule, sequence })
}

/// Minimum over all precedence-consistent sequences, by enumeration.
pub fn exact_opt_permutations(instance: &Instance, cap: usize) -> Result<ExactSolution> {
    let n = instance.len();
    if n > cap {
        return Err(Error::OracleTooLarge { n, cap });
    }
    let preds = pred_masks(instance);
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut seq = Vec::with_capacity(n);
    fn rec(
        instance: &Instance,
        preds: &[usize],
        mask: usize,
        t: f64,
        cost: f64,
        seq: &mut Vec<usize>,
        best: &mut Option<(f64, Vec<usize>)>,
    ) {
        let n = instance.len();
        if seq.len() == n {
            if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                *best = Some((cost, seq.clone()));
            }
            return;
        }
        for j in 0..n {
            if mask >> j & 1 == 1 || preds[j] & !mask != 0 {
                continue;
            }
            let job = instance.job(j);
            let end = t.max(job.r) + job.p;
            seq.push(j);
            rec(instance, preds, mask | 1 << j, end, cost + job.w * end, seq, best);
            seq.pop();
        }
    }
    rec(instance, &preds, 0, 0.0, 0.0, &mut seq, &mut best);
    let (_, sequence) = best.expect("every DAG has a linear extension");
    let (schedule, cost) = time_sequence(instance, &sequence);
    Ok(ExactSolution { cost, schedule, sequence })
}

/// `sum_{j in subset} w_j C_j` in the given (optimal) schedule.
pub fn exact_contribution(instance: &Instance, optimal: &Schedule, subset: &[usize]) -> f64 {
    subset.iter().map(|&j| instance.job(j).w * optimal.completion(instance, j)).sum()
}
