//! Guesses about the early jobs of a near-optimal schedule, and the release
//! time adjustment they induce.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::Epsilon;

/// Job `job` starts at `step * eps * p_job`, before time `p_job`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct EarlyJob {
    pub job: usize,
    pub step: u32,
}

impl EarlyJob {
    pub fn start(&self, instance: &Instance, eps: Epsilon) -> f64 {
        eps.grid_point(self.step, instance.job(self.job).p)
    }
}

/// A guessed set of early jobs with their start times, ordered by job id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Guess {
    pub early: Vec<EarlyJob>,
}

impl Guess {
    pub fn empty() -> Self {
        Guess::default()
    }

    pub fn len(&self) -> usize {
        self.early.len()
    }

    pub fn is_empty(&self) -> bool {
        self.early.is_empty()
    }

    pub fn contains(&self, job: usize) -> bool {
        self.early.iter().any(|e| e.job == job)
    }

    /// Open intervals during which a guessed early job runs.
    pub fn busy_intervals(&self, instance: &Instance, eps: Epsilon) -> Vec<(f64, f64)> {
        self.early
            .iter()
            .map(|e| {
                let s = e.start(instance, eps);
                (s, s + instance.job(e.job).p)
            })
            .collect()
    }
}

/// `ceil(log2((1 + eps) * beta))`: no near-optimal schedule of a bounded
/// instance has more early jobs.
pub fn early_bound(eps: Epsilon, beta: f64) -> usize {
    ((1.0 + eps.value()) * beta).log2().ceil().max(0.0) as usize
}

/// Depth-first stream over all guesses that can describe a feasible
/// grid-aligned schedule. The empty guess comes first. Pruned: starts before
/// the release time, overlapping early jobs, early jobs out of precedence
/// order, and more than [`early_bound`] early jobs.
pub struct GuessStream<'a> {
    instance: &'a Instance,
    eps: Epsilon,
    max_early: usize,
    budget: Option<usize>,
    yielded: usize,
    steps: u32,
    stack: Vec<(usize, Vec<EarlyJob>)>,
}

impl<'a> GuessStream<'a> {
    fn compatible(&self, chosen: &[EarlyJob], cand: EarlyJob) -> bool {
        let inst = self.instance;
        let tol = inst.time_tol();
        let s = cand.start(inst, self.eps);
        if s < inst.job(cand.job).r - tol {
            return false;
        }
        let c = s + inst.job(cand.job).p;
        chosen.iter().all(|other| {
            let os = other.start(inst, self.eps);
            let oc = os + inst.job(other.job).p;
            let disjoint = oc <= s + tol || c <= os + tol;
            let ordered = (!inst.precedes(other.job, cand.job) || oc <= s + tol)
                && (!inst.precedes(cand.job, other.job) || c <= os + tol);
            disjoint && ordered
        })
    }
}

impl Iterator for GuessStream<'_> {
    type Item = Guess;

    fn next(&mut self) -> Option<Guess> {
        if self.budget.is_some_and(|b| self.yielded >= b) {
            return None;
        }
        while let Some((next, chosen)) = self.stack.pop() {
            if next == self.instance.len() {
                self.yielded += 1;
                return Some(Guess { early: chosen });
            }
            if chosen.len() < self.max_early {
                for step in (0..self.steps).rev() {
                    let cand = EarlyJob { job: next, step };
                    if self.compatible(&chosen, cand) {
                        let mut more = chosen.clone();
                        more.push(cand);
                        self.stack.push((next + 1, more));
                    }
                }
            }
            self.stack.push((next + 1, chosen));
        }
        None
    }
}

/// All guesses for a bounded instance with parameter `beta`, at most `budget` of them.
pub fn enumerate_guesses(instance: &Instance, eps: Epsilon, beta: f64, budget: Option<usize>) -> GuessStream<'_> {
    GuessStream {
        instance,
        eps,
        max_early: early_bound(eps, beta),
        budget,
        yielded: 0,
        steps: eps.steps_below_one(),
        stack: vec![(0, Vec::new())],
    }
}

/// Smallest release times `r' >= lower` that are consistent with the
/// precedence relation and avoid the open `intervals`, found by alternating
/// the two repair rules to a fixpoint.
pub fn release_fixpoint(instance: &Instance, lower: Vec<f64>, intervals: &[(f64, f64)]) -> Result<Vec<f64>> {
    let n = instance.len();
    let tol = instance.time_tol();
    let mut r = lower;
    let cap = n * n * (intervals.len() + 1) + n + 2;
    for _ in 0..cap {
        let mut changed = false;
        for &(a, b) in instance.prec() {
            if r[b] < r[a] {
                r[b] = r[a];
                changed = true;
            }
        }
        for x in r.iter_mut() {
            for &(lo, hi) in intervals {
                if lo + tol < *x && *x < hi - tol {
                    *x = hi;
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(r);
        }
    }
    Err(Error::Invariant(format!("release adjustment did not settle within {cap} rounds")))
}

/// Raises release times according to a guess: early jobs not before their
/// guessed start, other jobs not before their processing time, consistent
/// with the precedence relation, and never inside an early job's run.
pub fn adjust_release_times(instance: &Instance, guess: &Guess, eps: Epsilon) -> Result<Instance> {
    let mut lower: Vec<f64> = instance.jobs().iter().map(|j| j.r.max(j.p)).collect();
    for e in &guess.early {
        lower[e.job] = instance.job(e.job).r.max(e.start(instance, eps));
    }
    let releases = release_fixpoint(instance, lower, &guess.busy_intervals(instance, eps))?;
    Ok(instance.with_releases(&releases))
}

/// Rules that an adjusted instance violates (empty when all hold).
pub fn adjustment_violations(
    original: &Instance,
    adjusted: &Instance,
    lower: &[f64],
    intervals: &[(f64, f64)],
) -> Vec<String> {
    let tol = original.time_tol();
    let mut out = Vec::new();
    for j in 0..original.len() {
        let r = adjusted.job(j).r;
        if r < original.job(j).r - tol {
            out.push(format!("job {j}: release decreased"));
        }
        if r < lower[j] - tol {
            out.push(format!("job {j}: below its guessed lower bound"));
        }
        if intervals.iter().any(|&(lo, hi)| lo + tol < r && r < hi - tol) {
            out.push(format!("job {j}: release inside an early job's run"));
        }
    }
    for &(a, b) in original.prec() {
        if adjusted.job(a).r > adjusted.job(b).r + tol {
            out.push(format!("pair ({a}, {b}): releases out of order"));
        }
    }
    out
}
