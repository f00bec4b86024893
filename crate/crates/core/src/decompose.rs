//! Splitting an instance into bounded pieces along a geometric grid of LP
//! completion times, and gluing the pieces' schedules back together.

use log::debug;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounded::{solve_bounded, AnyGuess, BoundedConfig};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::lp::{solve_lp, LpSolution};
use crate::rational::Epsilon;
use crate::schedule::{tighten, Schedule};

/// Breakpoints `t_i = exp(a (i - 3) + b)` for `i = 1..=q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalGrid {
    pub a: f64,
    pub b: f64,
    /// `t[0]` is `t_1`.
    pub t: Vec<f64>,
}

impl IntervalGrid {
    /// Grid with scale `a`, no range check on the implied epsilon.
    pub fn with_scale(a: f64, b: f64, cmax: f64) -> IntervalGrid {
        let mut t = vec![breakpoint(a, b, 1)];
        while *t.last().unwrap() < cmax {
            t.push(breakpoint(a, b, t.len() as i64 + 1));
        }
        IntervalGrid { a, b, t }
    }

    pub fn q(&self) -> usize {
        self.t.len()
    }

    /// `t_i` for any integer `i`, not only those stored.
    pub fn breakpoint(&self, i: i64) -> f64 {
        breakpoint(self.a, self.b, i)
    }

    /// The `i` with `t_i <= c < t_{i+1}`.
    pub fn interval_of(&self, c: f64) -> i64 {
        let mut i = ((c.ln() - self.b) / self.a).floor() as i64 + 3;
        while self.breakpoint(i) > c {
            i -= 1;
        }
        while self.breakpoint(i + 1) <= c {
            i += 1;
        }
        i
    }
}

fn breakpoint(a: f64, b: f64, i: i64) -> f64 {
    (a * (i - 3) as f64 + b).exp()
}

/// Largest epsilon for which consecutive breakpoints are a factor 3 apart.
pub fn max_epsilon() -> f64 {
    3.0 / 3f64.ln()
}

pub fn shift_scale(eps: Epsilon) -> f64 {
    3.0 / eps.value()
}

fn check_epsilon(eps: Epsilon) -> Result<()> {
    if eps.value() > max_epsilon() {
        return Err(Error::EpsilonOutOfRange { epsilon: eps.value() });
    }
    Ok(())
}

pub fn build_grid(eps: Epsilon, b: f64, cmax: f64) -> Result<IntervalGrid> {
    check_epsilon(eps)?;
    let a = shift_scale(eps);
    if !(0.0..=a).contains(&b) {
        return Err(Error::OffsetOutOfRange { b, a });
    }
    Ok(IntervalGrid::with_scale(a, b, cmax))
}

/// Jobs of one interval as a bounded instance: no job starts before `floor`.
#[derive(Debug, Clone)]
pub struct SubInstance {
    /// Grid index `i` of the interval (0 when built standalone).
    pub index: i64,
    /// Job ids in the parent instance; job `k` here is `parent[k]` there.
    pub parent: Vec<usize>,
    pub floor: f64,
    pub beta: f64,
    pub instance: Instance,
}

impl SubInstance {
    /// Treats the whole instance as bounded with lower bound `floor` and
    /// parameter `beta`, lifting release times to at least `floor`.
    pub fn standalone(instance: &Instance, floor: f64, beta: f64) -> Result<SubInstance> {
        if !(floor > 0.0 && floor.is_finite()) {
            return Err(Error::InvalidParameter(format!("L must be positive, got {floor}")));
        }
        if !(beta >= 1.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be at least 1, got {beta}")));
        }
        let releases: Vec<f64> = instance.jobs().iter().map(|j| j.r.max(floor)).collect();
        Ok(SubInstance {
            index: 0,
            parent: (0..instance.len()).collect(),
            floor,
            beta,
            instance: instance.with_releases(&releases),
        })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }
}

/// Groups jobs by the grid interval of their LP completion time; empty
/// intervals are dropped and the rest come in increasing order.
pub fn partition_jobs(instance: &Instance, completion: &[f64], grid: &IntervalGrid) -> Vec<SubInstance> {
    let mut groups: std::collections::BTreeMap<i64, Vec<usize>> = Default::default();
    for (j, &c) in completion.iter().enumerate() {
        groups.entry(grid.interval_of(c)).or_default().push(j);
    }
    let beta = grid.a.exp();
    groups
        .into_iter()
        .map(|(i, ids)| {
            let floor = 3.0 * grid.breakpoint(i);
            let inner = instance.restrict(&ids);
            let releases: Vec<f64> = inner.jobs().iter().map(|j| j.r.max(floor)).collect();
            SubInstance { index: i, parent: ids, floor, beta, instance: inner.with_releases(&releases) }
        })
        .collect()
}

/// Offsets covering every partition reachable with `b` in `[0, a]`.
///
/// As `b` grows, job `j` moves down one interval right after
/// `b = ln C_j mod a`, so the partition is constant on intervals open on the
/// left. Each candidate is the left end of such an interval nudged inside.
pub fn derandomize_b(completion: &[f64], a: f64) -> Vec<f64> {
    let nudge = 1e-9 * a;
    let mut out = vec![0.0];
    for &c in completion {
        let x = c.ln().rem_euclid(a) + nudge;
        if x < a {
            out.push(x);
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|x, y| (*x - *y).abs() <= nudge / 2.0);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OffsetMode {
    Random(u64),
    Derandomized,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntervalReport {
    pub index: i64,
    pub jobs: Vec<usize>,
    pub floor: f64,
    pub ceiling: f64,
    pub cost: f64,
    pub guesses_tried: usize,
    pub best_guess: AnyGuess,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecomposeResult {
    pub schedule: Schedule,
    pub cost: f64,
    pub b: f64,
    pub grid: IntervalGrid,
    pub intervals: Vec<IntervalReport>,
    pub lp_objective: f64,
    /// Number of offsets evaluated.
    pub offsets_tried: usize,
}

impl DecomposeResult {
    pub fn guesses_tried(&self) -> usize {
        self.intervals.iter().map(|i| i.guesses_tried).sum()
    }
}

/// Solves every interval for a fixed offset `b` and returns the union.
pub fn solve_with_offset(
    instance: &Instance,
    lp: &LpSolution,
    eps: Epsilon,
    b: f64,
    config: &BoundedConfig,
) -> Result<DecomposeResult> {
    let grid = build_grid(eps, b, lp.max_completion())?;
    let subs = partition_jobs(instance, &lp.completion, &grid);
    let tol = instance.time_tol() + 2.0 * config.lp.tol;
    let pieces: Vec<(Schedule, IntervalReport)> = subs
        .par_iter()
        .map(|sub| {
            let res = solve_bounded(sub, eps, config)?;
            let sigma = tighten(&res.schedule, &sub.instance);
            let ceiling = 3.0 * grid.breakpoint(sub.index + 1);
            let first = sigma.start.iter().copied().fold(f64::INFINITY, f64::min);
            let last = sigma.makespan(&sub.instance);
            if first < sub.floor - tol || last > ceiling + tol {
                return Err(Error::Invariant(format!(
                    "schedule of interval {} occupies [{first}, {last}], outside [{}, {ceiling}]",
                    sub.index, sub.floor
                )));
            }
            let cost = sigma.weighted_completion(&sub.instance);
            let report = IntervalReport {
                index: sub.index,
                jobs: sub.parent.clone(),
                floor: sub.floor,
                ceiling,
                cost,
                guesses_tried: res.guesses_tried,
                best_guess: res.best_guess,
            };
            Ok((sigma, report))
        })
        .collect::<Result<_>>()?;
    let mut start = vec![0.0; instance.len()];
    let mut intervals = Vec::with_capacity(pieces.len());
    for ((sigma, report), sub) in pieces.into_iter().zip(&subs) {
        for (k, &j) in sub.parent.iter().enumerate() {
            start[j] = sigma.start[k];
        }
        intervals.push(report);
    }
    let schedule = Schedule::new(start);
    schedule
        .check_feasible(instance)
        .map_err(|e| Error::Invariant(format!("union of interval schedules is infeasible: {e}")))?;
    let cost = schedule.weighted_completion(instance);
    Ok(DecomposeResult { schedule, cost, b, grid, intervals, lp_objective: lp.objective, offsets_tried: 1 })
}

/// Full pipeline: LP, partition for a random or the best candidate offset,
/// bounded solver per interval, union.
pub fn decompose_and_solve(
    instance: &Instance,
    eps: Epsilon,
    mode: OffsetMode,
    config: &BoundedConfig,
) -> Result<DecomposeResult> {
    check_epsilon(eps)?;
    let lp = solve_lp(instance, &config.lp)?;
    let a = shift_scale(eps);
    match mode {
        OffsetMode::Random(seed) => {
            let b = ChaCha8Rng::seed_from_u64(seed).gen_range(0.0..a);
            solve_with_offset(instance, &lp, eps, b, config)
        }
        OffsetMode::Derandomized => {
            let candidates = derandomize_b(&lp.completion, a);
            debug!("{} candidate offsets", candidates.len());
            let results: Vec<DecomposeResult> = candidates
                .par_iter()
                .map(|&b| solve_with_offset(instance, &lp, eps, b, config))
                .collect::<Result<_>>()?;
            let count = results.len();
            let mut best = results
                .into_iter()
                .reduce(|best, r| if r.cost < best.cost { r } else { best })
                .expect("offset 0 is always a candidate");
            best.offsets_tried = count;
            Ok(best)
        }
    }
}
