//! Guessing by processing-time type: processing times are rounded up to
//! powers of `1 + eps`, and only the smallest start time of each early type
//! is guessed.

use serde::Serialize;

use crate::error::Result;
use crate::instance::Instance;
use crate::rational::Epsilon;

use super::guess::{early_bound, release_fixpoint};

/// Rounded instance plus the type (exponent) of every job.
#[derive(Debug, Clone)]
pub struct RoundedInstance {
    pub instance: Instance,
    pub types: Vec<i32>,
}

fn power(base: f64, i: i32) -> f64 {
    base.powi(i)
}

/// Smallest `i >= 0` with `(1 + eps)^i >= p`.
fn type_of(p: f64, base: f64) -> i32 {
    let mut i = (p.ln() / base.ln()).ceil().max(0.0) as i32;
    while i > 0 && power(base, i - 1) >= p {
        i -= 1;
    }
    while power(base, i) < p {
        i += 1;
    }
    i
}

/// Rounds every processing time up to the next power of `1 + eps`.
pub fn round_processing(instance: &Instance, eps: Epsilon) -> RoundedInstance {
    let base = 1.0 + eps.value();
    let types: Vec<i32> = instance.jobs().iter().map(|j| type_of(j.p, base)).collect();
    let p: Vec<f64> = types.iter().map(|&i| power(base, i)).collect();
    RoundedInstance { instance: instance.with_processing(&p), types }
}

/// Type `kind` is early, its first job starting at `step * eps * (1+eps)^kind`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct EarlyType {
    pub kind: i32,
    pub step: u32,
}

impl EarlyType {
    pub fn start(&self, eps: Epsilon) -> f64 {
        eps.grid_point(self.step, power(1.0 + eps.value(), self.kind))
    }

    pub fn length(&self, eps: Epsilon) -> f64 {
        power(1.0 + eps.value(), self.kind)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct TypeGuess {
    pub early: Vec<EarlyType>,
}

impl TypeGuess {
    pub fn busy_intervals(&self, eps: Epsilon) -> Vec<(f64, f64)> {
        self.early.iter().map(|e| (e.start(eps), e.start(eps) + e.length(eps))).collect()
    }
}

/// Types present in the instance with `L < (1+eps)^i < (1+eps)^2 beta L`.
pub fn eligible_types(rounded: &RoundedInstance, eps: Epsilon, floor: f64, beta: f64) -> Vec<i32> {
    let base = 1.0 + eps.value();
    let hi = base * base * beta * floor;
    let mut kinds: Vec<i32> = rounded
        .types
        .iter()
        .copied()
        .filter(|&i| {
            let len = power(base, i);
            floor < len && len < hi
        })
        .collect();
    kinds.sort_unstable();
    kinds.dedup();
    kinds
}

/// All type-level guesses: a subset of the eligible types, each with a grid
/// start below its length and at or after the earliest release of its jobs.
/// Overlapping early types and more than [`early_bound`] of them are pruned.
pub fn enumerate_type_guesses(
    rounded: &RoundedInstance,
    eps: Epsilon,
    floor: f64,
    beta: f64,
    budget: Option<usize>,
) -> Vec<TypeGuess> {
    let kinds = eligible_types(rounded, eps, floor, beta);
    let tol = rounded.instance.time_tol();
    let earliest: Vec<f64> = kinds
        .iter()
        .map(|&k| {
            rounded
                .types
                .iter()
                .zip(rounded.instance.jobs())
                .filter(|(&t, _)| t == k)
                .map(|(_, j)| j.r)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let max_early = early_bound(eps, beta);
    let steps = eps.steps_below_one();
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(
        idx: usize,
        kinds: &[i32],
        earliest: &[f64],
        ctx: (Epsilon, f64, usize, u32, Option<usize>),
        current: &mut Vec<EarlyType>,
        out: &mut Vec<TypeGuess>,
    ) {
        let (eps, tol, max_early, steps, budget) = ctx;
        if budget.is_some_and(|b| out.len() >= b) {
            return;
        }
        if idx == kinds.len() {
            out.push(TypeGuess { early: current.clone() });
            return;
        }
        rec(idx + 1, kinds, earliest, ctx, current, out);
        if current.len() >= max_early {
            return;
        }
        for step in 0..steps {
            let cand = EarlyType { kind: kinds[idx], step };
            let (s, c) = (cand.start(eps), cand.start(eps) + cand.length(eps));
            if s < earliest[idx] - tol {
                continue;
            }
            let clash = current.iter().any(|o| {
                let (os, oc) = (o.start(eps), o.start(eps) + o.length(eps));
                !(oc <= s + tol || c <= os + tol)
            });
            if !clash {
                current.push(cand);
                rec(idx + 1, kinds, earliest, ctx, current, out);
                current.pop();
            }
        }
    }
    rec(0, &kinds, &earliest, (eps, tol, max_early, steps, budget), &mut current, &mut out);
    out
}

/// Release adjustment keyed by type, applied to the rounded instance.
pub fn adjust_release_times_typed(rounded: &RoundedInstance, guess: &TypeGuess, eps: Epsilon) -> Result<Instance> {
    let inst = &rounded.instance;
    let lower: Vec<f64> = inst
        .jobs()
        .iter()
        .zip(&rounded.types)
        .map(|(j, t)| match guess.early.iter().find(|e| e.kind == *t) {
            Some(e) => j.r.max(e.start(eps)),
            None => j.r.max(j.p),
        })
        .collect();
    let releases = release_fixpoint(inst, lower, &guess.busy_intervals(eps))?;
    Ok(inst.with_releases(&releases))
}
