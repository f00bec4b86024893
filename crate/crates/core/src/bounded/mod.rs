//! Solver for bounded instances: guess the early jobs of a near-optimal
//! grid-aligned schedule, raise release times accordingly, run LP+LS and
//! keep the cheapest schedule.

pub mod guess;
pub mod restricted;
pub mod typed;

use log::{debug, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::decompose::SubInstance;
use crate::error::{Error, Result};
use crate::exact::time_sequence;
use crate::instance::Instance;
use crate::list_sched::{lp_ls, LpLsResult, LsVariant};
use crate::lp::LpConfig;
use crate::rational::Epsilon;
use crate::schedule::{tighten, Schedule};

pub use guess::{adjust_release_times, early_bound, enumerate_guesses, EarlyJob, Guess};
pub use typed::{adjust_release_times_typed, enumerate_type_guesses, round_processing, TypeGuess};

/// Default instance size up to which exhaustive guessing runs without a budget.
pub const GUESS_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundedMode {
    Exhaustive,
    Typed,
    EmptyGuess,
}

impl std::str::FromStr for BoundedMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(BoundedMode::Exhaustive),
            "typed" => Ok(BoundedMode::Typed),
            "empty-guess" => Ok(BoundedMode::EmptyGuess),
            _ => Err(Error::InvalidParameter(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundedConfig {
    pub mode: BoundedMode,
    /// Maximum number of guesses to evaluate.
    pub budget: Option<usize>,
    /// Largest instance for which exhaustive guessing needs no budget.
    pub guess_cap: usize,
    pub lp: LpConfig,
    pub variant: LsVariant,
}

impl Default for BoundedConfig {
    fn default() -> Self {
        BoundedConfig {
            mode: BoundedMode::Exhaustive,
            budget: None,
            guess_cap: GUESS_CAP,
            lp: LpConfig::default(),
            variant: LsVariant::Available,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum AnyGuess {
    Jobs(Guess),
    Types(TypeGuess),
}

/// One evaluated guess.
#[derive(Debug, Clone)]
pub struct GuessOutcome {
    /// Instance with adjusted release times that LP+LS ran on.
    pub adjusted: Instance,
    pub run: LpLsResult,
    /// The LP+LS schedule, timed on the original processing times and
    /// tightened against the original release times.
    pub schedule: Schedule,
    pub cost: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundedResult {
    pub schedule: Schedule,
    pub cost: f64,
    pub guesses_tried: usize,
    pub guesses_failed: usize,
    pub best_guess: AnyGuess,
    /// Incumbent cost after each evaluated guess, in stream order.
    pub incumbent_trace: Vec<f64>,
}

fn finish(instance: &Instance, schedule: &Schedule) -> Result<(Schedule, f64)> {
    let schedule = tighten(schedule, instance);
    schedule
        .check_feasible(instance)
        .map_err(|e| Error::Invariant(format!("guess produced a schedule infeasible for the bounded instance: {e}")))?;
    let cost = schedule.weighted_completion(instance);
    Ok((schedule, cost))
}

/// Adjusts release times for `guess` and runs LP+LS on the result.
pub fn evaluate_guess(instance: &Instance, guess: &Guess, eps: Epsilon, config: &BoundedConfig) -> Result<GuessOutcome> {
    let adjusted = adjust_release_times(instance, guess, eps)?;
    let run = lp_ls(&adjusted, &config.lp, config.variant)?;
    let (schedule, cost) = finish(instance, &run.schedule)?;
    Ok(GuessOutcome { adjusted, run, schedule, cost })
}

/// Typed variant: LP+LS runs on rounded processing times, and the sequence it
/// finds is then timed on the original processing times.
pub fn evaluate_type_guess(
    instance: &Instance,
    rounded: &typed::RoundedInstance,
    guess: &TypeGuess,
    eps: Epsilon,
    config: &BoundedConfig,
) -> Result<GuessOutcome> {
    let adjusted = adjust_release_times_typed(rounded, guess, eps)?;
    let run = lp_ls(&adjusted, &config.lp, config.variant)?;
    let releases: Vec<f64> = adjusted.jobs().iter().map(|j| j.r).collect();
    let (retimed, _) = time_sequence(&instance.with_releases(&releases), &run.schedule.job_sequence());
    let (schedule, cost) = finish(instance, &retimed)?;
    Ok(GuessOutcome { adjusted, run, schedule, cost })
}

fn reduce(outcomes: Vec<(AnyGuess, Result<GuessOutcome>)>) -> Result<BoundedResult> {
    let guesses_tried = outcomes.len();
    let mut best: Option<(AnyGuess, GuessOutcome)> = None;
    let mut trace = Vec::with_capacity(guesses_tried);
    let mut failed = 0;
    let mut last_error = None;
    for (guess, outcome) in outcomes {
        match outcome {
            Ok(o) => {
                if best.as_ref().is_none_or(|(_, b)| o.cost < b.cost) {
                    best = Some((guess, o));
                }
            }
            Err(Error::Invariant(msg)) => return Err(Error::Invariant(msg)),
            Err(e) => {
                warn!("skipping guess {guess:?}: {e}");
                failed += 1;
                last_error = Some(e);
            }
        }
        trace.push(best.as_ref().map_or(f64::INFINITY, |(_, b)| b.cost));
    }
    match best {
        Some((best_guess, o)) => Ok(BoundedResult {
            schedule: o.schedule,
            cost: o.cost,
            guesses_tried,
            guesses_failed: failed,
            best_guess,
            incumbent_trace: trace,
        }),
        None => Err(Error::AllGuessesFailed(Box::new(
            last_error.unwrap_or_else(|| Error::Invariant("no guess was evaluated".into())),
        ))),
    }
}

/// Best schedule over all guesses of the configured mode.
pub fn solve_bounded(sub: &SubInstance, eps: Epsilon, config: &BoundedConfig) -> Result<BoundedResult> {
    let inst = &sub.instance;
    let outcomes: Vec<(AnyGuess, Result<GuessOutcome>)> = match config.mode {
        BoundedMode::EmptyGuess => {
            let g = Guess::empty();
            let o = evaluate_guess(inst, &g, eps, config);
            vec![(AnyGuess::Jobs(g), o)]
        }
        BoundedMode::Exhaustive => {
            if inst.len() > config.guess_cap && config.budget.is_none() {
                return Err(Error::GuessBudgetRequired { n: inst.len() });
            }
            let guesses: Vec<Guess> = enumerate_guesses(inst, eps, sub.beta, config.budget).collect();
            debug!("{} job guesses for {} jobs", guesses.len(), inst.len());
            guesses
                .into_par_iter()
                .map(|g| {
                    let o = evaluate_guess(inst, &g, eps, config);
                    (AnyGuess::Jobs(g), o)
                })
                .collect()
        }
        BoundedMode::Typed => {
            let rounded = round_processing(inst, eps);
            let guesses = enumerate_type_guesses(&rounded, eps, sub.floor, sub.beta, config.budget);
            debug!("{} type guesses for {} jobs", guesses.len(), inst.len());
            guesses
                .into_par_iter()
                .map(|g| {
                    let o = evaluate_type_guess(inst, &rounded, &g, eps, config);
                    (AnyGuess::Types(g), o)
                })
                .collect()
        }
    };
    reduce(outcomes)
}
