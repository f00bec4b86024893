use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;

/// Start times for every job of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub start: Vec<f64>,
}

impl Schedule {
    pub fn new(start: Vec<f64>) -> Self {
        Schedule { start }
    }

    pub fn len(&self) -> usize {
        self.start.len()
    }

    pub fn is_empty(&self) -> bool {
        self.start.is_empty()
    }

    pub fn completion(&self, instance: &Instance, j: usize) -> f64 {
        self.start[j] + instance.job(j).p
    }

    pub fn completions(&self, instance: &Instance) -> Vec<f64> {
        (0..self.len()).map(|j| self.completion(instance, j)).collect()
    }

    /// Job ids sorted by start time (ties by id).
    pub fn job_sequence(&self) -> Vec<usize> {
        let mut seq: Vec<usize> = (0..self.len()).collect();
        seq.sort_by(|&a, &b| self.start[a].total_cmp(&self.start[b]).then(a.cmp(&b)));
        seq
    }

    pub fn makespan(&self, instance: &Instance) -> f64 {
        (0..self.len()).map(|j| self.completion(instance, j)).fold(0.0, f64::max)
    }

    /// Weighted completion time without any feasibility check.
    pub fn weighted_completion(&self, instance: &Instance) -> f64 {
        (0..self.len()).map(|j| instance.job(j).w * self.completion(instance, j)).sum()
    }

    /// Checks release, machine and precedence constraints; reports the first violation.
    pub fn check_feasible(&self, instance: &Instance) -> Result<()> {
        if self.len() != instance.len() {
            return Err(Error::Infeasible(format!(
                "schedule has {} start times for {} jobs",
                self.len(),
                instance.len()
            )));
        }
        let tol = instance.time_tol();
        for (j, &s) in self.start.iter().enumerate() {
            if !s.is_finite() {
                return Err(Error::Infeasible(format!("job {j} has start time {s}")));
            }
            if s < instance.job(j).r - tol {
                return Err(Error::Infeasible(format!(
                    "job {j} starts at {s} before its release {}",
                    instance.job(j).r
                )));
            }
        }
        let seq = self.job_sequence();
        for pair in seq.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if self.completion(instance, a) > self.start[b] + tol {
                return Err(Error::Infeasible(format!("jobs {a} and {b} overlap")));
            }
        }
        for &(a, b) in instance.prec() {
            if self.start[b] < self.completion(instance, a) - tol {
                return Err(Error::Infeasible(format!(
                    "job {b} starts at {} before its predecessor {a} completes at {}",
                    self.start[b],
                    self.completion(instance, a)
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self, instance: &Instance) -> ScheduleJson {
        ScheduleJson {
            start: self.start.iter().map(|s| decimal(*s)).collect(),
            cost: decimal(self.weighted_completion(instance)),
        }
    }
}

/// Sum of `w_j C_j` for a feasible schedule.
pub fn schedule_cost(schedule: &Schedule, instance: &Instance) -> Result<f64> {
    schedule.check_feasible(instance)?;
    Ok(schedule.weighted_completion(instance))
}

/// Shifts every job as far left as its release, its predecessors and the job
/// running before it allow. Processing in start order reaches the fixpoint in
/// one pass because a job's constraints only involve jobs that start earlier.
pub fn tighten(schedule: &Schedule, instance: &Instance) -> Schedule {
    let mut start = schedule.start.clone();
    let mut machine_free = 0.0_f64;
    for j in schedule.job_sequence() {
        let pred_done = instance
            .preds(j)
            .iter()
            .map(|&k| start[k] + instance.job(k).p)
            .fold(0.0, f64::max);
        let earliest = instance.job(j).r.max(pred_done).max(machine_free);
        start[j] = earliest.min(start[j]).max(instance.job(j).r);
        machine_free = start[j] + instance.job(j).p;
    }
    Schedule { start }
}

/// Schedule as emitted by the command line tools.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleJson {
    pub start: Vec<String>,
    pub cost: String,
}

/// Decimal rendering of a time or cost (never uses exponent notation).
pub fn decimal(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x}")
}
