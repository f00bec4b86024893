//! Moving a schedule onto the start-time grid: every job `j` starts at a
//! multiple of `eps * p_j`. Applied to an exact optimum this yields the
//! reference schedule that the guesses try to describe.

use crate::instance::Instance;
use crate::rational::Epsilon;
use crate::schedule::Schedule;

use super::guess::{EarlyJob, Guess};

#[derive(Debug, Clone)]
pub struct GridSchedule {
    pub schedule: Schedule,
    /// Start of job `j` is `steps[j] * eps * p_j`.
    pub steps: Vec<u64>,
}

impl GridSchedule {
    /// Jobs starting before their own processing time, as a guess.
    pub fn early_guess(&self, eps: Epsilon) -> Guess {
        let below = eps.steps_below_one() as u64;
        let early = (0..self.steps.len())
            .filter(|&j| self.steps[j] < below)
            .map(|j| EarlyJob { job: j, step: self.steps[j] as u32 })
            .collect();
        Guess { early }
    }

    pub fn early_count(&self, eps: Epsilon) -> usize {
        self.early_guess(eps).len()
    }
}

/// Processes jobs in order of completion and starts each at the first grid
/// multiple of `eps * p_j` that is no earlier than its old start and the
/// completion of the previously placed job.
pub fn grid_shift(instance: &Instance, schedule: &Schedule, eps: Epsilon) -> GridSchedule {
    let n = instance.len();
    let tol = instance.time_tol();
    let mut seq: Vec<usize> = (0..n).collect();
    seq.sort_by(|&a, &b| {
        schedule
            .completion(instance, a)
            .total_cmp(&schedule.completion(instance, b))
            .then(a.cmp(&b))
    });
    let mut start = vec![0.0; n];
    let mut steps = vec![0u64; n];
    let mut free = 0.0_f64;
    for j in seq {
        let unit = eps.value() * instance.job(j).p;
        let earliest = schedule.start[j].max(free);
        let mut k = (earliest / unit - 1e-9).ceil().max(0.0) as u64;
        while eps.grid_point(k as u32, instance.job(j).p) < earliest - tol {
            k += 1;
        }
        steps[j] = k;
        start[j] = eps.grid_point(k as u32, instance.job(j).p);
        free = start[j] + instance.job(j).p;
    }
    GridSchedule { schedule: Schedule::new(start), steps }
}

/// Jobs whose completion grew by more than a factor `1 + eps`.
pub fn stretch_violations(instance: &Instance, before: &Schedule, after: &Schedule, eps: Epsilon) -> Vec<usize> {
    let tol = instance.time_tol();
    (0..instance.len())
        .filter(|&j| after.completion(instance, j) > (1.0 + eps.value()) * before.completion(instance, j) + tol)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{exact_opt, DP_CAP};

    #[test]
    fn shift_rounds_up_in_completion_order() {
        // eps = 1/2: job 0 (p = 4) grid 2, job 1 (p = 3) grid 1.5.
        let inst = Instance::from_triples(&[(4, 1, 1), (3, 0, 1)]).unwrap();
        let s = Schedule::new(vec![3.0, 0.0]);
        let g = grid_shift(&inst, &s, "1/2".parse().unwrap());
        assert_eq!(g.schedule.start, vec![4.0, 0.0]);
        assert_eq!(g.steps, vec![2, 0]);
        g.schedule.check_feasible(&inst).unwrap();
        assert!(stretch_violations(&inst, &s, &g.schedule, "1/2".parse().unwrap()).is_empty());
        // Job 1 starts at 0 < 3 and is early, job 0 starts at 4 = p_0 and is not.
        assert_eq!(g.early_guess("1/2".parse().unwrap()).early, vec![EarlyJob { job: 1, step: 0 }]);
    }

    #[test]
    fn optimum_stays_within_factor() {
        let inst = Instance::from_triples(&[(3, 2, 1), (5, 0, 2), (2, 7, 3), (4, 4, 1)]).unwrap();
        let opt = exact_opt(&inst, DP_CAP).unwrap();
        for e in ["1", "1/2", "1/3", "1/5"] {
            let eps: Epsilon = e.parse().unwrap();
            let g = grid_shift(&inst, &opt.schedule, eps);
            g.schedule.check_feasible(&inst).unwrap();
            assert!(stretch_violations(&inst, &opt.schedule, &g.schedule, eps).is_empty());
        }
    }
}
