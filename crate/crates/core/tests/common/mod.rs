#![allow(dead_code)]

use proptest::prelude::*;

use prec_sched::instance::{InstanceFile, JobSpec};
use prec_sched::{normalize_release_times, Instance};

/// Random integer instance file with `n` in `sizes`, edges only from lower to
/// higher ids (so always acyclic), not necessarily closed or normalized.
pub fn instance_file(sizes: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = InstanceFile> {
    sizes.prop_flat_map(|n| {
        let jobs = prop::collection::vec((1i64..=10, 0i64..=20, 0i64..=10), n);
        let edges = prop::collection::vec(prop::bool::weighted(0.25), n * n.saturating_sub(1) / 2);
        (jobs, edges).prop_map(move |(jobs, edges)| {
            let mut prec = Vec::new();
            let mut k = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if edges[k] {
                        prec.push([a, b]);
                    }
                    k += 1;
                }
            }
            InstanceFile { jobs: jobs.into_iter().map(|(p, r, w)| JobSpec { p, r, w }).collect(), prec }
        })
    })
}

/// Closed and release-normalized instance.
pub fn instance(sizes: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Instance> {
    instance_file(sizes).prop_map(|f| normalize_release_times(&f.into_instance().unwrap()))
}

/// All precedence-consistent job sequences, by plain recursion.
pub fn linear_extensions(instance: &Instance) -> Vec<Vec<usize>> {
    fn rec(inst: &Instance, seq: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if seq.len() == inst.len() {
            out.push(seq.clone());
            return;
        }
        for j in 0..inst.len() {
            if !used[j] && inst.preds(j).iter().all(|&k| used[k]) {
                used[j] = true;
                seq.push(j);
                rec(inst, seq, used, out);
                seq.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(instance, &mut Vec::new(), &mut vec![false; instance.len()], &mut out);
    out
}

/// Cost of a sequence when every job starts as soon as the machine and its release allow.
pub fn sequence_cost(instance: &Instance, seq: &[usize]) -> f64 {
    let mut t = 0.0_f64;
    let mut cost = 0.0;
    for &j in seq {
        let job = instance.job(j);
        t = t.max(job.r) + job.p;
        cost += job.w * t;
    }
    cost
}
