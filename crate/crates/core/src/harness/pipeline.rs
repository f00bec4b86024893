//! End-to-end runs and benchmark reports.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounded::{BoundedConfig, BoundedMode};
use crate::decompose::{decompose_and_solve, OffsetMode};
use crate::error::{Error, Result};
use crate::exact::{exact_opt, DP_CAP};
use crate::instance::Instance;
use crate::list_sched::{lp_ls, LsVariant};
use crate::rational::Epsilon;

use super::generate::{generate, GeneratorConfig};

/// Absolute slack on certified bounds.
pub const BOUND_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub offset: OffsetMode,
    pub bounded: BoundedConfig,
    /// Run the exact oracle when the instance has at most this many jobs.
    pub exact_cap: Option<usize>,
    /// Also run LP+LS without guessing and the strict-order variant.
    pub baselines: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { offset: OffsetMode::Derandomized, bounded: BoundedConfig::default(), exact_cap: None, baselines: false }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub digest: String,
    pub n: usize,
    pub z_lp: f64,
    pub alg_cost: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_opt: Option<f64>,
    pub ratio_lp: f64,
    pub b: f64,
    pub guesses_tried: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lpls_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict_cost: Option<f64>,
    pub wall_ms: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

pub fn run_pipeline(instance: &Instance, eps: Epsilon, options: &PipelineOptions) -> Result<RunRecord> {
    let digest = instance.digest();
    let attach = |e: Error| Error::Run { digest: digest.clone(), source: Box::new(e) };
    let clock = Instant::now();
    let res = decompose_and_solve(instance, eps, options.offset, &options.bounded).map_err(attach)?;
    res.schedule.check_feasible(instance).map_err(attach)?;
    let opt_cost = match options.exact_cap {
        Some(cap) if instance.len() <= cap.min(DP_CAP) => Some(exact_opt(instance, cap).map_err(attach)?.cost),
        _ => None,
    };
    let (lpls_cost, strict_cost) = if options.baselines {
        let a = lp_ls(instance, &options.bounded.lp, LsVariant::Available).map_err(attach)?;
        let s = lp_ls(instance, &options.bounded.lp, LsVariant::Strict).map_err(attach)?;
        (Some(a.cost), Some(s.cost))
    } else {
        (None, None)
    };
    Ok(RunRecord {
        digest: digest.clone(),
        n: instance.len(),
        z_lp: res.lp_objective,
        alg_cost: res.cost,
        opt_cost,
        ratio_opt: opt_cost.map(|o| ratio(res.cost, o)),
        ratio_lp: ratio(res.cost, res.lp_objective),
        b: res.b,
        guesses_tried: res.guesses_tried(),
        lpls_cost,
        strict_cost,
        wall_ms: clock.elapsed().as_secs_f64() * 1e3,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRecord {
    pub family: String,
    pub seed: u64,
    pub epsilon: Epsilon,
    #[serde(flatten)]
    pub run: RunRecord,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilySummary {
    pub family: String,
    pub epsilon: Epsilon,
    pub count: usize,
    pub max_ratio_lp: f64,
    pub mean_ratio_lp: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_ratio_opt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_ratio_opt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_lpls_ratio_lp: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub summary: Vec<FamilySummary>,
    /// Certified bounds that some run broke.
    pub violations: Vec<String>,
}

/// Bounds that a run must satisfy, given how it was produced.
pub fn certified_violations(record: &BenchRecord, options: &PipelineOptions) -> Vec<String> {
    let r = &record.run;
    let e = record.epsilon.value();
    let mut out = Vec::new();
    let tag = format!("{} seed {} ({})", record.family, record.seed, r.digest);
    if let Some(opt) = r.opt_cost {
        if r.z_lp > opt + BOUND_TOL * opt.max(1.0) {
            out.push(format!("{tag}: LP value {} above optimum {opt}", r.z_lp));
        }
        if r.alg_cost < opt - BOUND_TOL * opt.max(1.0) {
            out.push(format!("{tag}: cost {} below optimum {opt}", r.alg_cost));
        }
        let exhaustive = options.bounded.mode == BoundedMode::Exhaustive && options.bounded.budget.is_none();
        let derandomized = options.offset == OffsetMode::Derandomized;
        let bound = 2.0 * (1.0 + e) * (1.0 + e) * opt + BOUND_TOL;
        if exhaustive && derandomized && r.alg_cost > bound {
            out.push(format!("{tag}: cost {} above 2(1+eps)^2 OPT = {bound}", r.alg_cost));
        }
    }
    if record.family == "p_le_r" {
        if let Some(c) = r.lpls_cost {
            if c > 2.0 * r.z_lp + BOUND_TOL {
                out.push(format!("{tag}: LP+LS cost {c} above twice the LP value {}", r.z_lp));
            }
        }
    }
    out
}

fn summarize(records: &[BenchRecord]) -> Vec<FamilySummary> {
    let mut keys: Vec<(String, Epsilon)> = Vec::new();
    for r in records {
        if !keys.iter().any(|(f, e)| *f == r.family && *e == r.epsilon) {
            keys.push((r.family.clone(), r.epsilon));
        }
    }
    keys.into_iter()
        .map(|(family, epsilon)| {
            let group: Vec<&RunRecord> =
                records.iter().filter(|r| r.family == family && r.epsilon == epsilon).map(|r| &r.run).collect();
            let count = group.len();
            let lp: Vec<f64> = group.iter().map(|r| r.ratio_lp).collect();
            let opt: Vec<f64> = group.iter().filter_map(|r| r.ratio_opt).collect();
            let base: Vec<f64> = group.iter().filter_map(|r| r.lpls_cost.map(|c| ratio(c, r.z_lp))).collect();
            let max = |v: &[f64]| (!v.is_empty()).then(|| v.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
            FamilySummary {
                family,
                epsilon,
                count,
                max_ratio_lp: max(&lp).unwrap_or(0.0),
                mean_ratio_lp: mean(&lp).unwrap_or(0.0),
                max_ratio_opt: max(&opt),
                mean_ratio_opt: mean(&opt),
                max_lpls_ratio_lp: max(&base),
            }
        })
        .collect()
}

/// Runs every config for every epsilon, `trials` times with seeds
/// `seed, seed + 1, ...`. Records come in (config, epsilon, trial) order.
pub fn bench(configs: &[GeneratorConfig], epsilons: &[Epsilon], trials: usize, options: &PipelineOptions) -> Result<BenchReport> {
    let mut jobs = Vec::new();
    for cfg in configs {
        for &eps in epsilons {
            for t in 0..trials {
                let mut c = *cfg;
                c.seed = cfg.seed.wrapping_add(t as u64);
                jobs.push((c, eps));
            }
        }
    }
    let records: Vec<BenchRecord> = jobs
        .par_iter()
        .map(|(cfg, eps)| {
            let inst = generate(cfg)?;
            let run = run_pipeline(&inst, *eps, options)?;
            Ok(BenchRecord { family: cfg.family.name(), seed: cfg.seed, epsilon: *eps, run })
        })
        .collect::<Result<_>>()?;
    let violations = records.iter().flat_map(|r| certified_violations(r, options)).collect();
    let summary = summarize(&records);
    Ok(BenchReport { records, summary, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::generate::Family;

    #[test]
    fn paper_example_baseline_ratio() {
        let inst = generate(&GeneratorConfig::new(Family::TwoJob { m: 10 }, 2, 0)).unwrap();
        let opts = PipelineOptions { exact_cap: Some(DP_CAP), baselines: true, ..Default::default() };
        let rec = run_pipeline(&inst, Epsilon::from_integer(1).unwrap(), &opts).unwrap();
        assert_eq!(rec.lpls_cost, Some(110.0));
        assert_eq!(rec.opt_cost, Some(20.0));
        assert_eq!(rec.lpls_cost.unwrap() / rec.opt_cost.unwrap(), 5.5);
        assert!(rec.alg_cost <= 8.0 * 20.0);
    }

    #[test]
    fn empty_options_report_lp_and_cost() {
        let inst = Instance::from_triples(&[(2, 0, 1), (1, 1, 3)]).unwrap();
        let rec = run_pipeline(&inst, Epsilon::from_integer(1).unwrap(), &PipelineOptions::default()).unwrap();
        let json = serde_json::to_value(&rec).unwrap();
        assert!(json.get("z_lp").is_some() && json.get("alg_cost").is_some());
        assert!(json.get("opt_cost").is_none() && json.get("lpls_cost").is_none());
    }

    #[test]
    fn zero_trials() {
        let cfg = GeneratorConfig::new(Family::Uniform, 5, 0);
        let rep = bench(&[cfg], &[Epsilon::from_integer(1).unwrap()], 0, &PipelineOptions::default()).unwrap();
        assert!(rep.records.is_empty() && rep.summary.is_empty() && rep.violations.is_empty());
    }
}
