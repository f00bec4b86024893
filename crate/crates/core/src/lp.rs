//! The completion-time relaxation
//!
//! ```text
//! min  sum_j w_j C_j
//! s.t. C_j <= C_k                                  for j before k
//!      sum_{j in U} p_j C_j >= r_min(U) p(U) + p(U)^2 / 2   for all U
//! ```
//!
//! solved by a cutting-plane loop over [`DualSimplex`]. The exponential family
//! of load constraints is separated either exhaustively or by scanning
//! C-ordered prefixes for every release threshold.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::simplex::DualSimplex;

/// Default absolute tolerance of the relaxation.
pub const LP_TOL: f64 = 1e-7;
/// Largest instance for which exhaustive separation is allowed by default.
pub const EXHAUSTIVE_CAP: usize = 18;

/// One load constraint `sum_{j in U} p_j C_j >= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cut {
    pub subset: Vec<usize>,
    pub rhs: f64,
}

impl Cut {
    /// Builds the cut for `subset` (sorted and deduplicated).
    pub fn new(instance: &Instance, mut subset: Vec<usize>) -> Cut {
        subset.sort_unstable();
        subset.dedup();
        assert!(!subset.is_empty(), "cuts need a nonempty job set");
        let p: f64 = subset.iter().map(|&j| instance.job(j).p).sum();
        let rmin = subset.iter().map(|&j| instance.job(j).r).fold(f64::INFINITY, f64::min);
        Cut { subset, rhs: rmin * p + 0.5 * p * p }
    }

    pub fn lhs(&self, completion: &[f64], instance: &Instance) -> f64 {
        self.subset.iter().map(|&j| instance.job(j).p * completion[j]).sum()
    }

    /// `rhs - lhs`; positive means violated.
    pub fn violation(&self, completion: &[f64], instance: &Instance) -> f64 {
        self.rhs - self.lhs(completion, instance)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Separation {
    /// Exhaustive up to [`LpConfig::exhaustive_cap`] jobs, fast above.
    #[default]
    Auto,
    Exhaustive,
    Fast,
}

#[derive(Debug, Clone)]
pub struct LpConfig {
    pub tol: f64,
    pub separation: Separation,
    pub exhaustive_cap: usize,
    /// Cap on cutting-plane rounds; `None` means `10 n^2` (at least 20).
    pub round_cap: Option<usize>,
    /// Adds `C_j >= r_j + p_j`. Off by default: the analysis only uses the
    /// singleton load constraints.
    pub strengthen: bool,
}

impl Default for LpConfig {
    fn default() -> Self {
        LpConfig {
            tol: LP_TOL,
            separation: Separation::Auto,
            exhaustive_cap: EXHAUSTIVE_CAP,
            round_cap: None,
            strengthen: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    /// Fractional completion times `C_j`.
    pub completion: Vec<f64>,
    /// `Z = sum_j w_j C_j`.
    pub objective: f64,
    /// Every load constraint that was added, singletons first.
    pub cuts: Vec<Cut>,
    /// Objective after each cutting-plane round.
    pub objective_trace: Vec<f64>,
}

impl LpSolution {
    pub fn max_completion(&self) -> f64 {
        self.completion.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_completion(&self) -> f64 {
        self.completion.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Solves the relaxation for a validated, release-normalized instance.
pub fn solve_lp(instance: &Instance, config: &LpConfig) -> Result<LpSolution> {
    let n = instance.len();
    if n == 0 {
        return Ok(LpSolution { completion: vec![], objective: 0.0, cuts: vec![], objective_trace: vec![] });
    }
    let separation = match config.separation {
        Separation::Auto if n <= config.exhaustive_cap => Separation::Exhaustive,
        Separation::Auto => Separation::Fast,
        s => s,
    };
    let cap = config.round_cap.unwrap_or((10 * n * n).max(20));
    let cost: Vec<f64> = instance.jobs().iter().map(|j| j.w).collect();

    let mut base_rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for &(a, b) in instance.prec() {
        let mut row = vec![0.0; n];
        row[a] = -1.0;
        row[b] = 1.0;
        base_rows.push((row, 0.0));
    }
    if config.strengthen {
        for (j, job) in instance.jobs().iter().enumerate() {
            let mut row = vec![0.0; n];
            row[j] = 1.0;
            base_rows.push((row, job.r + job.p));
        }
    }
    let mut cuts: Vec<Cut> = (0..n).map(|j| Cut::new(instance, vec![j])).collect();

    let build = |cuts: &[Cut]| -> Result<DualSimplex> {
        let mut lp = DualSimplex::new(cost.clone());
        for (row, b) in &base_rows {
            lp.add_row(row, *b);
        }
        for cut in cuts {
            lp.add_row(&cut_row(instance, cut), cut.rhs);
        }
        lp.solve()?;
        Ok(lp)
    };

    let mut lp = build(&cuts)?;
    let mut trace = vec![lp.objective()];
    for _ in 0..cap {
        let x = lp.primal();
        let found = match separation {
            Separation::Fast => separate_fast(&x, instance, config.tol),
            _ => separate_exhaustive(&x, instance, config.tol, config.exhaustive_cap)?,
        };
        let Some((cut, _)) = found else {
            let objective = x.iter().zip(&cost).map(|(c, w)| c * w).sum();
            return Ok(LpSolution { completion: x, objective, cuts, objective_trace: trace });
        };
        if cuts.iter().any(|c| c.subset == cut.subset) {
            // Accumulated round-off: refactor from scratch.
            lp = build(&cuts)?;
            let x = lp.primal();
            if cut.violation(&x, instance) > config.tol {
                return Err(Error::LpIterationCap { cap, cut });
            }
        } else {
            lp.add_row(&cut_row(instance, &cut), cut.rhs);
            cuts.push(cut);
            lp.solve()?;
        }
        trace.push(lp.objective());
    }
    let x = lp.primal();
    let cut = match separate_fast(&x, instance, config.tol) {
        Some((cut, _)) => cut,
        None => Cut::new(instance, (0..n).collect()),
    };
    Err(Error::LpIterationCap { cap, cut })
}

fn cut_row(instance: &Instance, cut: &Cut) -> Vec<f64> {
    let mut row = vec![0.0; instance.len()];
    for &j in &cut.subset {
        row[j] = instance.job(j).p;
    }
    row
}

/// Scans every nonempty subset and returns the most violated load
/// constraint with its violation, or `None` if no violation exceeds `tol`.
pub fn separate_exhaustive(
    completion: &[f64],
    instance: &Instance,
    tol: f64,
    cap: usize,
) -> Result<Option<(Cut, f64)>> {
    let n = instance.len();
    if n > cap || n >= usize::BITS as usize {
        return Err(Error::SeparationTooLarge { n, cap });
    }
    if n == 0 {
        return Ok(None);
    }
    let size = 1usize << n;
    let mut load = vec![0.0; size];
    let mut lhs = vec![0.0; size];
    let mut rmin = vec![f64::INFINITY; size];
    let mut best: Option<(usize, f64)> = None;
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let job = instance.job(low);
        load[mask] = load[rest] + job.p;
        lhs[mask] = lhs[rest] + job.p * completion[low];
        rmin[mask] = rmin[rest].min(job.r);
        let violation = rmin[mask] * load[mask] + 0.5 * load[mask] * load[mask] - lhs[mask];
        if violation > tol && best.is_none_or(|(_, v)| violation > v) {
            best = Some((mask, violation));
        }
    }
    Ok(best.map(|(mask, _)| {
        let subset: Vec<usize> = (0..n).filter(|&j| mask >> j & 1 == 1).collect();
        let cut = Cut::new(instance, subset);
        let v = cut.violation(completion, instance);
        (cut, v)
    }))
}

/// For every distinct release value `r`, sorts the jobs released at or after
/// `r` by `C_j` and evaluates every prefix. Returns the most violated prefix
/// (its violation measured with its true `r_min`), or `None`.
pub fn separate_fast(completion: &[f64], instance: &Instance, tol: f64) -> Option<(Cut, f64)> {
    let n = instance.len();
    let mut thresholds: Vec<f64> = instance.jobs().iter().map(|j| j.r).collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    let mut by_c: Vec<usize> = (0..n).collect();
    by_c.sort_by(|&a, &b| completion[a].total_cmp(&completion[b]).then(a.cmp(&b)));

    let mut best: Option<(f64, f64, usize)> = None;
    for &threshold in &thresholds {
        let (mut load, mut lhs, mut rmin, mut len) = (0.0, 0.0, f64::INFINITY, 0usize);
        for &j in &by_c {
            let job = instance.job(j);
            if job.r < threshold {
                continue;
            }
            load += job.p;
            lhs += job.p * completion[j];
            rmin = rmin.min(job.r);
            len += 1;
            let violation = rmin * load + 0.5 * load * load - lhs;
            if violation > tol && best.is_none_or(|(v, _, _)| violation > v) {
                best = Some((violation, threshold, len));
            }
        }
    }
    best.map(|(_, threshold, len)| {
        let subset: Vec<usize> =
            by_c.iter().copied().filter(|&j| instance.job(j).r >= threshold).take(len).collect();
        let cut = Cut::new(instance, subset);
        let v = cut.violation(completion, instance);
        (cut, v)
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LowerBoundReport {
    /// Jobs with `C_j < r_j + p_j / 2 - tol`, with the shortfall.
    pub lower_bound_violations: Vec<(usize, f64)>,
    /// Subsets with `p(U) > 2 C_max(U) - 2 r_min(U) + tol`, with the excess.
    pub span_violations: Vec<(Vec<usize>, f64)>,
    pub subsets_checked: usize,
}

impl LowerBoundReport {
    pub fn is_clean(&self) -> bool {
        self.lower_bound_violations.is_empty() && self.span_violations.is_empty()
    }
}

/// Checks `C_j >= r_j + p_j/2` per job and `p(U) <= 2 C_max(U) - 2 r_min(U)`
/// on all subsets (n <= 12) or on a seeded sample plus all C-prefixes.
pub fn check_lp_lemmas(completion: &[f64], instance: &Instance, tol: f64) -> LowerBoundReport {
    let n = instance.len();
    let mut report = LowerBoundReport::default();
    for (j, job) in instance.jobs().iter().enumerate() {
        let shortfall = job.r + job.p / 2.0 - completion[j];
        if shortfall > tol {
            report.lower_bound_violations.push((j, shortfall));
        }
    }
    let mut check = |subset: Vec<usize>| {
        let p: f64 = subset.iter().map(|&j| instance.job(j).p).sum();
        let cmax = subset.iter().map(|&j| completion[j]).fold(f64::NEG_INFINITY, f64::max);
        let rmin = subset.iter().map(|&j| instance.job(j).r).fold(f64::INFINITY, f64::min);
        let excess = p - (2.0 * cmax - 2.0 * rmin);
        report.subsets_checked += 1;
        if excess > tol {
            report.span_violations.push((subset, excess));
        }
    };
    if n <= 12 {
        for mask in 1usize..(1 << n) {
            check((0..n).filter(|&j| mask >> j & 1 == 1).collect());
        }
    } else {
        let mut by_c: Vec<usize> = (0..n).collect();
        by_c.sort_by(|&a, &b| completion[a].total_cmp(&completion[b]));
        for len in 1..=n {
            check(by_c[..len].to_vec());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..4096 {
            let subset: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            if !subset.is_empty() {
                check(subset);
            }
        }
    }
    report
}
