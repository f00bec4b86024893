//! Jobs, precedence relations and instances.
//!
//! Input data is integral (see [`InstanceFile`]), but internally times are
//! `f64`: the decomposition lifts release times to irrational floors and the
//! typed guessing mode rounds processing times to powers of `1 + eps`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Relative comparison tolerance for times.
pub const TIME_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub p: f64,
    pub r: f64,
    pub w: f64,
}

impl Job {
    pub fn new(p: f64, r: f64, w: f64) -> Self {
        Job { p, r, w }
    }
}

/// One job as it appears in an instance file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobSpec {
    pub p: i64,
    pub r: i64,
    pub w: i64,
}

/// The on-disk instance format. Job ids are array positions and `prec`
/// does not have to be transitively closed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct InstanceFile {
    pub jobs: Vec<JobSpec>,
    #[serde(default)]
    pub prec: Vec<[usize; 2]>,
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance files always serialize")
    }

    /// Validates, closes the precedence relation and builds an [`Instance`].
    /// Release times are not normalized here.
    pub fn into_instance(self) -> Result<Instance> {
        let report = validate(&self);
        if let Some(job) = report.findings.iter().find_map(|f| match f {
            Finding::ZeroProcessing { job } => Some(*job),
            _ => None,
        }) {
            return Err(Error::ZeroProcessing { job });
        }
        if report.is_fatal() {
            return Err(Error::Validation(report));
        }
        let jobs = self
            .jobs
            .iter()
            .map(|j| Job::new(j.p as f64, j.r as f64, j.w as f64))
            .collect();
        Instance::new(jobs, self.prec.iter().map(|&[a, b]| (a, b)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Finding {
    JobOutOfRange { pair: (usize, usize), n: usize },
    SelfLoop { job: usize },
    Cycle { witness: Vec<usize> },
    MissingTransitiveEdge { from: usize, to: usize },
    NegativeField { job: usize, field: &'static str },
    ZeroProcessing { job: usize },
}

impl Finding {
    /// Missing transitive edges are repaired on load; everything else
    /// prevents building an instance.
    pub fn is_fatal(&self) -> bool {
        !matches!(self, Finding::MissingTransitiveEdge { .. })
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::JobOutOfRange { pair, n } => {
                write!(f, "pair {pair:?} refers to a job outside 0..{n}")
            }
            Finding::SelfLoop { job } => write!(f, "job {job} precedes itself"),
            Finding::Cycle { witness } => write!(f, "cycle {witness:?}"),
            Finding::MissingTransitiveEdge { from, to } => {
                write!(f, "transitive pair ({from}, {to}) is missing")
            }
            Finding::NegativeField { job, field } => write!(f, "job {job} has negative {field}"),
            Finding::ZeroProcessing { job } => write!(f, "job {job} has zero processing time"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn is_fatal(&self) -> bool {
        self.findings.iter().any(Finding::is_fatal)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.findings.is_empty() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.findings.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Reports every structural problem of an instance file. The report is empty
/// iff the file describes a well-formed instance with a closed relation.
pub fn validate(file: &InstanceFile) -> ValidationReport {
    let n = file.jobs.len();
    let mut findings = Vec::new();
    for (job, spec) in file.jobs.iter().enumerate() {
        for (field, value) in [("p", spec.p), ("r", spec.r), ("w", spec.w)] {
            if value < 0 {
                findings.push(Finding::NegativeField { job, field });
            }
        }
        if spec.p == 0 {
            findings.push(Finding::ZeroProcessing { job });
        }
    }
    let mut pairs = BTreeSet::new();
    for &[a, b] in &file.prec {
        if a >= n || b >= n {
            findings.push(Finding::JobOutOfRange { pair: (a, b), n });
        } else if a == b {
            findings.push(Finding::SelfLoop { job: a });
        } else {
            pairs.insert((a, b));
        }
    }
    match transitive_closure(&pairs) {
        Err(Error::Cycle { witness }) => findings.push(Finding::Cycle { witness }),
        Err(_) => unreachable!("closure only fails on cycles"),
        Ok(closed) => {
            for &(from, to) in closed.difference(&pairs) {
                findings.push(Finding::MissingTransitiveEdge { from, to });
            }
        }
    }
    ValidationReport { findings }
}

fn adjacency(pairs: &BTreeSet<(usize, usize)>) -> Vec<Vec<usize>> {
    let n = pairs.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
    let mut succ = vec![Vec::new(); n];
    for &(a, b) in pairs {
        succ[a].push(b);
    }
    succ
}

fn find_cycle(succ: &[Vec<usize>]) -> Option<Vec<usize>> {
    // 0 = unvisited, 1 = on stack, 2 = done
    let n = succ.len();
    let mut color = vec![0u8; n];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if color[root] != 0 {
            continue;
        }
        stack.push((root, 0));
        color[root] = 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < succ[v].len() {
                let u = succ[v][*next];
                *next += 1;
                match color[u] {
                    0 => {
                        color[u] = 1;
                        stack.push((u, 0));
                    }
                    1 => {
                        let pos = stack.iter().position(|&(x, _)| x == u).unwrap();
                        let mut witness: Vec<usize> = stack[pos..].iter().map(|&(x, _)| x).collect();
                        witness.push(u);
                        return Some(witness);
                    }
                    _ => {}
                }
            } else {
                color[v] = 2;
                stack.pop();
            }
        }
    }
    None
}

/// Transitive closure of a relation given as ordered pairs.
///
/// Fails with [`Error::Cycle`] (carrying a closed walk `a -> .. -> a`) if the
/// relation is not acyclic.
pub fn transitive_closure(pairs: &BTreeSet<(usize, usize)>) -> Result<BTreeSet<(usize, usize)>> {
    if let Some(&(a, _)) = pairs.iter().find(|&&(a, b)| a == b) {
        return Err(Error::Cycle { witness: vec![a, a] });
    }
    let succ = adjacency(pairs);
    if let Some(witness) = find_cycle(&succ) {
        return Err(Error::Cycle { witness });
    }
    let n = succ.len();
    let mut closed = BTreeSet::new();
    let mut seen = vec![usize::MAX; n];
    let mut work = Vec::new();
    for src in 0..n {
        work.clear();
        work.extend_from_slice(&succ[src]);
        while let Some(v) = work.pop() {
            if seen[v] == src {
                continue;
            }
            seen[v] = src;
            closed.insert((src, v));
            work.extend_from_slice(&succ[v]);
        }
    }
    Ok(closed)
}

/// A validated instance with a transitively closed precedence relation.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    jobs: Vec<Job>,
    prec: BTreeSet<(usize, usize)>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
}

impl Instance {
    /// Builds an instance, closing `pairs` transitively.
    pub fn new(jobs: Vec<Job>, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let n = jobs.len();
        let mut findings = Vec::new();
        for (job, j) in jobs.iter().enumerate() {
            for (field, v) in [("p", j.p), ("r", j.r), ("w", j.w)] {
                if v < 0.0 || !v.is_finite() {
                    findings.push(Finding::NegativeField { job, field });
                }
            }
            if j.p == 0.0 {
                return Err(Error::ZeroProcessing { job });
            }
        }
        let mut raw = BTreeSet::new();
        for (a, b) in pairs {
            if a >= n || b >= n {
                findings.push(Finding::JobOutOfRange { pair: (a, b), n });
            } else {
                raw.insert((a, b));
            }
        }
        if !findings.is_empty() {
            return Err(Error::Validation(ValidationReport { findings }));
        }
        let prec = transitive_closure(&raw)?;
        Ok(Self::from_closed(jobs, prec))
    }

    fn from_closed(jobs: Vec<Job>, prec: BTreeSet<(usize, usize)>) -> Self {
        let n = jobs.len();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for &(a, b) in &prec {
            preds[b].push(a);
            succs[a].push(b);
        }
        Instance { jobs, prec, preds, succs }
    }

    /// Instance with the given integer data and no precedence constraints.
    pub fn from_triples(data: &[(i64, i64, i64)]) -> Result<Self> {
        InstanceFile {
            jobs: data.iter().map(|&(p, r, w)| JobSpec { p, r, w }).collect(),
            prec: Vec::new(),
        }
        .into_instance()
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, j: usize) -> &Job {
        &self.jobs[j]
    }

    pub fn prec(&self) -> &BTreeSet<(usize, usize)> {
        &self.prec
    }

    pub fn preds(&self, j: usize) -> &[usize] {
        &self.preds[j]
    }

    pub fn succs(&self, j: usize) -> &[usize] {
        &self.succs[j]
    }

    pub fn precedes(&self, j: usize, k: usize) -> bool {
        self.prec.contains(&(j, k))
    }

    pub fn total_processing(&self) -> f64 {
        self.jobs.iter().map(|j| j.p).sum()
    }

    pub fn max_release(&self) -> f64 {
        self.jobs.iter().map(|j| j.r).fold(0.0, f64::max)
    }

    pub fn min_release(&self) -> f64 {
        self.jobs.iter().map(|j| j.r).fold(f64::INFINITY, f64::min)
    }

    /// Upper bound on the makespan of any tight schedule.
    pub fn tight_makespan_bound(&self) -> f64 {
        self.max_release() + self.total_processing()
    }

    /// Absolute tolerance for comparing times of this instance.
    pub fn time_tol(&self) -> f64 {
        TIME_TOL * self.tight_makespan_bound().max(1.0)
    }

    /// True if `r_j <= r_k` whenever `j` precedes `k`.
    pub fn is_release_consistent(&self) -> bool {
        self.prec.iter().all(|&(a, b)| self.jobs[a].r <= self.jobs[b].r)
    }

    /// Same jobs and relation, new release times.
    pub fn with_releases(&self, releases: &[f64]) -> Instance {
        assert_eq!(releases.len(), self.len());
        let jobs = self
            .jobs
            .iter()
            .zip(releases)
            .map(|(j, &r)| Job { r, ..*j })
            .collect();
        Instance { jobs, ..self.clone() }
    }

    /// Same jobs and relation, new processing times.
    pub fn with_processing(&self, processing: &[f64]) -> Instance {
        assert_eq!(processing.len(), self.len());
        let jobs = self
            .jobs
            .iter()
            .zip(processing)
            .map(|(j, &p)| Job { p, ..*j })
            .collect();
        Instance { jobs, ..self.clone() }
    }

    /// The sub-instance on `ids` (in the given order), re-indexed `0..ids.len()`.
    /// The restriction of a closed relation is closed.
    pub fn restrict(&self, ids: &[usize]) -> Instance {
        let mut local = vec![usize::MAX; self.len()];
        for (i, &j) in ids.iter().enumerate() {
            local[j] = i;
        }
        let jobs = ids.iter().map(|&j| self.jobs[j]).collect();
        let prec = self
            .prec
            .iter()
            .filter(|&&(a, b)| local[a] != usize::MAX && local[b] != usize::MAX)
            .map(|&(a, b)| (local[a], local[b]))
            .collect();
        Self::from_closed(jobs, prec)
    }

    /// A topological order, smallest id first among ready jobs.
    pub fn topological_order(&self) -> Vec<usize> {
        let n = self.len();
        let mut indeg: Vec<usize> = (0..n).map(|j| self.preds[j].len()).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&j| indeg[j] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(j) = ready.pop_first() {
            order.push(j);
            for &k in &self.succs[j] {
                indeg[k] -= 1;
                if indeg[k] == 0 {
                    ready.insert(k);
                }
            }
        }
        order
    }

    /// Integer view of the instance, if all data is integral.
    pub fn to_file(&self) -> Option<InstanceFile> {
        let int = |x: f64| (x.fract() == 0.0 && x.abs() < 9e15).then_some(x as i64);
        let jobs = self
            .jobs
            .iter()
            .map(|j| Some(JobSpec { p: int(j.p)?, r: int(j.r)?, w: int(j.w)? }))
            .collect::<Option<Vec<_>>>()?;
        Some(InstanceFile { jobs, prec: self.prec.iter().map(|&(a, b)| [a, b]).collect() })
    }

    /// Stable hash of the canonical serialization (closed relation, sorted).
    pub fn digest(&self) -> String {
        #[derive(Serialize)]
        struct Canonical<'a> {
            jobs: &'a [Job],
            prec: Vec<[usize; 2]>,
        }
        let canon = Canonical { jobs: &self.jobs, prec: self.prec.iter().map(|&(a, b)| [a, b]).collect() };
        let bytes = serde_json::to_vec(&canon).expect("canonical form serializes");
        let hash = Sha256::digest(&bytes);
        hex::encode(&hash[..8])
    }
}

/// Raises every release time to the largest release among its predecessors.
/// Feasible schedules, and hence the optimum, are unchanged.
pub fn normalize_release_times(instance: &Instance) -> Instance {
    let releases: Vec<f64> = (0..instance.len())
        .map(|k| {
            instance
                .preds(k)
                .iter()
                .map(|&j| instance.job(j).r)
                .fold(instance.job(k).r, f64::max)
        })
        .collect();
    instance.with_releases(&releases)
}
