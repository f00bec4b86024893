//! Seeded random instance families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{normalize_release_times, InstanceFile, JobSpec};
use crate::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Family {
    /// Independent uniform data and a random DAG.
    Uniform,
    /// Like `Uniform`, but every release time is at least the job's processing time.
    PLeR,
    /// Two jobs on which list scheduling in LP order is far from optimal.
    TwoJob { m: i64 },
    /// Jobs split into random disjoint chains.
    Chains,
    /// No precedence constraints.
    Antichain,
}

impl Family {
    pub fn name(&self) -> String {
        match self {
            Family::Uniform => "uniform".into(),
            Family::PLeR => "p_le_r".into(),
            Family::TwoJob { m } => format!("paper_example({m})"),
            Family::Chains => "chains".into(),
            Family::Antichain => "antichain".into(),
        }
    }

    pub const RANDOM: [Family; 4] = [Family::Uniform, Family::PLeR, Family::Chains, Family::Antichain];
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown family {s:?}"));
        Ok(match s {
            "uniform" => Family::Uniform,
            "p_le_r" => Family::PLeR,
            "chains" => Family::Chains,
            "antichain" => Family::Antichain,
            "paper_example" => Family::TwoJob { m: 10 },
            _ => {
                let inner = s.strip_prefix("paper_example(").and_then(|x| x.strip_suffix(')')).ok_or_else(bad)?;
                Family::TwoJob { m: inner.trim().parse().map_err(|_| bad())? }
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n: usize,
    pub seed: u64,
    pub p_max: i64,
    pub r_max: i64,
    pub w_max: i64,
    pub prec_density: f64,
    pub family: Family,
}

impl GeneratorConfig {
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        GeneratorConfig { n, seed, p_max: 10, r_max: 20, w_max: 10, prec_density: 0.2, family }
    }

    pub fn check(&self) -> Result<()> {
        if self.p_max < 1 || self.r_max < 0 || self.w_max < 0 {
            return Err(Error::InvalidParameter("need p_max >= 1, r_max >= 0, w_max >= 0".into()));
        }
        if !(0.0..=1.0).contains(&self.prec_density) {
            return Err(Error::InvalidParameter(format!("density {} not in [0, 1]", self.prec_density)));
        }
        if let Family::TwoJob { m } = self.family {
            if m < 1 {
                return Err(Error::InvalidParameter(format!("M must be positive, got {m}")));
            }
        }
        Ok(())
    }
}

/// Integer instance file for `config`, release-normalized and with a closed relation.
pub fn generate_file(config: &GeneratorConfig) -> Result<InstanceFile> {
    config.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.n;
    let mut jobs = Vec::with_capacity(n);
    let mut prec = Vec::new();
    match config.family {
        Family::TwoJob { m } => {
            jobs = vec![JobSpec { p: 1, r: 1, w: m }, JobSpec { p: m, r: 0, w: 0 }];
        }
        family => {
            for _ in 0..n {
                let p = rng.gen_range(1..=config.p_max);
                let r = match family {
                    Family::PLeR => rng.gen_range(p..=p + config.r_max),
                    _ => rng.gen_range(0..=config.r_max),
                };
                let w = rng.gen_range(0..=config.w_max);
                jobs.push(JobSpec { p, r, w });
            }
            match family {
                Family::Uniform | Family::PLeR => {
                    for a in 0..n {
                        for b in a + 1..n {
                            if rng.gen_bool(config.prec_density) {
                                prec.push([a, b]);
                            }
                        }
                    }
                }
                Family::Chains => {
                    let k = (n / 3).max(1);
                    let mut last: Vec<Option<usize>> = vec![None; k];
                    for j in 0..n {
                        let c = rng.gen_range(0..k);
                        if let Some(prev) = last[c] {
                            prec.push([prev, j]);
                        }
                        last[c] = Some(j);
                    }
                }
                _ => {}
            }
        }
    }
    let inst = InstanceFile { jobs, prec }.into_instance()?;
    Ok(normalize_release_times(&inst).to_file().expect("integer data stays integral"))
}

pub fn generate(config: &GeneratorConfig) -> Result<Instance> {
    generate_file(config)?.into_instance()
}
