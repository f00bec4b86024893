use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use prec_sched::bounded::{solve_bounded, BoundedConfig, BoundedMode};
use prec_sched::decompose::{decompose_and_solve, OffsetMode, SubInstance};
use prec_sched::exact::{exact_opt, DP_CAP};
use prec_sched::harness::{bench, generate_file, Family, GeneratorConfig, PipelineOptions};
use prec_sched::instance::validate;
use prec_sched::list_sched::{lp_ls, LsVariant};
use prec_sched::lp::{solve_lp, LpConfig, Separation, LP_TOL};
use prec_sched::rational::{parse_rational, ratio_to_f64};
use prec_sched::schedule::decimal;
use prec_sched::{Epsilon, Error, Instance, InstanceFile};

#[derive(Parser)]
#[command(name = "prec-sched", version, about = "Scheduling with release times and precedence constraints on one machine")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Output::Json, global = true)]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file and report every problem found.
    Validate { instance: PathBuf },
    /// Solve the completion-time relaxation.
    Lp {
        instance: PathBuf,
        #[command(flatten)]
        lp: LpArgs,
    },
    /// List schedule in order of LP completion times.
    Lpls {
        instance: PathBuf,
        #[command(flatten)]
        lp: LpArgs,
        #[arg(long, value_enum, default_value_t = Variant::Available)]
        ls_variant: Variant,
    },
    /// Exact optimum for small instances.
    Exact {
        instance: PathBuf,
        #[arg(long, default_value_t = DP_CAP)]
        cap: usize,
    },
    /// Solve a bounded instance by guessing early jobs.
    Bounded {
        instance: PathBuf,
        /// Lower bound on all start times; release times are lifted to it.
        #[arg(long = "L", value_name = "RAT")]
        floor: String,
        #[arg(long, value_name = "RAT")]
        beta: String,
        #[arg(long, default_value = "1")]
        epsilon: String,
        #[command(flatten)]
        guess: GuessArgs,
        #[command(flatten)]
        lp: LpArgs,
    },
    /// Full pipeline: decompose by LP values and solve every interval.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value = "1")]
        epsilon: String,
        /// Seed for the random offset.
        #[arg(long, conflicts_with = "derandomize")]
        seed: Option<u64>,
        /// Try every offset at which the partition changes and keep the best.
        #[arg(long)]
        derandomize: bool,
        #[command(flatten)]
        guess: GuessArgs,
        #[command(flatten)]
        lp: LpArgs,
    },
    /// Run the pipeline on generated instances and report ratios.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "uniform,p_le_r,chains,antichain")]
        families: Vec<String>,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 7)]
        n_max: usize,
        /// Instances per (family, size, epsilon).
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        epsilon: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run the exact oracle up to this many jobs.
        #[arg(long, default_value_t = 8)]
        exact_cap: usize,
        /// Skip the LP+LS baselines.
        #[arg(long)]
        no_baselines: bool,
        /// Use a random offset per instance instead of derandomizing.
        #[arg(long)]
        random_offset: bool,
        #[command(flatten)]
        guess: GuessArgs,
    },
    /// Write a generated instance.
    Gen {
        #[arg(long, default_value = "uniform")]
        family: String,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        p_max: i64,
        #[arg(long, default_value_t = 20)]
        r_max: i64,
        #[arg(long, default_value_t = 10)]
        w_max: i64,
        #[arg(long, default_value_t = 0.2)]
        density: f64,
    },
}

#[derive(Args)]
struct LpArgs {
    #[arg(long, value_enum, default_value_t = Sep::Auto)]
    separation: Sep,
    /// Cut violation tolerance.
    #[arg(long, default_value_t = LP_TOL)]
    tol: f64,
}

impl LpArgs {
    fn config(&self) -> LpConfig {
        let separation = match self.separation {
            Sep::Auto => Separation::Auto,
            Sep::Exhaustive => Separation::Exhaustive,
            Sep::Fast => Separation::Fast,
        };
        LpConfig { tol: self.tol, separation, ..Default::default() }
    }
}

#[derive(Args)]
struct GuessArgs {
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    mode: Mode,
    /// Maximum number of guesses per bounded instance.
    #[arg(long)]
    budget: Option<usize>,
}

impl GuessArgs {
    fn config(&self, lp: LpConfig) -> BoundedConfig {
        let mode = match self.mode {
            Mode::Exhaustive => BoundedMode::Exhaustive,
            Mode::Typed => BoundedMode::Typed,
            Mode::EmptyGuess => BoundedMode::EmptyGuess,
        };
        BoundedConfig { mode, budget: self.budget, lp, ..Default::default() }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Sep {
    Auto,
    Exhaustive,
    Fast,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Available,
    Strict,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Typed,
    EmptyGuess,
}

fn read_file(path: &Path) -> Result<InstanceFile, Error> {
    InstanceFile::from_json(&std::fs::read_to_string(path)?)
}

fn read_instance(path: &Path) -> Result<Instance, Error> {
    Ok(prec_sched::normalize_release_times(&read_file(path)?.into_instance()?))
}

fn rational(text: &str, what: &str) -> Result<f64, Error> {
    parse_rational(text)
        .map(ratio_to_f64)
        .map_err(|_| Error::InvalidParameter(format!("{what} must be a rational number, got {text:?}")))
}

fn schedule_json(schedule: &prec_sched::Schedule, instance: &Instance) -> Value {
    serde_json::to_value(schedule.to_json(instance)).expect("schedule serializes")
}

fn nums(xs: &[f64]) -> Value {
    xs.iter().map(|&x| Value::String(decimal(x))).collect()
}

/// Result of a subcommand: the JSON document and the exit code.
struct Report {
    body: Value,
    code: u8,
}

impl Report {
    fn ok(body: Value) -> Self {
        Report { body, code: 0 }
    }
}

fn run(cli: &Cli) -> Result<Report, Error> {
    match &cli.command {
        Command::Validate { instance } => {
            let file = read_file(instance)?;
            let report = validate(&file);
            let code = if report.is_fatal() { 2 } else { 0 };
            Ok(Report {
                body: json!({ "valid": !report.is_fatal(), "jobs": file.jobs.len(), "findings": report.findings }),
                code,
            })
        }
        Command::Lp { instance, lp } => {
            let inst = read_instance(instance)?;
            let sol = solve_lp(&inst, &lp.config())?;
            Ok(Report::ok(json!({
                "objective": decimal(sol.objective),
                "completion": nums(&sol.completion),
                "cuts": sol.cuts.len(),
                "rounds": sol.objective_trace.len(),
            })))
        }
        Command::Lpls { instance, lp, ls_variant } => {
            let inst = read_instance(instance)?;
            let variant = match ls_variant {
                Variant::Available => LsVariant::Available,
                Variant::Strict => LsVariant::Strict,
            };
            let res = lp_ls(&inst, &lp.config(), variant)?;
            Ok(Report::ok(json!({
                "schedule": schedule_json(&res.schedule, &inst),
                "order": res.order.order(),
                "lp_objective": decimal(res.lp.objective),
            })))
        }
        Command::Exact { instance, cap } => {
            let inst = read_instance(instance)?;
            let sol = exact_opt(&inst, *cap)?;
            Ok(Report::ok(json!({
                "opt": decimal(sol.cost),
                "schedule": schedule_json(&sol.schedule, &inst),
                "sequence": sol.sequence,
            })))
        }
        Command::Bounded { instance, floor, beta, epsilon, guess, lp } => {
            let inst = read_instance(instance)?;
            let eps: Epsilon = epsilon.parse()?;
            let sub = SubInstance::standalone(&inst, rational(floor, "L")?, rational(beta, "beta")?)?;
            let res = solve_bounded(&sub, eps, &guess.config(lp.config()))?;
            Ok(Report::ok(json!({
                "schedule": schedule_json(&res.schedule, &sub.instance),
                "guesses_tried": res.guesses_tried,
                "guesses_failed": res.guesses_failed,
                "best_guess": res.best_guess,
            })))
        }
        Command::Solve { instance, epsilon, seed, derandomize, guess, lp } => {
            let inst = read_instance(instance)?;
            let eps: Epsilon = epsilon.parse()?;
            let mode = match (seed, derandomize) {
                (_, true) => OffsetMode::Derandomized,
                (Some(s), false) => OffsetMode::Random(*s),
                (None, false) => OffsetMode::Random(0),
            };
            let res = decompose_and_solve(&inst, eps, mode, &guess.config(lp.config()))?;
            let intervals: Vec<Value> = res
                .intervals
                .iter()
                .map(|i| {
                    json!({
                        "index": i.index,
                        "jobs": i.jobs,
                        "floor": decimal(i.floor),
                        "cost": decimal(i.cost),
                        "guesses_tried": i.guesses_tried,
                    })
                })
                .collect();
            Ok(Report::ok(json!({
                "schedule": schedule_json(&res.schedule, &inst),
                "b": decimal(res.b),
                "lp_objective": decimal(res.lp_objective),
                "offsets_tried": res.offsets_tried,
                "t": nums(&res.grid.t),
                "intervals": intervals,
            })))
        }
        Command::Bench {
            families,
            n_min,
            n_max,
            trials,
            epsilon,
            seed,
            exact_cap,
            no_baselines,
            random_offset,
            guess,
        } => {
            let mut configs = Vec::new();
            for f in families {
                let family: Family = f.parse()?;
                for n in *n_min..=*n_max {
                    configs.push(GeneratorConfig::new(family, n, seed.wrapping_add(1_000 * n as u64)));
                }
            }
            let epsilons = epsilon.iter().map(|e| e.parse()).collect::<Result<Vec<Epsilon>, _>>()?;
            let options = PipelineOptions {
                offset: if *random_offset { OffsetMode::Random(*seed) } else { OffsetMode::Derandomized },
                bounded: guess.config(LpConfig::default()),
                exact_cap: Some(*exact_cap),
                baselines: !no_baselines,
            };
            let report = bench(&configs, &epsilons, *trials, &options)?;
            let code = if report.violations.is_empty() { 0 } else { 3 };
            Ok(Report { body: serde_json::to_value(&report)?, code })
        }
        Command::Gen { family, n, seed, p_max, r_max, w_max, density } => {
            let cfg = GeneratorConfig {
                n: *n,
                seed: *seed,
                p_max: *p_max,
                r_max: *r_max,
                w_max: *w_max,
                prec_density: *density,
                family: family.parse()?,
            };
            Ok(Report::ok(serde_json::to_value(generate_file(&cfg)?)?))
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            items.iter().map(cell).collect::<Vec<_>>().join(" ")
        }
        other => other.to_string(),
    }
}

/// Two-column rendering of an object; arrays of objects become row blocks.
fn table(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            let width = map.keys().map(|k| k.len()).max().unwrap_or(0);
            for (k, x) in map {
                match x {
                    Value::Object(_) => {
                        let _ = writeln!(out, "{pad}{k}:");
                        table(x, indent + 2, out);
                    }
                    Value::Array(items) if items.iter().any(|i| i.is_object()) => {
                        let _ = writeln!(out, "{pad}{k}: ({} rows)", items.len());
                        for (i, item) in items.iter().enumerate() {
                            let _ = writeln!(out, "{pad}  [{i}]");
                            table(item, indent + 4, out);
                        }
                    }
                    _ => {
                        let _ = writeln!(out, "{pad}{k:<width$}  {}", cell(x));
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", cell(other));
        }
    }
}

fn init_threads() {
    if let Some(n) = std::env::var("PREC_SCHED_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_threads();
    match run(&cli) {
        Ok(report) => {
            let text = match cli.output {
                Output::Json => serde_json::to_string_pretty(&report.body).expect("json values serialize") + "\n",
                Output::Table => {
                    let mut s = String::new();
                    table(&report.body, 0, &mut s);
                    s
                }
            };
            // A closed pipe (e.g. `| head`) is not an error.
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::from(report.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
