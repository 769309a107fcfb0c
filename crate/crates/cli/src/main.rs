//! `ctent`: evaluate cumulative Tsallis entropies, their duals, the derived
//! risk and skewness measures, extremal bounds and relevation simulations.
//!
//! | exit | meaning                                              |
//! |------|------------------------------------------------------|
//! | 0    | success                                              |
//! | 1    | command line or input file could not be parsed       |
//! | 2    | domain error, including divergent entropies          |
//! | 3    | numerical non-convergence                            |
//! | 4    | `selftest` found a failing check                     |
//!
//! Simulations use ChaCha8 streams seeded from `--seed`; output is the same
//! for a given argv whatever `CTENT_THREADS` is.

mod input;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ctent::extremal::{self, Regime};
use ctent::risk::{self, Which};
use ctent::selftest::{self, Level};
use ctent::skewness::{self, DiamondKind, RhoKind};
use ctent::{entropy, relevation, Distribution, EmpiricalSample};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] ctent::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use ctent::Error as E;
        match self {
            CliError::Parse(_) | CliError::Io(_) => 1,
            CliError::Core(E::NotConverged(_) | E::TruncationNotConverged { .. } | E::NotBracketed { .. }) => 3,
            CliError::Core(_) => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "ctent", version, about = "Cumulative Tsallis entropies, duals, risk and skewness measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct Source {
    /// Catalog law: power_uniform, uniform, reflected_power, exponential, lomax,
    /// negative_lomax, negative_exponential, frechet, reverse_weibull, gumbel,
    /// logistic, normal, s_logistic.
    #[arg(long, conflicts_with = "file")]
    dist: Option<String>,
    /// Law parameter as k=v (beta, s, scale, shift, negate); repeatable.
    #[arg(long = "param", requires = "dist")]
    params: Vec<String>,
    /// Sample file with one number per line; `#` starts a comment.
    #[arg(long)]
    file: Option<PathBuf>,
}

enum Input {
    Law(Distribution),
    Sample(EmpiricalSample),
}

impl Source {
    fn resolve(&self) -> Result<Input, CliError> {
        match (&self.dist, &self.file) {
            (Some(name), None) => Ok(Input::Law(input::distribution(name, &self.params)?)),
            (None, Some(path)) => Ok(Input::Sample(input::sample_file(path)?)),
            _ => Err(CliError::Parse("give exactly one of --dist or --file".into())),
        }
    }

    fn law(&self) -> Result<Distribution, CliError> {
        match self.resolve()? {
            Input::Law(d) => Ok(d),
            Input::Sample(_) => Err(CliError::Parse("this command needs --dist, not a sample file".into())),
        }
    }
}

#[derive(Args, Debug)]
struct Orders {
    /// A single order s > -1.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "s_grid")]
    s: Option<f64>,
    /// Orders a:b:n, n points from a to b inclusive.
    #[arg(long, allow_hyphen_values = true)]
    s_grid: Option<String>,
}

impl Orders {
    fn values(&self, default: Option<&str>) -> Result<Vec<f64>, CliError> {
        match (self.s, &self.s_grid, default) {
            (Some(s), None, _) => Ok(vec![s]),
            (None, Some(g), _) => input::grid(g),
            (None, None, Some(g)) => input::grid(g),
            _ => Err(CliError::Parse("give --s or --s-grid".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Measure {
    Delta,
    Nabla,
    Gcre,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RegimeArg {
    Positive,
    L2,
    Symmetric,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Positive => Regime::Positive,
            RegimeArg::L2 => Regime::L2,
            RegimeArg::Symmetric => Regime::Symmetric,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CurveFamily {
    PowerUniform,
    NegativeLomax,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Process {
    /// Mean residual lifetime `Y_s` of the replacement unit.
    Ys,
    /// Survival of the total lifetime `X + Y_s` on `--t-grid`.
    TotalSurvival,
    /// Mean `n`-th failure time of the relevation process.
    Tn,
    /// Survival of the `n`-th failure time on `--t-grid`.
    TnSurvival,
    /// Frequencies of the randomized order `N_s`.
    Ns,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Δ_s and ∇_s of a catalog law, or plug-in estimates for a sample file.
    Entropy {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        orders: Orders,
    },
    /// Δ_s, ∇_s and their monotonicity over a grid of orders.
    Profile {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        orders: Orders,
    },
    /// Distortion risk measures.
    Risk {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        orders: Orders,
        #[arg(long, value_enum, default_value_t = Measure::Delta)]
        measure: Measure,
        /// Also evaluate the tail-mean representation.
        #[arg(long)]
        tail_mean: bool,
    },
    /// Skewness parameters of a law, the ratios at given orders, or a β curve.
    Skew {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        orders: Orders,
        /// Emit the (β, ϱ, ϱ̄) curve of a family instead.
        #[arg(long, value_enum, conflicts_with_all = ["dist", "file"])]
        curve: Option<CurveFamily>,
        /// Exponent grid a:b:n for --curve: β = 10^e, or 1 + 10^e for negative_lomax.
        #[arg(long, allow_hyphen_values = true)]
        beta_grid: Option<String>,
    },
    /// Upper bounds on normalized entropies and their maximizers.
    Bounds {
        #[arg(long, value_enum)]
        regime: RegimeArg,
        #[command(flatten)]
        orders: Orders,
        /// Also report the normalized entropy of this law.
        #[command(flatten)]
        source: Source,
    },
    /// The Gamma gap: summary constants, or a table over --s-grid.
    Gammagap {
        #[command(flatten)]
        orders: Orders,
    },
    /// Monte Carlo simulation of the relevation process.
    Simulate {
        #[arg(long, value_enum, default_value_t = Process::Ys)]
        process: Process,
        #[command(flatten)]
        source: Source,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<f64>,
        /// Number of units for tn and tn-survival.
        #[arg(long, default_value_t = 2)]
        units: u32,
        /// Time grid a:b:n for survival curves.
        #[arg(long, allow_hyphen_values = true)]
        t_grid: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Plug-in Δ_s and ∇_s for a sample file.
    Estimate {
        #[arg(long)]
        file: PathBuf,
        #[command(flatten)]
        orders: Orders,
    },
    /// Run the numerical self-test suite.
    Selftest {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        /// Directory for the figure tables (full level).
        #[arg(long)]
        figures: Option<PathBuf>,
    },
}

fn entropy_rows(inp: &Input, orders: &[f64]) -> Result<Value, CliError> {
    let mut rows = Vec::new();
    for &s in orders {
        let row = match inp {
            Input::Law(d) => {
                let de = entropy::delta(d, s)?;
                let ne = entropy::nabla(d, s)?;
                json!({
                    "dist": d.label(), "s": s,
                    "delta": de.value, "delta_error": de.abs_error_bound,
                    "nabla": ne.value, "nabla_error": ne.abs_error_bound,
                    "method": de.method,
                })
            }
            Input::Sample(x) => {
                let de = entropy::delta_plugin(x, s)?;
                let ne = entropy::nabla_plugin(x, s)?;
                json!({
                    "n": x.len(), "s": s,
                    "delta": de.value, "nabla": ne.value,
                    "method": de.method,
                })
            }
        };
        rows.push(row);
    }
    Ok(Value::Array(rows))
}

fn single_or_rows(mut rows: Vec<Value>) -> Value {
    if rows.len() == 1 {
        rows.pop().expect("one row")
    } else {
        Value::Array(rows)
    }
}

fn run(cli: &Cli) -> Result<(Value, u8), CliError> {
    let value = match &cli.command {
        Command::Entropy { source, orders } => {
            let Value::Array(rows) = entropy_rows(&source.resolve()?, &orders.values(None)?)? else { unreachable!() };
            single_or_rows(rows)
        }
        Command::Estimate { file, orders } => {
            let x = Input::Sample(input::sample_file(file)?);
            let Value::Array(rows) = entropy_rows(&x, &orders.values(None)?)? else { unreachable!() };
            single_or_rows(rows)
        }
        Command::Profile { source, orders } => {
            let d = source.law()?;
            let p = entropy::entropy_profile(&d, &orders.values(Some("-0.5:5:12"))?)?;
            let rows: Vec<Value> = p
                .grid
                .iter()
                .map(|pt| {
                    json!({
                        "s": pt.s,
                        "delta": pt.delta.as_ref().ok().map(|v| v.value),
                        "nabla": pt.nabla.as_ref().ok().map(|v| v.value),
                        "note": pt.delta.as_ref().err().or(pt.nabla.as_ref().err()),
                    })
                })
                .collect();
            match cli.format {
                Format::Csv => Value::Array(rows),
                Format::Json => json!({
                    "dist": d.label(), "delta_monotone": p.delta_monotone,
                    "nabla_monotone": p.nabla_monotone, "grid": rows,
                }),
            }
        }
        Command::Risk { source, orders, measure, tail_mean } => {
            let d = source.law()?;
            let mut rows = Vec::new();
            for s in orders.values(None)? {
                let r = match measure {
                    Measure::Delta => risk::risk_delta(&d, s)?,
                    Measure::Nabla => risk::risk_nabla(&d, s)?,
                    Measure::Gcre => risk::risk_gcre(&d, s)?,
                };
                let mut row = json!({
                    "dist": d.label(), "measure": r.family, "s": s,
                    "value": r.value, "abs_error_bound": r.abs_error_bound, "cross_check": r.cross_check,
                });
                if *tail_mean {
                    let which = match measure {
                        Measure::Delta => Which::Delta,
                        Measure::Nabla => Which::Nabla,
                        Measure::Gcre => {
                            return Err(CliError::Parse("--tail-mean applies to delta and nabla".into()))
                        }
                    };
                    row["tail_mean"] = json!(risk::mrl_representation(&d, s, which)?.value);
                }
                rows.push(row);
            }
            single_or_rows(rows)
        }
        Command::Skew { source, orders, curve, beta_grid } => match curve {
            Some(family) => {
                let default = match family {
                    CurveFamily::PowerUniform => "-2:2:20",
                    CurveFamily::NegativeLomax => "-1.3:2:20",
                };
                let exps = input::grid(beta_grid.as_deref().unwrap_or(default))?;
                let betas: Vec<f64> = match family {
                    CurveFamily::PowerUniform => exps.iter().map(|e| 10f64.powf(*e)).collect(),
                    CurveFamily::NegativeLomax => exps.iter().map(|e| 1.0 + 10f64.powf(*e)).collect(),
                };
                let make = |k| match family {
                    CurveFamily::PowerUniform => skewness::rho_curve_power_uniform(k, &betas),
                    CurveFamily::NegativeLomax => skewness::rho_curve_negative_lomax(k, &betas),
                };
                let (r, rb) = (make(RhoKind::Rho), make(RhoKind::RhoBar));
                let rows: Vec<Value> = r
                    .points
                    .iter()
                    .zip(&rb.points)
                    .map(|(p, q)| json!({ "beta": p.beta, "rho": p.value.as_ref().ok(), "rho_bar": q.value.as_ref().ok() }))
                    .collect();
                match cli.format {
                    Format::Csv => Value::Array(rows),
                    Format::Json => json!({
                        "family": r.family, "rho_monotone": r.monotone,
                        "rho_bar_monotone": rb.monotone, "curve": rows,
                    }),
                }
            }
            None => {
                let d = source.law()?;
                let mut out = json!({
                    "dist": d.label(),
                    "rho": skewness::rho(&d, RhoKind::Rho, 1e-12)?,
                    "rho_bar": skewness::rho(&d, RhoKind::RhoBar, 1e-12)?,
                });
                if orders.s.is_some() || orders.s_grid.is_some() {
                    let mut ratios = Vec::new();
                    for s in orders.values(None)? {
                        ratios.push(json!({
                            "s": s,
                            "diamond": skewness::diamond(&d, s, DiamondKind::Diamond)?,
                            "diamond_bar": skewness::diamond(&d, s, DiamondKind::DiamondBar)?,
                        }));
                    }
                    out["ratios"] = Value::Array(ratios);
                }
                out
            }
        },
        Command::Bounds { regime, orders, source } => {
            let law = match (&source.dist, &source.file) {
                (None, None) => None,
                _ => Some(source.law()?),
            };
            let mut rows = Vec::new();
            for s in orders.values(None)? {
                let b = extremal::bound((*regime).into(), s)?;
                let mut row = json!({
                    "regime": b.regime, "s": s, "upper": b.upper,
                    "maximizer": b.maximizer_label, "attained": b.attained,
                });
                if let Some(d) = &law {
                    row["dist"] = json!(d.label());
                    row["normalized"] = json!(extremal::normalized_entropy(d, s, (*regime).into())?);
                }
                rows.push(row);
            }
            single_or_rows(rows)
        }
        Command::Gammagap { orders } => match (orders.s, &orders.s_grid) {
            (None, None) => {
                let (argmax, max) = extremal::gamma_gap_argmax();
                json!({
                    "argmax": argmax, "max": max, "root": extremal::gamma_gap_root()?,
                    "gaussian_delta0": extremal::gaussian_cumulative_entropy()?,
                })
            }
            _ => {
                let mut rows = Vec::new();
                for s in orders.values(None)? {
                    rows.push(json!({ "s": s, "phi": extremal::gamma_gap(s)? }));
                }
                Value::Array(rows)
            }
        },
        Command::Simulate { process, source, s, units, t_grid, trials, seed } => {
            let need_s = || s.ok_or_else(|| CliError::Parse("this process needs --s".into()));
            let need_grid = || {
                t_grid
                    .as_deref()
                    .ok_or_else(|| CliError::Parse("this process needs --t-grid".into()))
                    .and_then(input::grid)
            };
            match process {
                Process::Ys => serde_json::to_value(relevation::simulate_ys(&source.law()?, need_s()?, *trials, *seed)?),
                Process::TotalSurvival => serde_json::to_value(relevation::simulate_total_lifetime_survival(
                    &source.law()?,
                    need_s()?,
                    &need_grid()?,
                    *trials,
                    *seed,
                )?),
                Process::Tn => serde_json::to_value(relevation::simulate_tn(&source.law()?, *units, *trials, *seed)?),
                Process::TnSurvival => serde_json::to_value(relevation::simulate_tn_survival(
                    &source.law()?,
                    *units,
                    &need_grid()?,
                    *trials,
                    *seed,
                )?),
                Process::Ns => serde_json::to_value(relevation::sample_ns(need_s()?, *trials, *seed)?),
            }
            .expect("simulation results serialize")
        }
        Command::Selftest { level, figures } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let report = selftest::run(level, figures.as_deref());
            let code = if report.passed { 0 } else { 4 };
            let v = match cli.format {
                Format::Csv => Value::Array(
                    report
                        .checks
                        .iter()
                        .map(|c| json!({ "name": c.name, "passed": c.passed, "seconds": c.seconds }))
                        .collect(),
                ),
                Format::Json => serde_json::to_value(&report).expect("report serializes"),
            };
            return Ok((v, code));
        }
    };
    Ok((value, 0))
}

fn emit(cli: &Cli, v: Value) -> Result<(), CliError> {
    let v = output::round_tree(v);
    let text = match cli.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&v).expect("json serializes")),
        Format::Csv => output::to_csv(&v),
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ctent::init_threads();
    let result = run(&cli).and_then(|(v, code)| emit(&cli, v).map(|_| code));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
