//! Command-line front end: speed ingestion, dispatch to the separation and
//! isolation algorithms and the exhaustive oracle, machine-readable reports.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when a computed
//! report violates one of its own hard guarantees.

mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use runner_sep::{
    adversarial_config_at, bit_index, brute_force_pmax, greedy_isolation_oracle, isolate_t5,
    isolate_t6, isolate_t7, isolate_t8, theorem1_time, theorem2_save, theorem3_save, verify_time,
    window_save, IsolationTrace, Method, OracleConfig, SaveReport, SeparationDistance, SpeedSet,
    TimeVector,
};

const SCALE_BUDGET_ENV: &str = "RUNNER_SEP_SCALE_BUDGET";

#[derive(Parser)]
#[command(
    name = "runner-sep",
    version,
    about = "Exact separation witnesses, isolation schedules and brute-force certification \
             for runners on a unit circle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report to this path instead of standard output
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Cap the oracle's worker threads
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct SpeedSource {
    /// Comma-separated distinct positive speeds, e.g. 2,7,16
    #[arg(
        long,
        value_name = "LIST",
        conflicts_with = "speeds_file",
        required_unless_present = "speeds_file"
    )]
    speeds: Option<String>,

    /// File with one speed per line; blank lines and # comments are skipped
    #[arg(long, value_name = "PATH")]
    speeds_file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Bit indices and the top column of a speed set
    Analyze {
        #[command(flatten)]
        source: SpeedSource,
    },
    /// Separation witnesses: --theorem 1|2|3 or a window sweep via --c
    Pmax {
        #[command(flatten)]
        source: SpeedSource,

        /// Guarantee tier: 1 (one runner at 1/2), 2 (half the runners at
        /// 1/4), 3 (window sweep at c = floor(lg n))
        #[arg(long, conflicts_with = "c", required_unless_present = "c")]
        theorem: Option<u8>,

        /// Window parameter for a direct window sweep (distance 1/2^c)
        #[arg(long)]
        c: Option<u32>,

        /// Runner to place at 1/2 (only used by --theorem 1)
        #[arg(long, default_value_t = 1, value_name = "INDEX")]
        runner: usize,
    },
    /// Removal schedules that empty the speed set
    Isolate {
        #[command(flatten)]
        source: SpeedSource,

        /// Schedule: t5 (d=1/2), t6 (d=1/4), t7 (fixed window), t8 (adaptive)
        #[arg(long)]
        method: Method,
    },
    /// Exhaustive search over all time vectors at a scale
    Oracle {
        #[command(subcommand)]
        task: OracleTask,
    },
    /// Generate a worst-case speed pattern for the window sweep
    Adversarial {
        /// Window parameter (>= 2)
        #[arg(long)]
        c: u32,

        /// Final unsaved count the pattern aims for (>= 1)
        #[arg(long)]
        x: u64,

        /// Seed for the odd multipliers
        #[arg(long, default_value_t = 0)]
        seed: u64,

        /// Place the pattern's top column here instead of the minimal p = c
        #[arg(long)]
        p: Option<u32>,
    },
    /// Recompute which runners a witness separates
    Verify {
        #[command(flatten)]
        source: SpeedSource,

        /// Witness bits b_1 b_2 ... b_P, e.g. 01001
        #[arg(long, value_name = "BITS")]
        witness: String,

        /// Separation threshold in the form 1/2^c
        #[arg(long, value_name = "DIST")]
        d: String,
    },
}

#[derive(Subcommand)]
enum OracleTask {
    /// Maximum simultaneously separated count over all vectors at --scale
    Pmax {
        #[command(flatten)]
        source: SpeedSource,

        /// Separation threshold in the form 1/2^c
        #[arg(long, value_name = "DIST")]
        d: String,

        /// Bit scale to enumerate (default: p + c - 2, at least p)
        #[arg(long)]
        scale: Option<u32>,
    },
    /// Greedy schedule that removes the oracle-maximal set each step
    Isolate {
        #[command(flatten)]
        source: SpeedSource,

        /// Separation threshold in the form 1/2^c
        #[arg(long, value_name = "DIST")]
        d: String,

        /// Bit scale to enumerate (default: p + c - 2, at least p)
        #[arg(long)]
        scale: Option<u32>,
    },
}

/// Input problems exit 1; violated guarantees exit 2.
enum Failure {
    Input(anyhow::Error),
    Assertion(String),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(err: E) -> Self {
        Failure::Input(err.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
        Err(Failure::Assertion(msg)) => {
            eprintln!("assertion failed: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let report = match &cli.command {
        Command::Analyze { source } => {
            let speeds = load_speeds(source)?;
            let indices: Vec<u32> = speeds
                .speeds()
                .iter()
                .map(|&s| bit_index(s).expect("validated speeds").value())
                .collect();
            json!({
                "speeds": speeds.speeds(),
                "n": speeds.len(),
                "E": indices,
                "p": speeds.max_bit_index().value(),
            })
        }
        Command::Pmax {
            source,
            theorem,
            c,
            runner,
        } => {
            let speeds = load_speeds(source)?;
            let n = speeds.len();
            let report = match (theorem, c) {
                (Some(1), None) => {
                    let report = theorem1_time(&speeds, *runner)?;
                    if !report.saved.contains(runner) {
                        return Err(Failure::Assertion(format!(
                            "runner {runner} not separated by its own witness"
                        )));
                    }
                    report
                }
                (Some(2), None) => {
                    let report = theorem2_save(&speeds)?;
                    if report.saved_count() < n.div_ceil(2) {
                        return Err(Failure::Assertion(format!(
                            "saved {} of {n}, needed {}",
                            report.saved_count(),
                            n.div_ceil(2)
                        )));
                    }
                    report
                }
                (Some(3), None) => {
                    let report = theorem3_save(&speeds)?;
                    check_window_count(&report, n)?;
                    report
                }
                (Some(t), None) => {
                    return Err(anyhow!("unknown theorem {t} (expected 1, 2 or 3)").into())
                }
                (None, Some(c)) => {
                    let report = window_save(&speeds, *c)?;
                    check_window_count(&report, n)?;
                    report
                }
                _ => unreachable!("clap enforces exactly one of --theorem/--c"),
            };
            check_report(&report, &speeds)?;
            report.to_json()
        }
        Command::Isolate { source, method } => {
            let speeds = load_speeds(source)?;
            let trace = match method {
                Method::T5 => isolate_t5(&speeds)?,
                Method::T6 => isolate_t6(&speeds)?,
                Method::T7 => isolate_t7(&speeds)?,
                Method::T8 => isolate_t8(&speeds)?,
                Method::Oracle => {
                    return Err(
                        anyhow!("use `oracle isolate` for the greedy oracle schedule").into(),
                    )
                }
            };
            check_trace(&trace, &speeds)?;
            trace.to_json()
        }
        Command::Oracle { task } => match task {
            OracleTask::Pmax { source, d, scale } => {
                let speeds = load_speeds(source)?;
                let d = SeparationDistance::parse(d)?;
                let scale = scale.unwrap_or_else(|| default_scale(&speeds, d));
                let result = brute_force_pmax(&speeds, d, scale, &oracle_config(&cli)?)?;
                let recount = verify_time(&speeds, &result.witness, d).len();
                if recount != result.max_saved {
                    return Err(Failure::Assertion(format!(
                        "oracle witness recomputes to {recount}, claimed {}",
                        result.max_saved
                    )));
                }
                result.to_json()
            }
            OracleTask::Isolate { source, d, scale } => {
                let speeds = load_speeds(source)?;
                let d = SeparationDistance::parse(d)?;
                let scale = scale.unwrap_or_else(|| default_scale(&speeds, d));
                let trace = greedy_isolation_oracle(&speeds, d, scale, &oracle_config(&cli)?)?;
                check_trace(&trace, &speeds)?;
                trace.to_json()
            }
        },
        Command::Adversarial { c, x, seed, p } => {
            let config = adversarial_config_at(*c, *x, *seed, p.unwrap_or(*c))?;
            config.to_json()
        }
        Command::Verify { source, witness, d } => {
            let speeds = load_speeds(source)?;
            let witness = TimeVector::from_bit_str(witness)?;
            let d = SeparationDistance::parse(d)?;
            let saved = verify_time(&speeds, &witness, d);
            let report = SaveReport::from_witness(&speeds, witness, d, true);
            debug_assert_eq!(report.saved, saved);
            json!({
                "witness_bits": witness.bit_string(),
                "scale": witness.scale(),
                "d": d.to_string(),
                "saved": saved.iter().copied().collect::<Vec<_>>(),
                "distances": report.distances.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            })
        }
    };
    emit(&cli, &report)
}

fn load_speeds(source: &SpeedSource) -> Result<SpeedSet, Failure> {
    let speeds = match (&source.speeds, &source.speeds_file) {
        (Some(list), None) => list
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u64>()
                    .map_err(|_| anyhow!("bad speed {tok:?}: expected a positive integer"))
            })
            .collect::<Result<Vec<u64>, _>>()?,
        (None, Some(path)) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let mut speeds = Vec::new();
            for line in text.lines() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                speeds.push(
                    line.parse::<u64>()
                        .map_err(|_| anyhow!("bad speed line {line:?} in {}", path.display()))?,
                );
            }
            speeds
        }
        _ => unreachable!("clap enforces exactly one speeds source"),
    };
    Ok(SpeedSet::new(speeds)?)
}

/// The bit support the constructive sweeps use: `p` for thresholds down to
/// 1/4, `p + c - 2` beyond that.
fn default_scale(speeds: &SpeedSet, d: SeparationDistance) -> u32 {
    let p = speeds.max_bit_index().value();
    p.max(p + d.exponent().max(2) - 2)
}

fn oracle_config(cli: &Cli) -> Result<OracleConfig, Failure> {
    let mut config = OracleConfig {
        jobs: cli.jobs,
        ..OracleConfig::default()
    };
    if let Ok(raw) = std::env::var(SCALE_BUDGET_ENV) {
        config.scale_budget = raw
            .parse()
            .map_err(|_| anyhow!("bad {SCALE_BUDGET_ENV} value {raw:?}"))?;
    }
    Ok(config)
}

/// Count guarantee of a window sweep, checked only where it is asserted.
fn check_window_count(report: &SaveReport, n: usize) -> Result<(), Failure> {
    let c = report.guarantee.exponent() as usize;
    if report.guaranteed && report.unsaved_count() > (n - 1) / c {
        return Err(Failure::Assertion(format!(
            "{} unsaved of {n} exceeds ({n}-1)/{c}",
            report.unsaved_count()
        )));
    }
    Ok(())
}

fn check_report(report: &SaveReport, speeds: &SpeedSet) -> Result<(), Failure> {
    report.verify(speeds).map_err(Failure::Assertion)
}

fn check_trace(trace: &IsolationTrace, speeds: &SpeedSet) -> Result<(), Failure> {
    trace.verify(speeds).map_err(Failure::Assertion)?;
    trace.check_guarantees(speeds).map_err(Failure::Assertion)
}

fn emit(cli: &Cli, report: &Value) -> Result<(), Failure> {
    let rendered = match cli.format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(report).expect("report serializes");
            text.push('\n');
            text
        }
        Format::Csv => output::to_csv(report),
    };
    match &cli.output {
        Some(path) => {
            fs::write(path, rendered).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{rendered}"),
    }
    Ok(())
}
