//! The `affmed` command line. Exit codes: 0 success, 1 usage, 2 bad input
//! data or configuration, 3 runtime failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use affmed_core::estimators::{estimate, EstimatorConfig, EstimatorKind};

use crate::config::{
    EstimatorEntry, ExperimentConfig, FamilyGrid, FamilyTemplate, GammaSetting, OutputFormat,
};
use crate::experiment::{run_experiment, write_csv, write_json, write_records, TrialRecord};
use crate::points::read_points;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "affmed", version, about = "Affine-equivariant robust mean estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate the mean of the points in a CSV file.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "ours")]
        estimator: EstimatorKind,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 0.0)]
        eta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print a JSON report instead of plain text.
        #[arg(long)]
        json: bool,
    },
    /// Run an experiment described by a JSON config.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output path; stdout when neither is given.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<Format>,
    },
    /// Compare the estimators on the sparse-simplex hard case.
    Hardcase {
        #[arg(long, default_value_t = 20)]
        d: usize,
        /// A number or `auto` for 1/(10 d).
        #[arg(long, default_value = "auto")]
        gamma: String,
        /// Rademacher smoothing added to every coordinate.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 20000)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<Format>,
    },
    /// Run the estimators on a lower-bound family.
    Lowerbound {
        #[arg(long)]
        family: LowerBoundFamily,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        /// Defaults to 2/(d+1) for the breakdown family and 0 otherwise.
        #[arg(long)]
        eta: Option<f64>,
        /// Scale of the breakdown family.
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<Format>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LowerBoundFamily {
    Heavy,
    Breakdown,
    Quant,
}

/// Estimators compared by the presets.
pub const PRESET_ESTIMATORS: [EstimatorKind; 4] = [
    EstimatorKind::Ours,
    EstimatorKind::Tukey,
    EstimatorKind::StahelDonoho,
    EstimatorKind::EmpiricalMean,
];

/// The hard-case experiment at one `(d, n)`.
pub fn hardcase_config(d: usize, gamma: GammaSetting, noise: f64, n: usize, trials: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        families: vec![FamilyGrid {
            name: None,
            family: FamilyTemplate::IntuitionGamma { gamma, noise },
            d: vec![d],
            n: vec![n],
            delta: vec![0.05],
            eta: vec![0.0],
        }],
        contamination: vec![crate::config::ContaminationTemplate::None],
        estimators: PRESET_ESTIMATORS.iter().map(|&k| EstimatorEntry::new(k)).collect(),
        trials,
        base_seed: seed,
        output: None,
        record_runtime: false,
    }
}

#[allow(clippy::too_many_arguments)]
pub fn lowerbound_config(
    family: LowerBoundFamily,
    d: usize,
    n: usize,
    delta: f64,
    eta: Option<f64>,
    r: f64,
    trials: usize,
    seed: u64,
) -> ExperimentConfig {
    let (template, eta) = match family {
        LowerBoundFamily::Heavy => (FamilyTemplate::HeavytailedLb { index: None }, eta.unwrap_or(0.0)),
        LowerBoundFamily::Breakdown => (
            FamilyTemplate::BreakdownLb { r, index: None },
            eta.unwrap_or(2.0 / (d as f64 + 1.0)),
        ),
        LowerBoundFamily::Quant => (FamilyTemplate::QuantLb { index: None }, eta.unwrap_or(0.0)),
    };
    let mut estimators: Vec<EstimatorEntry> = PRESET_ESTIMATORS.iter().map(|&k| EstimatorEntry::new(k)).collect();
    estimators.push(EstimatorEntry::new(EstimatorKind::CoordMedian));
    ExperimentConfig {
        families: vec![FamilyGrid {
            name: None,
            family: template,
            d: vec![d],
            n: vec![n],
            delta: vec![delta],
            eta: vec![eta],
        }],
        contamination: vec![crate::config::ContaminationTemplate::None],
        estimators,
        trials,
        base_seed: seed,
        output: None,
        record_runtime: false,
    }
}

#[derive(Debug, Serialize)]
struct EstimateReport {
    estimate: Vec<f64>,
    outlyingness: Option<f64>,
    iterations: Option<usize>,
    constraints: Option<usize>,
    k_buckets: usize,
    seed: u64,
    undefined: bool,
}

fn fail(code: i32, msg: impl std::fmt::Display) -> i32 {
    eprintln!("affmed: {msg}");
    code
}

fn emit(records: &[TrialRecord], out: Option<PathBuf>, format: Option<OutputFormat>) -> i32 {
    let written = match out {
        Some(path) => write_records(records, &path, format).map(|_| {
            eprintln!("affmed: wrote {} records to {}", records.len(), path.display());
        }),
        None => {
            let stdout = std::io::stdout().lock();
            match format.unwrap_or(OutputFormat::Csv) {
                OutputFormat::Csv => write_csv(records, stdout),
                OutputFormat::Json => write_json(records, stdout),
            }
        }
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => fail(EXIT_RUNTIME, e),
    }
}

fn experiment(cfg: &ExperimentConfig, out: Option<PathBuf>, format: Option<OutputFormat>) -> i32 {
    match run_experiment(cfg) {
        Ok(records) => emit(&records, out, format),
        Err(e) => fail(EXIT_DATA, e),
    }
}

fn run_estimate(input: PathBuf, kind: EstimatorKind, delta: f64, eta: f64, seed: u64, json: bool) -> i32 {
    let x = match read_points(&input) {
        Ok(x) => x,
        Err(e) => return fail(EXIT_DATA, format!("{}: {e}", input.display())),
    };
    let cfg = EstimatorConfig {
        delta,
        eta,
        seed,
        ..EstimatorConfig::with_kind(kind)
    };
    let res = match estimate(&x, &cfg) {
        Ok(r) => r,
        Err(affmed_core::Error::InvalidParameter(m)) => return fail(EXIT_USAGE, m),
        Err(e) => return fail(EXIT_RUNTIME, e),
    };
    let report = EstimateReport {
        outlyingness: res.report.as_ref().map(|r| r.certified_outlyingness),
        iterations: res.report.as_ref().map(|r| r.iterations),
        constraints: res.report.as_ref().map(|r| r.constraints_used),
        estimate: res.estimate,
        k_buckets: res.k_buckets,
        seed,
        undefined: res.undefined_flag,
    };
    let mut stdout = std::io::stdout().lock();
    let written = if json {
        serde_json::to_writer(&mut stdout, &report)
            .map_err(std::io::Error::from)
            .and_then(|_| writeln!(stdout))
    } else {
        let fmt = |v: &[f64]| v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
        let mut text = format!("estimate: {}\nk_buckets: {}\n", fmt(&report.estimate), report.k_buckets);
        if let (Some(t), Some(i), Some(c)) = (report.outlyingness, report.iterations, report.constraints) {
            text += &format!("outlyingness: {t}\niterations: {i}\nconstraints: {c}\n");
        }
        if report.undefined {
            text += "undefined: every candidate has infinite outlyingness\n";
        }
        stdout.write_all(text.as_bytes())
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => fail(EXIT_RUNTIME, e),
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Estimate {
            input,
            estimator,
            delta,
            eta,
            seed,
            json,
        } => run_estimate(input, estimator, delta, eta, seed, json),
        Command::Bench { config, out, format } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_DATA, format!("{}: {e}", config.display())),
            };
            let cfg = match ExperimentConfig::from_json(&text) {
                Ok(c) => c,
                Err(e) => return fail(EXIT_DATA, format!("{}: {e}", config.display())),
            };
            let (out, format) = match (out, &cfg.output) {
                (Some(p), _) => (Some(p), format.map(Into::into)),
                (None, Some(o)) => (Some(o.path.clone()), format.map(Into::into).or(o.format)),
                (None, None) => (None, format.map(Into::into)),
            };
            experiment(&cfg, out, format)
        }
        Command::Hardcase {
            d,
            gamma,
            noise,
            n,
            trials,
            seed,
            out,
            format,
        } => {
            let gamma = match gamma.parse::<f64>() {
                Ok(g) => GammaSetting::Value(g),
                Err(_) => GammaSetting::Named(gamma),
            };
            if let Err(e) = gamma.resolve(d) {
                return fail(EXIT_USAGE, e);
            }
            experiment(&hardcase_config(d, gamma, noise, n, trials, seed), out, format.map(Into::into))
        }
        Command::Lowerbound {
            family,
            d,
            n,
            delta,
            eta,
            r,
            trials,
            seed,
            out,
            format,
        } => experiment(
            &lowerbound_config(family, d, n, delta, eta, r, trials, seed),
            out,
            format.map(Into::into),
        ),
    }
}
