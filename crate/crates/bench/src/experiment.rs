//! Grid expansion, parallel trial execution and table output.
//!
//! Each trial derives its seed as `split(base_seed, grid_index, trial)`; from
//! it come the sample (`derive(seed, 0)`), the contamination (`derive(seed, 1)`)
//! and the estimator (`derive(seed, 2)`) seeds. Records are sorted before
//! output, so the scheduling of the worker pool never shows.

use std::cmp::Ordering;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use affmed_core::estimators::estimate;
use affmed_core::instances::{contaminate, moments, sample, Moments};
use affmed_core::{rng, Error};

use crate::config::{ContaminationTemplate, EstimatorEntry, ExperimentConfig, FamilyGrid, OutputFormat};
use crate::metrics::{certified_lower_bound, euclidean_error, mahalanobis_error};

/// One estimator run. The column order is the CSV header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub family: String,
    pub d: usize,
    pub n: usize,
    pub eta: f64,
    pub delta: f64,
    pub estimator: String,
    pub trial: usize,
    pub seed: u64,
    /// Worst case over the scored members; empty when any member is singular.
    pub error_mahalanobis: Option<f64>,
    pub error_euclidean: Option<f64>,
    /// Directional lower bound on `error_mahalanobis`, also for singular members.
    pub cert_lower_bound: Option<f64>,
    pub outlyingness: Option<f64>,
    pub k_buckets: Option<usize>,
    pub undefined_flag: bool,
    pub runtime_ms: Option<f64>,
    /// Error code when the trial could not be scored.
    pub failure: Option<String>,
}

pub const CSV_HEADER: [&str; 16] = [
    "family",
    "d",
    "n",
    "eta",
    "delta",
    "estimator",
    "trial",
    "seed",
    "error_mahalanobis",
    "error_euclidean",
    "cert_lower_bound",
    "outlyingness",
    "k_buckets",
    "undefined_flag",
    "runtime_ms",
    "failure",
];

#[derive(Debug, Clone)]
struct GridPoint<'a> {
    index: usize,
    grid: &'a FamilyGrid,
    contamination: &'a ContaminationTemplate,
    family: String,
    d: usize,
    n: usize,
    delta: f64,
    eta: f64,
}

fn expand(cfg: &ExperimentConfig) -> Vec<GridPoint<'_>> {
    let mut out = Vec::new();
    for grid in &cfg.families {
        let label = grid.label();
        for contamination in &cfg.contamination {
            // Families with built-in contamination take no extra one.
            if grid.family.eta_is_parameter() && *contamination != ContaminationTemplate::None {
                continue;
            }
            let family = match contamination.label() {
                Some(c) if !grid.family.eta_is_parameter() => format!("{label}+{c}"),
                _ => label.clone(),
            };
            for &d in &grid.d {
                for &n in &grid.n {
                    for &delta in &grid.delta {
                        for &eta in &grid.eta {
                            out.push(GridPoint {
                                index: out.len(),
                                grid,
                                contamination,
                                family: family.clone(),
                                d,
                                n,
                                delta,
                                eta,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

fn blank(p: &GridPoint, estimator: &EstimatorEntry, trial: usize, seed: u64) -> TrialRecord {
    TrialRecord {
        family: p.family.clone(),
        d: p.d,
        n: p.n,
        eta: p.eta,
        delta: p.delta,
        estimator: estimator.label(),
        trial,
        seed,
        error_mahalanobis: None,
        error_euclidean: None,
        cert_lower_bound: None,
        outlyingness: None,
        k_buckets: None,
        undefined_flag: false,
        runtime_ms: None,
        failure: None,
    }
}

/// Worst-case errors over the scored members.
fn score(estimate: &[f64], members: &[Moments]) -> Result<(Option<f64>, f64, f64), Error> {
    let mut maha = Some(0.0f64);
    let mut eucl = 0.0f64;
    let mut cert = 0.0f64;
    for m in members {
        maha = match (maha, mahalanobis_error(estimate, m)) {
            (Some(a), Ok(b)) => Some(a.max(b)),
            (_, Err(Error::SingularCovariance)) | (None, _) => None,
            (_, Err(e)) => return Err(e),
        };
        eucl = eucl.max(euclidean_error(estimate, &m.mean)?);
        cert = cert.max(certified_lower_bound(estimate, m)?.value);
    }
    Ok((maha, eucl, cert))
}

fn run_trial(cfg: &ExperimentConfig, p: &GridPoint, trial: usize) -> Vec<TrialRecord> {
    let seed = rng::split(cfg.base_seed, p.index as u64, trial as u64);
    let fail_all = |e: Error| -> Vec<TrialRecord> {
        cfg.estimators
            .iter()
            .map(|est| TrialRecord {
                failure: Some(e.code().to_string()),
                ..blank(p, est, trial, seed)
            })
            .collect()
    };
    let prepared = (|| {
        let instance = p.grid.family.realize(p.d, p.n, p.delta, p.eta, seed)?;
        let reference = moments(&instance.sample)?;
        let members = instance.scoring.iter().map(moments).collect::<Result<Vec<_>, _>>()?;
        let clean = sample(&instance.sample, p.n, rng::derive(seed, 0))?;
        let spec = if p.grid.family.eta_is_parameter() {
            affmed_core::instances::ContaminationSpec::None
        } else {
            p.contamination.resolve(p.d, p.eta)?
        };
        let (x, _) = contaminate(&clean, &spec, Some(&reference), rng::derive(seed, 1))?;
        Ok::<_, Error>((x, members))
    })();
    let (x, members) = match prepared {
        Ok(v) => v,
        Err(e) => return fail_all(e),
    };
    cfg.estimators
        .iter()
        .map(|entry| {
            let mut rec = blank(p, entry, trial, seed);
            let mut ecfg = entry.config.clone();
            ecfg.delta = p.delta;
            ecfg.eta = p.eta;
            ecfg.seed = rng::derive(seed, 2);
            let start = Instant::now();
            let result = estimate(&x, &ecfg);
            if cfg.record_runtime {
                rec.runtime_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            let res = match result {
                Ok(r) => r,
                Err(e) => {
                    rec.failure = Some(e.code().to_string());
                    return rec;
                }
            };
            rec.k_buckets = Some(res.k_buckets);
            rec.outlyingness = res.report.as_ref().map(|r| r.certified_outlyingness);
            rec.undefined_flag = res.undefined_flag;
            if res.undefined_flag {
                return rec;
            }
            match score(&res.estimate, &members) {
                Ok((maha, eucl, cert)) => {
                    rec.error_mahalanobis = maha;
                    rec.error_euclidean = Some(eucl);
                    rec.cert_lower_bound = Some(cert);
                }
                Err(e) => rec.failure = Some(e.code().to_string()),
            }
            rec
        })
        .collect()
}

fn record_order(a: &TrialRecord, b: &TrialRecord) -> Ordering {
    a.family
        .cmp(&b.family)
        .then(a.d.cmp(&b.d))
        .then(a.n.cmp(&b.n))
        .then(a.eta.total_cmp(&b.eta))
        .then(a.delta.total_cmp(&b.delta))
        .then(a.estimator.cmp(&b.estimator))
        .then(a.trial.cmp(&b.trial))
}

/// Worker count from `AFFMED_THREADS`, or rayon's default.
fn thread_count() -> Option<usize> {
    std::env::var("AFFMED_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs every grid point, estimator and trial; per-trial failures become rows.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>, Error> {
    cfg.validate()?;
    let points = expand(cfg);
    let tasks: Vec<(&GridPoint, usize)> = points
        .iter()
        .flat_map(|p| (0..cfg.trials).map(move |t| (p, t)))
        .collect();
    let work = || -> Vec<TrialRecord> {
        tasks
            .par_iter()
            .flat_map_iter(|&(p, t)| run_trial(cfg, p, t))
            .collect()
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count() {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut records = pool.install(work);
    // Stable sort keeps grid order between otherwise equal keys.
    records.sort_by(record_order);
    Ok(records)
}

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub fn write_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<(), OutputError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(records: &[TrialRecord], mut out: W) -> Result<(), OutputError> {
    serde_json::to_writer_pretty(&mut out, records)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn write_records(records: &[TrialRecord], path: &Path, format: Option<OutputFormat>) -> Result<(), OutputError> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    match format.unwrap_or_else(|| OutputFormat::from_path(path)) {
        OutputFormat::Csv => write_csv(records, file),
        OutputFormat::Json => write_json(records, file),
    }
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<TrialRecord>, OutputError> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<Result<Vec<TrialRecord>, _>>()
        .map_err(OutputError::from)
}
