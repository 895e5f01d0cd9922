//! Location estimators: the bucketed slab-median estimator and the baselines
//! it is compared against.

mod baselines;
mod ours;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::PointSet;
use crate::median::{MedianConfig, MedianReport};

pub use baselines::{
    baseline_directions, estimate_coord_median, estimate_empirical_mean, estimate_stahel_donoho,
    estimate_tukey, lower_median, tukey_depth_1d,
};
pub use ours::{bucket_means, bucket_partition, choose_k, estimate_ours};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Ours,
    EmpiricalMean,
    CoordMedian,
    Tukey,
    StahelDonoho,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 5] = [
        EstimatorKind::Ours,
        EstimatorKind::EmpiricalMean,
        EstimatorKind::CoordMedian,
        EstimatorKind::Tukey,
        EstimatorKind::StahelDonoho,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::Ours => "ours",
            EstimatorKind::EmpiricalMean => "empirical_mean",
            EstimatorKind::CoordMedian => "coord_median",
            EstimatorKind::Tukey => "tukey",
            EstimatorKind::StahelDonoho => "stahel_donoho",
        }
    }

    /// Whether the exact (all-directions) version commutes with affine maps.
    pub fn is_affine_equivariant(&self) -> bool {
        !matches!(self, EstimatorKind::CoordMedian)
    }
}

impl std::str::FromStr for EstimatorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        EstimatorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown estimator '{s}'"))
    }
}

/// Direction and candidate budgets of the Tukey and Stahel-Donoho baselines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineConfig {
    pub directions_random: usize,
    /// Directions `x_i - mean` for this many sampled points.
    pub data_subsample: usize,
    /// Normals of hyperplanes through `d` sampled distinct data points.
    pub hyperplane_draws: usize,
    /// Cap on distinct data points used as candidates.
    pub max_point_candidates: usize,
    /// Midpoints of random pairs of distinct data points.
    pub midpoint_candidates: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            directions_random: 64,
            data_subsample: 32,
            hyperplane_draws: 256,
            max_point_candidates: 2000,
            midpoint_candidates: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorConfig {
    pub kind: EstimatorKind,
    pub delta: f64,
    pub eta: f64,
    pub bucket_constant: f64,
    /// Median settings; its `seed` is replaced by one derived from `seed`.
    pub median: MedianConfig,
    pub baseline: BaselineConfig,
    /// Drives the bucket shuffle, the median's directions and the baselines' sampling.
    pub seed: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            kind: EstimatorKind::Ours,
            delta: 0.05,
            eta: 0.0,
            bucket_constant: 5.0,
            median: MedianConfig::default(),
            baseline: BaselineConfig::default(),
            seed: 0,
        }
    }
}

impl EstimatorConfig {
    pub fn with_kind(kind: EstimatorKind) -> Self {
        Self {
            kind,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub estimate: Vec<f64>,
    /// Number of bucket means fed to the median (`n` for the baselines).
    pub k_buckets: usize,
    pub report: Option<MedianReport>,
    /// Every Stahel-Donoho candidate had infinite outlyingness; `estimate` is NaN.
    pub undefined_flag: bool,
    /// `eta` exceeds `1 / (6 d)`, outside the regime the bucket rule is designed for.
    pub eta_above_regime: bool,
    /// Sampled maximin depth (Tukey) or minimax outlyingness (Stahel-Donoho).
    pub score: Option<f64>,
    pub runtime_ms: f64,
}

impl EstimateResult {
    fn plain(estimate: Vec<f64>, k_buckets: usize) -> Self {
        Self {
            estimate,
            k_buckets,
            report: None,
            undefined_flag: false,
            eta_above_regime: false,
            score: None,
            runtime_ms: 0.0,
        }
    }
}

/// Runs the estimator selected by `cfg.kind`.
pub fn estimate(x: &PointSet, cfg: &EstimatorConfig) -> Result<EstimateResult> {
    let start = Instant::now();
    let mut out = match cfg.kind {
        EstimatorKind::Ours => estimate_ours(x, cfg)?,
        EstimatorKind::EmpiricalMean => estimate_empirical_mean(x),
        EstimatorKind::CoordMedian => estimate_coord_median(x),
        EstimatorKind::Tukey => estimate_tukey(x, cfg),
        EstimatorKind::StahelDonoho => estimate_stahel_donoho(x, cfg),
    };
    out.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(out)
}
