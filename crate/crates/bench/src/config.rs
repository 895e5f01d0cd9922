//! JSON experiment configuration.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use affmed_core::estimators::{EstimatorConfig, EstimatorKind};
use affmed_core::instances::{
    breakdown_family, heavytailed_eps, quant_family, ContaminationSpec, DistributionSpec, Placement,
};
use affmed_core::{rng, Error, Result};

/// `gamma` as a number or `"auto"` for `1/(10 d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaSetting {
    Value(f64),
    Named(String),
}

impl GammaSetting {
    pub fn resolve(&self, d: usize) -> Result<f64> {
        match self {
            GammaSetting::Value(g) => Ok(*g),
            GammaSetting::Named(s) if s == "auto" => Ok(1.0 / (10.0 * d as f64)),
            GammaSetting::Named(s) => Err(Error::InvalidParameter(format!("gamma must be a number or \"auto\", got {s:?}"))),
        }
    }
}

/// A distribution family with its dimension-dependent parameters left open.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyTemplate {
    IntuitionGamma {
        gamma: GammaSetting,
        #[serde(default)]
        noise: f64,
    },
    /// `eps` follows `(n, d, delta)`; without `index` a member is drawn per trial.
    HeavytailedLb {
        #[serde(default)]
        index: Option<usize>,
    },
    /// Without `index`, data come from member 0 and are scored against the
    /// worst of members `1..=d+1`.
    BreakdownLb {
        r: f64,
        #[serde(default)]
        index: Option<usize>,
    },
    /// Family parameter is the grid `eta`; scoring as for the breakdown family.
    QuantLb {
        #[serde(default)]
        index: Option<usize>,
    },
    Gaussian {
        #[serde(default)]
        noise: f64,
    },
    Custom {
        spec: DistributionSpec,
    },
}

impl FamilyTemplate {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyTemplate::IntuitionGamma { .. } => "intuition_gamma",
            FamilyTemplate::HeavytailedLb { .. } => "heavytailed_lb",
            FamilyTemplate::BreakdownLb { .. } => "breakdown_lb",
            FamilyTemplate::QuantLb { .. } => "quant_lb",
            FamilyTemplate::Gaussian { .. } => "gaussian",
            FamilyTemplate::Custom { .. } => "custom",
        }
    }

    /// The sampling distribution and the members the estimate is scored against.
    pub fn realize(&self, d: usize, n: usize, delta: f64, eta: f64, seed: u64) -> Result<Instance> {
        let single = |spec: DistributionSpec| Instance {
            sample: spec.clone(),
            scoring: vec![spec],
        };
        Ok(match self {
            FamilyTemplate::IntuitionGamma { gamma, noise } => {
                single(DistributionSpec::intuition_gamma(d, gamma.resolve(d)?)?.with_noise(*noise)?)
            }
            FamilyTemplate::HeavytailedLb { index } => {
                let eps = heavytailed_eps(n, d, delta)?;
                let i = match index {
                    Some(i) => *i,
                    None => 1 + (rng::derive(seed, 3) % d as u64) as usize,
                };
                single(DistributionSpec::heavytailed(d, i, eps)?)
            }
            FamilyTemplate::BreakdownLb { r, index: Some(i) } => single(DistributionSpec::breakdown(d, *i, *r)?),
            FamilyTemplate::BreakdownLb { r, index: None } => {
                let fam = breakdown_family(d, *r)?;
                Instance {
                    sample: fam.members[0].clone(),
                    scoring: fam.members[1..].to_vec(),
                }
            }
            FamilyTemplate::QuantLb { index: Some(i) } => single(DistributionSpec::quant(d, *i, eta)?),
            FamilyTemplate::QuantLb { index: None } => {
                let fam = quant_family(d, eta)?;
                Instance {
                    sample: fam.members[0].clone(),
                    scoring: fam.members[1..].to_vec(),
                }
            }
            FamilyTemplate::Gaussian { noise } => single(DistributionSpec::gaussian(d)?.with_noise(*noise)?),
            FamilyTemplate::Custom { spec } => {
                if spec.d != d {
                    return Err(Error::DimensionMismatch { expected: d, found: spec.d });
                }
                single(spec.clone())
            }
        })
    }

    /// Whether the family carries its own contamination, so the grid `eta`
    /// is only passed to the estimators and no contamination is added.
    pub fn eta_is_parameter(&self) -> bool {
        matches!(self, FamilyTemplate::QuantLb { .. } | FamilyTemplate::BreakdownLb { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub sample: DistributionSpec,
    /// Error is the worst case over these members.
    pub scoring: Vec<DistributionSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyGrid {
    /// Label in the output; defaults to the family kind.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(flatten)]
    pub family: FamilyTemplate,
    pub d: Vec<usize>,
    pub n: Vec<usize>,
    #[serde(default = "default_delta")]
    pub delta: Vec<f64>,
    #[serde(default = "default_eta")]
    pub eta: Vec<f64>,
}

fn default_delta() -> Vec<f64> {
    vec![0.05]
}

fn default_eta() -> Vec<f64> {
    vec![0.0]
}

impl FamilyGrid {
    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.family.name().to_string())
    }
}

/// A point target resolved at a given dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum PlacementTemplate {
    /// The basis vector `e_index` (1-based).
    Axis { index: usize },
    Point { point: Vec<f64> },
    FarAlongMinVariance { scale: f64 },
}

impl PlacementTemplate {
    pub fn resolve(&self, d: usize) -> Result<Placement> {
        Ok(match self {
            PlacementTemplate::Axis { index } => {
                if !(1..=d).contains(index) {
                    return Err(Error::InvalidParameter(format!("axis {index} outside 1..={d}")));
                }
                let mut e = vec![0.0; d];
                e[index - 1] = 1.0;
                Placement::PointMassAt { point: e }
            }
            PlacementTemplate::Point { point } => Placement::PointMassAt { point: point.clone() },
            PlacementTemplate::FarAlongMinVariance { scale } => Placement::FarAlongMinVariance { scale: *scale },
        })
    }
}

/// Contamination with its fraction taken from the grid `eta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ContaminationTemplate {
    None,
    /// Huber mixing with a point mass at `payload`.
    HuberMix { payload: PlacementTemplate },
    Replace { placement: PlacementTemplate },
}

impl ContaminationTemplate {
    pub fn label(&self) -> Option<&'static str> {
        match self {
            ContaminationTemplate::None => None,
            ContaminationTemplate::HuberMix { .. } => Some("huber_mix"),
            ContaminationTemplate::Replace { .. } => Some("replace"),
        }
    }

    pub fn resolve(&self, d: usize, eta: f64) -> Result<ContaminationSpec> {
        if eta == 0.0 {
            return Ok(ContaminationSpec::None);
        }
        Ok(match self {
            ContaminationTemplate::None => ContaminationSpec::None,
            ContaminationTemplate::HuberMix { payload } => match payload.resolve(d)? {
                Placement::PointMassAt { point } => ContaminationSpec::HuberMix {
                    eta,
                    payload: DistributionSpec::point_mass(point)?,
                },
                Placement::FarAlongMinVariance { .. } => {
                    return Err(Error::InvalidParameter("huber payload must be a fixed point".into()))
                }
            },
            ContaminationTemplate::Replace { placement } => ContaminationSpec::Replace {
                eta,
                placement: placement.resolve(d)?,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorEntry {
    /// Label in the output; defaults to the estimator kind.
    #[serde(default)]
    pub label: Option<String>,
    #[serde(flatten)]
    pub config: EstimatorConfig,
}

impl EstimatorEntry {
    pub fn new(kind: EstimatorKind) -> Self {
        Self {
            label: None,
            config: EstimatorConfig::with_kind(kind),
        }
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.config.kind.name().to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    /// JSON for a `.json` extension, CSV otherwise.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub families: Vec<FamilyGrid>,
    #[serde(default = "default_contamination")]
    pub contamination: Vec<ContaminationTemplate>,
    pub estimators: Vec<EstimatorEntry>,
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    /// Fill `runtime_ms`; off by default so reruns produce identical bytes.
    #[serde(default)]
    pub record_runtime: bool,
}

fn default_contamination() -> Vec<ContaminationTemplate> {
    vec![ContaminationTemplate::None]
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.families.is_empty() || self.estimators.is_empty() || self.contamination.is_empty() {
            return bad("families, estimators and contamination must be nonempty");
        }
        for f in &self.families {
            if f.d.is_empty() || f.n.is_empty() || f.delta.is_empty() || f.eta.is_empty() {
                return bad("every grid axis must be nonempty");
            }
            if f.d.contains(&0) || f.n.contains(&0) {
                return bad("d and n must be positive");
            }
            if f.delta.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
                return bad("delta must lie in (0, 1)");
            }
            if f.eta.iter().any(|&x| !(0.0..1.0).contains(&x)) {
                return bad("eta must lie in [0, 1)");
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let cfg = ExperimentConfig::from_json(
            r#"{
                "families": [{"kind": "intuition_gamma", "gamma": "auto", "d": [3], "n": [100]}],
                "estimators": [{"kind": "ours"}, {"kind": "tukey", "label": "tukey_small"}],
                "trials": 2
            }"#,
        )
        .unwrap();
        assert_eq!(cfg.families[0].delta, vec![0.05]);
        assert_eq!(cfg.contamination, vec![ContaminationTemplate::None]);
        assert_eq!(cfg.estimators[1].label(), "tukey_small");
        assert_eq!(cfg.estimators[1].config.kind, EstimatorKind::Tukey);
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_values() {
        let base = r#"{"families": [{"kind": "gaussian", "d": [2], "n": [10]}], "estimators": [{"kind": "ours"}], "trials": 0}"#;
        assert!(ExperimentConfig::from_json(base).is_err());
        assert!(GammaSetting::Named("big".into()).resolve(3).is_err());
        assert_eq!(GammaSetting::Named("auto".into()).resolve(20).unwrap(), 1.0 / 200.0);
    }

    #[test]
    fn distribution_specs_round_trip() {
        let s = DistributionSpec::quant(4, 1, 0.05).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"kind\":\"quant_lb\""));
        assert_eq!(serde_json::from_str::<DistributionSpec>(&text).unwrap(), s);
        let c = ContaminationSpec::Replace {
            eta: 0.1,
            placement: Placement::FarAlongMinVariance { scale: 3.0 },
        };
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<ContaminationSpec>(&text).unwrap(), c);
    }

    #[test]
    fn family_realization() {
        let t = FamilyTemplate::BreakdownLb { r: 1.0, index: None };
        let inst = t.realize(4, 100, 0.05, 0.0, 1).unwrap();
        assert_eq!(inst.scoring.len(), 5);
        let t = FamilyTemplate::HeavytailedLb { index: None };
        let a = t.realize(4, 1000, 0.01, 0.0, 7).unwrap();
        assert_eq!(a, t.realize(4, 1000, 0.01, 0.0, 7).unwrap());
    }
}
