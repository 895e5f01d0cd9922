use nalgebra::SymmetricEigen;
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{sample, DistributionSpec, Moments};
use crate::error::{invalid, Error, Result};
use crate::geometry::{sample_cov, sample_mean, PointSet};
use crate::rng;
use crate::trimmed::floor_tol;

/// Where replaced points are put.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum Placement {
    PointMassAt { point: Vec<f64> },
    /// `mean + scale sqrt(lambda_min) v_min`, or `mean + scale v_min` when
    /// `lambda_min = 0`, for the reference covariance's smallest eigenpair.
    FarAlongMinVariance { scale: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ContaminationSpec {
    None,
    /// Each point is independently redrawn from `payload` with probability `eta`.
    HuberMix { eta: f64, payload: DistributionSpec },
    /// Exactly `floor(eta n)` random points are moved to the placement.
    Replace { eta: f64, placement: Placement },
}

impl ContaminationSpec {
    pub fn eta(&self) -> f64 {
        match self {
            ContaminationSpec::None => 0.0,
            ContaminationSpec::HuberMix { eta, .. } | ContaminationSpec::Replace { eta, .. } => *eta,
        }
    }
}

impl Placement {
    /// The target point; `reference` falls back to the sample moments of `x`.
    pub fn resolve(&self, x: &PointSet, reference: Option<&Moments>) -> Result<Vec<f64>> {
        match self {
            Placement::PointMassAt { point } => {
                if point.len() != x.d() {
                    return Err(Error::DimensionMismatch {
                        expected: x.d(),
                        found: point.len(),
                    });
                }
                Ok(point.clone())
            }
            Placement::FarAlongMinVariance { scale } => {
                let (mean, cov) = match reference {
                    Some(m) => (m.mean.clone(), m.cov.matrix().clone()),
                    None => (sample_mean(x), sample_cov(x).matrix().clone()),
                };
                if mean.len() != x.d() {
                    return Err(Error::DimensionMismatch {
                        expected: x.d(),
                        found: mean.len(),
                    });
                }
                let eig = SymmetricEigen::new(cov);
                let k = eig.eigenvalues.imin();
                let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
                // Fix the eigenvector sign: largest-magnitude entry positive.
                let lead = v.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
                if lead < 0.0 {
                    v.iter_mut().for_each(|c| *c = -*c);
                }
                let lambda = eig.eigenvalues[k].max(0.0);
                let step = if lambda > 0.0 { scale * lambda.sqrt() } else { *scale };
                Ok(mean.iter().zip(&v).map(|(m, c)| m + step * c).collect())
            }
        }
    }
}

/// Returns the contaminated set and the sorted corrupted indices.
pub fn contaminate(
    x: &PointSet,
    spec: &ContaminationSpec,
    reference: Option<&Moments>,
    seed: u64,
) -> Result<(PointSet, Vec<usize>)> {
    let eta = spec.eta();
    if !(0.0..1.0).contains(&eta) {
        return Err(invalid(format!("contamination fraction must lie in [0, 1), got {eta}")));
    }
    let (n, d) = (x.n(), x.d());
    let mut data = x.as_flat().to_vec();
    let corrupted = match spec {
        ContaminationSpec::None => Vec::new(),
        ContaminationSpec::HuberMix { payload, .. } => {
            if payload.d != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: payload.d,
                });
            }
            let mut coin = rng::rng(rng::derive(seed, 0));
            let hit: Vec<usize> = (0..n).filter(|_| coin.random::<f64>() < eta).collect();
            let draws = sample(payload, hit.len(), rng::derive(seed, 1))?;
            for (j, &i) in hit.iter().enumerate() {
                data[i * d..(i + 1) * d].copy_from_slice(draws.point(j));
            }
            hit
        }
        ContaminationSpec::Replace { placement, .. } => {
            let count = floor_tol(eta * n as f64).min(n);
            let target = placement.resolve(x, reference)?;
            let mut idx = index::sample(&mut rng::rng(seed), n, count).into_vec();
            idx.sort_unstable();
            for &i in &idx {
                data[i * d..(i + 1) * d].copy_from_slice(&target);
            }
            idx
        }
    };
    Ok((PointSet::from_flat(n, d, data)?, corrupted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::moments;

    #[test]
    fn zero_eta_is_identity() {
        let x = PointSet::new(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let (y, idx) = contaminate(&x, &ContaminationSpec::None, None, 1).unwrap();
        assert_eq!(y, x);
        assert!(idx.is_empty());
        let spec = ContaminationSpec::Replace {
            eta: 0.0,
            placement: Placement::PointMassAt { point: vec![0.0, 0.0] },
        };
        let (y, idx) = contaminate(&x, &spec, None, 1).unwrap();
        assert_eq!(y, x);
        assert!(idx.is_empty());
    }

    #[test]
    fn replace_counts_exactly() {
        let x = sample(&DistributionSpec::gaussian(3).unwrap(), 100, 4).unwrap();
        let e1 = vec![1.0, 0.0, 0.0];
        let spec = ContaminationSpec::Replace {
            eta: 0.1,
            placement: Placement::PointMassAt { point: e1.clone() },
        };
        let (y, idx) = contaminate(&x, &spec, None, 2).unwrap();
        assert_eq!(idx.len(), 10);
        assert_eq!(y.rows().filter(|p| *p == e1.as_slice()).count(), 10);
        let spec = ContaminationSpec::Replace {
            eta: 0.29,
            placement: Placement::PointMassAt { point: e1 },
        };
        assert_eq!(contaminate(&x, &spec, None, 2).unwrap().1.len(), 29);
    }

    #[test]
    fn far_placement_uses_smallest_eigenpair() {
        let spec = DistributionSpec::new(
            2,
            super::super::DistributionKind::Gaussian {
                mean: Some(vec![1.0, 1.0]),
                cov: Some(vec![vec![4.0, 0.0], vec![0.0, 0.25]]),
            },
        )
        .unwrap();
        let m = moments(&spec).unwrap();
        let x = sample(&spec, 10, 0).unwrap();
        let p = Placement::FarAlongMinVariance { scale: 10.0 }.resolve(&x, Some(&m)).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12);
        assert!((p[1] - 6.0).abs() < 1e-12);
    }
}
