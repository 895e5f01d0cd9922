//! Error metrics: exact Mahalanobis error and the directional lower bound
//! `|<x, v>| / sqrt(v^T Sigma v)`, which holds for every direction `v`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use affmed_core::geometry::{mahalanobis_norm, norm, SpdMatrix};
use affmed_core::instances::{moments, DistributionSpec, Moments};
use affmed_core::{rng, Error, Result};

/// Number of random directions in the fixed certificate sweep.
pub const SWEEP_DIRECTIONS: usize = 2048;
const SWEEP_SEED: u64 = 0x5eed_d1ec;

fn difference(estimate: &[f64], mean: &[f64]) -> Result<Vec<f64>> {
    if estimate.len() != mean.len() {
        return Err(Error::DimensionMismatch {
            expected: mean.len(),
            found: estimate.len(),
        });
    }
    Ok(estimate.iter().zip(mean).map(|(a, b)| a - b).collect())
}

/// `||estimate - mean||_Sigma`; fails with `SingularCovariance` when `Sigma` is singular.
pub fn mahalanobis_error(estimate: &[f64], moments: &Moments) -> Result<f64> {
    if !moments.nonsingular {
        return Err(Error::SingularCovariance);
    }
    mahalanobis_norm(&difference(estimate, &moments.mean)?, &moments.cov)
}

/// [`mahalanobis_error`] against the exact moments of `spec`.
pub fn mahalanobis_error_spec(estimate: &[f64], spec: &DistributionSpec) -> Result<f64> {
    mahalanobis_error(estimate, &moments(spec)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalCertificate {
    pub value: f64,
    /// Every supplied direction had `v^T Sigma v` at rounding level.
    pub all_null: bool,
}

/// Max over `directions` of `|<estimate - mean, v>| / sqrt(v^T Sigma v)`,
/// skipping directions where `Sigma` vanishes.
pub fn directional_certificate(
    estimate: &[f64],
    mean: &[f64],
    cov: &SpdMatrix,
    directions: &[Vec<f64>],
) -> Result<DirectionalCertificate> {
    let diff = difference(estimate, mean)?;
    let top = cov.eigenvalues().max().max(0.0);
    let floor = 1e-12 * top;
    let mut value = 0.0f64;
    let mut all_null = true;
    for v in directions {
        if v.len() != diff.len() {
            return Err(Error::DimensionMismatch {
                expected: diff.len(),
                found: v.len(),
            });
        }
        let q = cov.quad_form(v);
        if !(q > floor) {
            continue;
        }
        all_null = false;
        let proj: f64 = diff.iter().zip(v).map(|(a, b)| a * b).sum();
        value = value.max(proj.abs() / q.sqrt());
    }
    Ok(DirectionalCertificate {
        value: if all_null { 0.0 } else { value },
        all_null,
    })
}

/// The fixed sweep: seeded uniform directions followed by the coordinate axes.
pub fn sweep_directions(d: usize, count: usize) -> Vec<Vec<f64>> {
    let mut g = rng::rng(rng::derive(SWEEP_SEED, d as u64));
    let mut out = Vec::with_capacity(count + d);
    while out.len() < count {
        let v: Vec<f64> = (0..d).map(|_| g.sample(StandardNormal)).collect();
        let s = norm(&v);
        if s > 0.0 {
            out.push(v.into_iter().map(|a| a / s).collect());
        }
    }
    for j in 0..d {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        out.push(e);
    }
    out
}

/// `Sigma^+ x` normalized, the maximizing direction when `x` lies in the
/// range of `Sigma`.
fn optimal_direction(diff: &[f64], cov: &SpdMatrix) -> Option<Vec<f64>> {
    let eig = SymmetricEigen::new(cov.matrix().clone());
    let top = eig.eigenvalues.max();
    if !(top > 0.0) {
        return None;
    }
    let inv = eig.eigenvalues.map(|l| if l > 1e-12 * top { 1.0 / l } else { 0.0 });
    let pinv = &eig.eigenvectors * DMatrix::from_diagonal(&inv) * eig.eigenvectors.transpose();
    let v = pinv * DVector::from_column_slice(diff);
    let s = v.norm();
    (s > 0.0 && s.is_finite()).then(|| v.iter().map(|a| a / s).collect())
}

/// Directional lower bound over the fixed sweep, the error direction and the
/// pseudo-inverse direction.
pub fn certified_lower_bound(estimate: &[f64], moments: &Moments) -> Result<DirectionalCertificate> {
    let diff = difference(estimate, &moments.mean)?;
    let d = diff.len();
    let mut dirs = sweep_directions(d, SWEEP_DIRECTIONS);
    let s = norm(&diff);
    if s > 0.0 {
        dirs.push(diff.iter().map(|a| a / s).collect());
    }
    if let Some(v) = optimal_direction(&diff, &moments.cov) {
        dirs.push(v);
    }
    directional_certificate(estimate, &moments.mean, &moments.cov, &dirs)
}

pub fn euclidean_error(estimate: &[f64], mean: &[f64]) -> Result<f64> {
    Ok(norm(&difference(estimate, mean)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn identity_moments(d: usize) -> Moments {
        moments(&DistributionSpec::gaussian(d).unwrap()).unwrap()
    }

    #[test]
    fn zero_error_at_the_mean() {
        let m = identity_moments(3);
        assert_eq!(mahalanobis_error(&[0.0; 3], &m).unwrap(), 0.0);
        let c = directional_certificate(&[0.0; 3], &m.mean, &m.cov, &sweep_directions(3, 16)).unwrap();
        assert_eq!(c.value, 0.0);
        assert!(!c.all_null);
    }

    #[test]
    fn identity_covariance_gives_euclidean_distance() {
        let m = identity_moments(2);
        let x = [3.0, 4.0];
        assert_relative_eq!(mahalanobis_error(&x, &m).unwrap(), 5.0, max_relative = 1e-14);
        let c = directional_certificate(&x, &m.mean, &m.cov, &[vec![0.6, 0.8], vec![1.0, 0.0]]).unwrap();
        assert_relative_eq!(c.value, 5.0, max_relative = 1e-14);
    }

    #[test]
    fn singular_covariance_is_rejected_and_null_directions_flagged() {
        let m = moments(&DistributionSpec::point_mass(vec![1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(mahalanobis_error(&[1.0, 2.0], &m), Err(Error::SingularCovariance));
        let c = certified_lower_bound(&[1.0, 2.0], &m).unwrap();
        assert!(c.all_null);
        assert_eq!(c.value, 0.0);
    }

    #[test]
    fn sweep_is_fixed() {
        assert_eq!(sweep_directions(4, 10), sweep_directions(4, 10));
        assert_eq!(sweep_directions(4, 10).len(), 14);
    }
}
