use crate::error::{invalid, Error, Result};
use crate::geometry::{dot, PointSet};
use crate::trimmed::TrimmedStats;

use super::slab::SlabConstraint;

/// Mean of the common subset of several slabs and how well it fits them.
#[derive(Debug, Clone, PartialEq)]
pub struct HellyCertificate {
    /// Mean of the points in every constraint's subset.
    pub point: Vec<f64>,
    pub intersection_size: usize,
    /// Largest `|<point, v> - mu_S| / ((|S| / |R|) sigma_S)` over the
    /// constraints; at most one by the averaging argument.
    pub max_ratio: f64,
}

/// Checks that the mean of `R`, the intersection of the constraints' subsets,
/// lies in every slab.
///
/// For each constraint, `|<mu_R, v> - mu_S| <= (|S| / |R|) sigma_S`, and
/// `|S| / |R| <= 2` whenever each subset misses at most a `nu` fraction of the
/// points and `(c + 1) nu <= 1/2` for `c + 1` constraints.
pub fn helly_feasibility_certificate(
    x: &PointSet,
    constraints: &[SlabConstraint],
    nu: f64,
) -> Result<HellyCertificate> {
    if constraints.is_empty() {
        return Err(invalid("no constraints"));
    }
    if !(nu > 0.0 && nu < 1.0) {
        return Err(invalid(format!("nu must lie in (0, 1), got {nu}")));
    }
    let n = x.n();
    let min_subset = crate::trimmed::admissible_size(n, nu)?;
    let mut member = vec![0usize; n];
    for c in constraints {
        if c.direction.dim() != x.d() {
            return Err(Error::DimensionMismatch {
                expected: x.d(),
                found: c.direction.dim(),
            });
        }
        if c.subset.len() < min_subset {
            return Err(invalid(format!(
                "subset of size {} below the admissible size {min_subset}",
                c.subset.len()
            )));
        }
        for &i in &c.subset {
            if i >= n {
                return Err(invalid(format!("subset index {i} out of range")));
            }
            member[i] += 1;
        }
    }
    let r: Vec<usize> = (0..n).filter(|&i| member[i] == constraints.len()).collect();
    let required = crate::trimmed::ceil_tol((1.0 - constraints.len() as f64 * nu) * n as f64).max(1);
    if r.len() < required {
        return Err(Error::SmallIntersection {
            size: r.len(),
            required,
        });
    }
    let mut point = vec![0.0; x.d()];
    for &i in &r {
        for (a, b) in point.iter_mut().zip(x.point(i)) {
            *a += b;
        }
    }
    point.iter_mut().for_each(|a| *a /= r.len() as f64);

    let mut max_ratio: f64 = 0.0;
    for c in constraints {
        let v = c.direction.as_slice();
        let y: Vec<f64> = x.rows().map(|p| dot(p, v)).collect();
        let stats = TrimmedStats::from_subset(&y, c.subset.clone());
        let dev = (dot(&point, v) - stats.mu).abs();
        let bound = c.subset.len() as f64 / r.len() as f64 * stats.sigma1;
        let scale = y.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let ratio = super::slab::scale_ratio(dev, bound, 1e-12 * scale);
        max_ratio = max_ratio.max(ratio);
        if ratio > 1.0 + 1e-9 {
            return Err(Error::Solver(format!(
                "intersection mean violates a slab by ratio {ratio}"
            )));
        }
    }
    Ok(HellyCertificate {
        point,
        intersection_size: r.len(),
        max_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_mean, Direction};
    use crate::median::{build_slab, WindowChoice};

    #[test]
    fn full_subsets_give_the_sample_mean() {
        let x = PointSet::new(vec![
            vec![0.0, 1.0],
            vec![3.0, -2.0],
            vec![1.0, 1.0],
            vec![-1.0, 4.0],
        ])
        .unwrap();
        let all: Vec<usize> = (0..4).collect();
        let slabs: Vec<SlabConstraint> = [vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]
            .into_iter()
            .map(|v| build_slab(&x, &Direction::new(v).unwrap(), WindowChoice::Subset(all.clone())).unwrap())
            .collect();
        let cert = helly_feasibility_certificate(&x, &slabs, 0.1).unwrap();
        let mean = sample_mean(&x);
        assert!((cert.point[0] - mean[0]).abs() < 1e-15 && (cert.point[1] - mean[1]).abs() < 1e-15);
        assert!(cert.max_ratio < 1e-12);
    }

    #[test]
    fn shared_window_has_unit_factor() {
        let x = PointSet::new((0..10).map(|i| vec![i as f64, (i * i % 7) as f64]).collect()).unwrap();
        let s: Vec<usize> = (1..10).collect();
        let slabs: Vec<SlabConstraint> = [vec![1.0, 0.0], vec![0.3, 1.0], vec![-1.0, 2.0]]
            .into_iter()
            .map(|v| build_slab(&x, &Direction::new(v).unwrap(), WindowChoice::Subset(s.clone())).unwrap())
            .collect();
        let cert = helly_feasibility_certificate(&x, &slabs, 0.1).unwrap();
        assert_eq!(cert.intersection_size, 9);
        // The mean of S sits at every slab centre.
        assert!(cert.max_ratio < 1e-12);
    }

    #[test]
    fn rejects_small_subsets() {
        let x = PointSet::from_scalars(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        let slab = build_slab(&x, &Direction::axis(1, 0), WindowChoice::Subset(vec![0, 1])).unwrap();
        assert!(helly_feasibility_certificate(&x, &[slab], 0.1).is_err());
    }
}
