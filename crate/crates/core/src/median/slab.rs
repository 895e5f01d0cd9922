use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{dot, project, Direction, PointSet};
use crate::trimmed::{SortedSample, TrimmedStats};

/// `{x : |<x, v> - center| <= halfwidth}` for the slab of one subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlabConstraint {
    pub direction: Direction,
    /// Subset mean of the projections.
    pub center: f64,
    /// Twice the subset mean absolute deviation.
    pub halfwidth: f64,
    /// Indices of the points whose statistics define the slab, ascending.
    pub subset: Vec<usize>,
}

impl SlabConstraint {
    pub fn deviation(&self, x: &[f64]) -> f64 {
        (dot(x, self.direction.as_slice()) - self.center).abs()
    }

    /// Deviation relative to the half-width, minus one; positive outside the slab.
    pub fn excess(&self, x: &[f64], tol: f64) -> f64 {
        self.deviation(x) / self.halfwidth.max(tol) - 1.0
    }

    /// `|<x, v> - center| / sigma1`; a zero-width slab gives 0 on its hyperplane
    /// (within `tol`) and infinity elsewhere.
    pub fn outlyingness(&self, x: &[f64], tol: f64) -> f64 {
        scale_ratio(self.deviation(x), 0.5 * self.halfwidth, tol)
    }
}

/// `dev / sigma`, with the zero-scale convention shared by all certificates.
pub(crate) fn scale_ratio(dev: f64, sigma: f64, tol: f64) -> f64 {
    if sigma > tol {
        dev / sigma
    } else if dev <= tol {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Which subset of the projected sample a slab is built from.
#[derive(Debug, Clone, PartialEq)]
pub enum WindowChoice {
    /// The minimum-`sigma1` window among sorted windows of size at least `min_size`.
    MinSigma { min_size: usize },
    /// The window `start..start + len` of the projections in sorted order.
    Sorted { start: usize, len: usize },
    /// An explicit subset of point indices.
    Subset(Vec<usize>),
}

/// Projects `x` on `v` and turns the chosen subset into a slab.
pub fn build_slab(x: &PointSet, v: &Direction, window: WindowChoice) -> Result<SlabConstraint> {
    let y = project(x, v)?;
    let n = y.len();
    let subset = match window {
        WindowChoice::MinSigma { min_size } => {
            if min_size == 0 || min_size > n {
                return Err(invalid(format!("window size {min_size} outside 1..={n}")));
            }
            let sorted = SortedSample::new(&y);
            let w = sorted.scan(min_size, None, 0.0).min_sigma;
            sorted.window_indices(w.start, w.len)
        }
        WindowChoice::Sorted { start, len } => {
            if len == 0 || start + len > n {
                return Err(invalid(format!("window {start}+{len} outside 0..{n}")));
            }
            SortedSample::new(&y).window_indices(start, len)
        }
        WindowChoice::Subset(s) => {
            if s.is_empty() {
                return Err(invalid("empty subset"));
            }
            if let Some(&bad) = s.iter().find(|&&i| i >= n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: bad,
                });
            }
            s
        }
    };
    let stats = TrimmedStats::from_subset(&y, subset);
    Ok(SlabConstraint {
        direction: v.clone(),
        center: stats.mu,
        halfwidth: 2.0 * stats.sigma1,
        subset: stats.subset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_points_give_zero_width() {
        let x = PointSet::new(vec![vec![1.0, 2.0]; 4]).unwrap();
        let v = Direction::new(vec![1.0, 1.0]).unwrap();
        let s = build_slab(&x, &v, WindowChoice::MinSigma { min_size: 3 }).unwrap();
        assert_relative_eq!(s.center, 3.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(s.halfwidth, 0.0);
    }

    #[test]
    fn line_example() {
        let x = PointSet::from_scalars(&[0.0, 1.0, 2.0, 10.0]).unwrap();
        let s = build_slab(&x, &Direction::axis(1, 0), WindowChoice::MinSigma { min_size: 3 }).unwrap();
        assert_relative_eq!(s.center, 1.0);
        assert_relative_eq!(s.halfwidth, 4.0 / 3.0);
        assert_eq!(s.subset, vec![0, 1, 2]);
    }

    #[test]
    fn opposite_directions_negate_center() {
        let x = PointSet::new(vec![
            vec![0.0, 1.0],
            vec![2.0, -1.0],
            vec![3.0, 5.0],
            vec![-4.0, 0.5],
        ])
        .unwrap();
        let v = Direction::new(vec![0.3, -0.7]).unwrap();
        let a = build_slab(&x, &v, WindowChoice::MinSigma { min_size: 3 }).unwrap();
        let b = build_slab(&x, &v.neg(), WindowChoice::MinSigma { min_size: 3 }).unwrap();
        assert_relative_eq!(a.center, -b.center, epsilon = 1e-15);
        assert_relative_eq!(a.halfwidth, b.halfwidth, epsilon = 1e-15);
    }

    #[test]
    fn zero_scale_convention() {
        assert_eq!(scale_ratio(0.0, 0.0, 1e-12), 0.0);
        assert_eq!(scale_ratio(1.0, 0.0, 1e-12), f64::INFINITY);
        assert_eq!(scale_ratio(3.0, 1.5, 1e-12), 2.0);
    }
}
