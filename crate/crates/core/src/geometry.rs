//! Point sets, unit directions, covariance matrices and affine maps.
//!
//! Everything is 64-bit floating point. Numerical thresholds live in [`TOL`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Numerical tolerances shared by every module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Smallest eigenvalue (relative to the matrix scale) accepted as positive definite.
    pub pd: f64,
    /// Allowed deviation of a direction's norm from one.
    pub unit: f64,
    /// Generic linear-algebra tolerance (whitening, reconstruction checks).
    pub lin: f64,
}

pub const TOL: Tolerances = Tolerances {
    pd: 1e-10,
    unit: 1e-12,
    lin: 1e-8,
};

/// An ordered multiset of `n` points in `d` dimensions, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl PointSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let n = points.len();
        let d = points.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * d);
        for p in &points {
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: p.len(),
                });
            }
            data.extend_from_slice(p);
        }
        Self::from_flat(n, d, data)
    }

    pub fn from_flat(n: usize, d: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::EmptyPointSet);
        }
        if data.len() != n * d {
            return Err(Error::DimensionMismatch {
                expected: n * d,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                point: pos / d,
                coord: pos % d,
            });
        }
        Ok(Self { n, d, data })
    }

    /// One-dimensional point set from scalars.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::from_flat(values.len(), 1, values.to_vec())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.d)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// `n x d` matrix with one point per row.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.d, &self.data)
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            data.extend(m.row(i).iter());
        }
        Self::from_flat(m.nrows(), m.ncols(), data)
    }

    /// Points at the given indices, in the given order.
    pub fn select(&self, idx: &[usize]) -> PointSet {
        let mut data = Vec::with_capacity(idx.len() * self.d);
        for &i in idx {
            data.extend_from_slice(self.point(i));
        }
        PointSet {
            n: idx.len(),
            d: self.d,
            data,
        }
    }

    pub fn map(&self, f: &AffineMap) -> Result<PointSet> {
        if f.input_dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: f.input_dim(),
                found: self.d,
            });
        }
        let mut data = Vec::with_capacity(self.n * f.output_dim());
        for p in self.rows() {
            data.extend(f.apply_unchecked(p));
        }
        PointSet::from_flat(self.n, f.output_dim(), data)
    }

    /// Largest absolute coordinate, used to scale absolute tolerances.
    pub fn scale(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// A unit vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Normalizes `v`. Fails on zero or non-finite input.
    pub fn new(v: Vec<f64>) -> Result<Self> {
        let norm = norm(&v);
        if !norm.is_finite() || norm == 0.0 {
            return Err(invalid("direction must be a finite nonzero vector"));
        }
        Ok(Self(v.into_iter().map(|x| x / norm).collect()))
    }

    /// Wraps a vector that is already unit length.
    pub fn from_unit(v: Vec<f64>) -> Result<Self> {
        if (norm(&v) - 1.0).abs() > TOL.unit {
            return Err(invalid("direction is not unit length"));
        }
        Ok(Self(v))
    }

    pub fn axis(d: usize, i: usize) -> Self {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        Self(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Inner products `<x_i, v>` in point order.
pub fn project(x: &PointSet, v: &Direction) -> Result<Vec<f64>> {
    if v.dim() != x.d() {
        return Err(Error::DimensionMismatch {
            expected: x.d(),
            found: v.dim(),
        });
    }
    Ok(project_raw(x, v.as_slice()))
}

pub(crate) fn project_raw(x: &PointSet, v: &[f64]) -> Vec<f64> {
    x.rows().map(|p| dot(p, v)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefinite,
}

/// A symmetric matrix known to be positive (semi)definite.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    m: DMatrix<f64>,
    definiteness: Definiteness,
}

impl SpdMatrix {
    /// Symmetrizes `m` and checks it is PSD. It is marked PD when the smallest
    /// eigenvalue exceeds `TOL.pd` times the largest.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(invalid("covariance matrix must be square"));
        }
        let scale = m.abs().max().max(f64::MIN_POSITIVE);
        let asym = (&m - m.transpose()).abs().max();
        if asym > TOL.pd * scale {
            return Err(invalid("covariance matrix is not symmetric"));
        }
        let m = (&m + m.transpose()) * 0.5;
        let eig = SymmetricEigen::new(m.clone()).eigenvalues;
        let lo = eig.min();
        let hi = eig.max().max(0.0);
        if lo < -TOL.pd * scale {
            return Err(invalid("covariance matrix is not positive semidefinite"));
        }
        let definiteness = if hi > 0.0 && lo > TOL.pd * hi {
            Definiteness::PositiveDefinite
        } else {
            Definiteness::PositiveSemidefinite
        };
        Ok(Self { m, definiteness })
    }

    /// Like [`SpdMatrix::new`] but fails with `SingularCovariance` unless PD.
    pub fn new_pd(m: DMatrix<f64>) -> Result<Self> {
        let s = Self::new(m)?;
        if s.is_pd() {
            Ok(s)
        } else {
            Err(Error::SingularCovariance)
        }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            m: DMatrix::identity(d, d),
            definiteness: Definiteness::PositiveDefinite,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn definiteness(&self) -> Definiteness {
        self.definiteness
    }

    pub fn is_pd(&self) -> bool {
        self.definiteness == Definiteness::PositiveDefinite
    }

    /// `v^T Sigma v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let v = DVector::from_column_slice(v);
        (v.transpose() * &self.m * &v)[(0, 0)]
    }

    pub fn eigenvalues(&self) -> DVector<f64> {
        SymmetricEigen::new(self.m.clone()).eigenvalues
    }
}

/// `sqrt(x^T Sigma^{-1} x)` through a Cholesky solve.
pub fn mahalanobis_norm(x: &[f64], sigma: &SpdMatrix) -> Result<f64> {
    if x.len() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            found: x.len(),
        });
    }
    if !sigma.is_pd() {
        return Err(Error::SingularCovariance);
    }
    let chol = sigma
        .matrix()
        .clone()
        .cholesky()
        .ok_or(Error::SingularCovariance)?;
    let l = chol.l();
    let scale = sigma.matrix().diagonal().max();
    if l.diagonal().iter().any(|p| p * p <= TOL.pd * scale) {
        return Err(Error::SingularCovariance);
    }
    let y = l
        .solve_lower_triangular(&DVector::from_column_slice(x))
        .ok_or(Error::SingularCovariance)?;
    Ok(y.norm())
}

/// `x -> A x + b` with `A` of shape `output_dim x input_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl AffineMap {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                found: b.len(),
            });
        }
        Ok(Self { a, b })
    }

    pub fn input_dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                found: x.len(),
            });
        }
        Ok(self.apply_unchecked(x))
    }

    fn apply_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let y = &self.a * DVector::from_column_slice(x) + &self.b;
        y.as_slice().to_vec()
    }

    /// True when `A` is square and its LU pivots are all above `1e-12` times
    /// the largest entry.
    pub fn is_nonsingular(&self) -> bool {
        if !self.a.is_square() || self.a.nrows() == 0 {
            return false;
        }
        let scale = self.a.abs().max();
        if scale == 0.0 {
            return false;
        }
        let lu = self.a.clone().lu();
        lu.u().diagonal().iter().all(|p| p.abs() > TOL.unit * scale)
    }

    pub fn inverse(&self) -> Result<AffineMap> {
        if !self.is_nonsingular() {
            return Err(invalid("affine map is singular"));
        }
        let inv = self
            .a
            .clone()
            .try_inverse()
            .ok_or_else(|| invalid("affine map is singular"))?;
        let b = -(&inv * &self.b);
        Ok(AffineMap { a: inv, b })
    }
}

pub fn sample_mean(x: &PointSet) -> Vec<f64> {
    let mut mean = vec![0.0; x.d()];
    for p in x.rows() {
        for (m, v) in mean.iter_mut().zip(p) {
            *m += v;
        }
    }
    let n = x.n() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    mean
}

/// Covariance with divisor `n`.
pub fn sample_cov(x: &PointSet) -> SpdMatrix {
    let m = cov_matrix(x, &sample_mean(x));
    SpdMatrix::new(m.clone()).unwrap_or(SpdMatrix {
        m,
        definiteness: Definiteness::PositiveSemidefinite,
    })
}

fn cov_matrix(x: &PointSet, mean: &[f64]) -> DMatrix<f64> {
    let d = x.d();
    let mut c = DMatrix::zeros(d, d);
    let mut diff = vec![0.0; d];
    for p in x.rows() {
        for k in 0..d {
            diff[k] = p[k] - mean[k];
        }
        for i in 0..d {
            for j in i..d {
                c[(i, j)] += diff[i] * diff[j];
            }
        }
    }
    let n = x.n() as f64;
    for i in 0..d {
        for j in i..d {
            let v = c[(i, j)] / n;
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    c
}

/// Result of [`whiten`].
#[derive(Debug, Clone)]
pub struct Whitened {
    /// `n x max(rank, 1)` whitened points with identity covariance on their span.
    pub points: PointSet,
    /// Original space to whitened space.
    pub map: AffineMap,
    /// Whitened space back to the affine hull of the original points.
    pub unmap: AffineMap,
    pub rank: usize,
}

/// PCA whitening `Y = Lambda_r^{-1/2} U_r^T (X - mean)` restricted to the
/// eigenvectors whose eigenvalues exceed `TOL.pd` times the largest one.
///
/// A rank-zero set (all points equal) maps to a single zero coordinate.
pub fn whiten(x: &PointSet) -> Whitened {
    let d = x.d();
    let mean = sample_mean(x);
    let cov = cov_matrix(x, &mean);
    let eig = SymmetricEigen::new(cov);
    let top = eig.eigenvalues.max().max(0.0);
    let mut keep: Vec<usize> = (0..d)
        .filter(|&j| top > 0.0 && eig.eigenvalues[j] > TOL.pd * top)
        .collect();
    // Descending eigenvalue order, ties by index, for a reproducible layout.
    keep.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let rank = keep.len();
    let r = rank.max(1);
    let mut w = DMatrix::zeros(r, d);
    let mut winv = DMatrix::zeros(d, r);
    for (row, &j) in keep.iter().enumerate() {
        let lam = eig.eigenvalues[j];
        let u = eig.eigenvectors.column(j);
        for k in 0..d {
            w[(row, k)] = u[k] / lam.sqrt();
            winv[(k, row)] = u[k] * lam.sqrt();
        }
    }
    let mean_v = DVector::from_column_slice(&mean);
    let map = AffineMap {
        b: -(&w * &mean_v),
        a: w,
    };
    let unmap = AffineMap { a: winv, b: mean_v };
    let points = x.map(&map).expect("whitening map matches input dimension");
    Whitened {
        points,
        map,
        unmap,
        rank,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn project_examples() {
        let x = PointSet::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(project(&x, &Direction::axis(2, 0)).unwrap(), vec![1.0, 0.0]);
        let x = PointSet::new(vec![vec![3.0, 4.0]]).unwrap();
        let v = Direction::from_unit(vec![0.6, 0.8]).unwrap();
        assert_relative_eq!(project(&x, &v).unwrap()[0], 5.0, epsilon = 1e-15);
        assert!(project(&x, &Direction::axis(3, 0)).is_err());
    }

    #[test]
    fn mahalanobis_examples() {
        let id = SpdMatrix::identity(2);
        assert_eq!(mahalanobis_norm(&[0.0, 0.0], &id).unwrap(), 0.0);
        assert_relative_eq!(mahalanobis_norm(&[1.0, 0.0], &id).unwrap(), 1.0);
        let s = SpdMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0]))).unwrap();
        assert_relative_eq!(mahalanobis_norm(&[2.0, 0.0], &s).unwrap(), 1.0);
        let sing = SpdMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0]))).unwrap();
        assert_eq!(
            mahalanobis_norm(&[1.0, 0.0], &sing),
            Err(Error::SingularCovariance)
        );
    }

    #[test]
    fn mean_and_cov_examples() {
        let x = PointSet::new(vec![vec![1.0, 1.0]]).unwrap();
        assert_eq!(sample_mean(&x), vec![1.0, 1.0]);
        assert_eq!(sample_cov(&x).matrix(), &DMatrix::zeros(2, 2));
        let x = PointSet::new(vec![vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(sample_mean(&x), vec![1.0, 0.0]);
        let c = sample_cov(&x);
        assert_eq!(c.matrix(), &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        assert!(!c.is_pd());
    }

    #[test]
    fn whiten_two_points_in_one_dimension() {
        let x = PointSet::from_scalars(&[0.0, 2.0]).unwrap();
        let w = whiten(&x);
        assert_eq!(w.rank, 1);
        assert_relative_eq!(sample_cov(&w.points).matrix()[(0, 0)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn whiten_rank_deficient_line() {
        let x = PointSet::new(vec![
            vec![0.0, 0.0],
            vec![1.0, 2.0],
            vec![2.0, 4.0],
            vec![5.0, 10.0],
        ])
        .unwrap();
        let w = whiten(&x);
        assert_eq!(w.rank, 1);
        assert_eq!(w.points.d(), 1);
        assert_relative_eq!(sample_cov(&w.points).matrix()[(0, 0)], 1.0, epsilon = 1e-8);
        let back = w.points.map(&w.unmap).unwrap();
        for (a, b) in back.as_flat().iter().zip(x.as_flat()) {
            assert_relative_eq!(a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn whiten_constant_set_has_rank_zero() {
        let x = PointSet::new(vec![vec![1.0, 2.0]; 3]).unwrap();
        let w = whiten(&x);
        assert_eq!(w.rank, 0);
        assert!(w.points.as_flat().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn point_set_rejects_bad_input() {
        assert_eq!(PointSet::new(vec![]), Err(Error::EmptyPointSet));
        assert!(matches!(
            PointSet::new(vec![vec![1.0], vec![1.0, 2.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            PointSet::new(vec![vec![f64::NAN]]),
            Err(Error::NonFinite { point: 0, coord: 0 })
        ));
    }
}
