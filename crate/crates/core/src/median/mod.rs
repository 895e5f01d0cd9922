//! The slab-intersection median.
//!
//! For every direction `v` and every admissible subset `S` of the projected
//! sample, the slab `|<x, v> - mu_{v,S}| <= 2 sigma_{v,S}` is intersected with
//! the convex hull of the data. [`high_dim_median`] returns a hull point that
//! (approximately) minimizes the worst normalized slab violation over a pool
//! of directions grown by a cutting-plane loop, together with a certificate of
//! its outlyingness relative to every direction it examined.

mod helly;
mod lp;
mod oracle;
mod slab;

use nalgebra::{DMatrix, SymmetricEigen};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{dot, norm, project_raw, sample_mean, whiten, Direction, PointSet};
use crate::rng;
use crate::trimmed::{admissible_size, SortedSample, Window};

pub use helly::{helly_feasibility_certificate, HellyCertificate};
pub use slab::{build_slab, SlabConstraint, WindowChoice};

use lp::{Cut, PointLp};
use oracle::{evaluate, flat_normals, frame_directions, normalized, oracle_round, random_directions, Eval};

/// Coordinates in which directions are sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquivariantMode {
    /// Whitened coordinates: the procedure commutes with affine maps.
    Whitened,
    /// Centered original coordinates, plus axis and eigenvector candidates.
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MedianConfig {
    /// Trimming level; `None` means `1 / (3 d)`.
    pub nu: Option<f64>,
    /// The loop stops once no examined direction is violated by more than
    /// this fraction of the slab half-width.
    pub slack_eps: f64,
    pub max_iterations: usize,
    /// Random directions per oracle round.
    pub directions_random: usize,
    /// Point-to-data directions (and, in raw mode, axes and eigenvectors).
    pub directions_data: bool,
    /// Number of data points used for point-to-data directions per round.
    pub data_subsample: usize,
    /// Candidates polished by local ascent per round.
    pub refine_candidates: usize,
    pub refine_steps: usize,
    /// Violated directions turned into cuts per round.
    pub cuts_per_round: usize,
    pub seed: u64,
    pub equivariant_mode: EquivariantMode,
}

impl Default for MedianConfig {
    fn default() -> Self {
        Self {
            nu: None,
            slack_eps: 0.05,
            max_iterations: 200,
            directions_random: 64,
            directions_data: true,
            data_subsample: 16,
            refine_candidates: 3,
            refine_steps: 20,
            cuts_per_round: 4,
            seed: 0,
            equivariant_mode: EquivariantMode::Whitened,
        }
    }
}

impl MedianConfig {
    pub fn nu_for(&self, d: usize) -> f64 {
        self.nu.unwrap_or(1.0 / (3.0 * d as f64))
    }

    fn validate(&self, d: usize) -> Result<()> {
        let nu = self.nu_for(d);
        if !(nu > 0.0 && nu < 1.0) {
            return Err(invalid(format!("nu must lie in (0, 1), got {nu}")));
        }
        if !(self.slack_eps >= 0.0) {
            return Err(invalid("slack_eps must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// The loop hit `max_iterations` before the oracle was satisfied.
    pub iteration_limit: bool,
    /// A one-dimensional feasible interval came out empty beyond rounding.
    pub crossed_interval: bool,
    /// The point program's optimum left the hull; weights were solved directly.
    pub weight_form_fallback: bool,
    /// Rank of the centered data.
    pub rank: usize,
    /// Largest normalized violation seen in the final sweep.
    pub final_violation: f64,
    /// Optimal value of the last min-max program.
    pub lp_objective: f64,
}

/// One direction of the final certificate, in original coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateSlab {
    pub direction: Vec<f64>,
    /// Mean of the minimum-`sigma1` window.
    pub center: f64,
    pub sigma1: f64,
    /// Scale below which `sigma1` and deviations count as zero.
    pub tol: f64,
}

impl CertificateSlab {
    pub fn outlyingness(&self, x: &[f64]) -> f64 {
        slab::scale_ratio((dot(x, &self.direction) - self.center).abs(), self.sigma1, self.tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianReport {
    pub estimate: Vec<f64>,
    /// Max over [`MedianReport::certificate`] of `|<x, v> - mu_v| / sigma_v`.
    pub certified_outlyingness: f64,
    pub iterations: usize,
    pub constraints_used: usize,
    /// Barycentric weights of the estimate over the input points.
    pub hull_weights: Vec<f64>,
    pub diagnostics: Diagnostics,
    pub certificate: Vec<CertificateSlab>,
}

impl MedianReport {
    pub fn recompute_outlyingness(&self) -> f64 {
        self.certificate
            .iter()
            .map(|c| c.outlyingness(&self.estimate))
            .fold(0.0, f64::max)
    }
}

/// Random hyperplane fits used to detect heavily populated hyperplanes.
const FLAT_DRAWS: usize = 64;

/// Working coordinates: whitened, or centered and rescaled raw coordinates.
struct Frame {
    z: PointSet,
    rank: usize,
    /// Row `j` maps working coordinate `j` back to a linear functional on the
    /// original space: `<x - mean, row_j> = z_j`.
    functionals: DMatrix<f64>,
}

impl Frame {
    fn new(x: &PointSet, mode: EquivariantMode) -> Self {
        let w = whiten(x);
        match mode {
            EquivariantMode::Whitened => {
                // Whitening fixes the frame only up to a rotation; pinning it
                // down makes the rounding, and thus every later decision,
                // the same for affinely related inputs.
                let rot = canonical_rotation(&w.points);
                Frame {
                    z: PointSet::from_matrix(&(w.points.to_matrix() * &rot)).expect("finite whitened data"),
                    rank: w.rank,
                    functionals: rot.transpose() * w.map.a,
                }
            }
            EquivariantMode::Raw => {
                let mean = sample_mean(x);
                let s = x
                    .rows()
                    .flat_map(|p| p.iter().zip(&mean).map(|(a, b)| (a - b).abs()))
                    .fold(0.0, f64::max);
                let s = if s > 0.0 { s } else { 1.0 };
                let data = x
                    .rows()
                    .flat_map(|p| p.iter().zip(&mean).map(move |(a, b)| (a - b) / s))
                    .collect();
                Frame {
                    z: PointSet::from_flat(x.n(), x.d(), data).expect("finite centered data"),
                    rank: w.rank,
                    functionals: DMatrix::identity(x.d(), x.d()) / s,
                }
            }
        }
    }

    /// Original-space unit direction whose projections are an increasing
    /// affine function of the working projections along `u`.
    fn to_original(&self, u: &[f64]) -> Option<Vec<f64>> {
        let d = self.functionals.ncols();
        let v: Vec<f64> = (0..d)
            .map(|k| (0..u.len()).map(|j| self.functionals[(j, k)] * u[j]).sum())
            .collect();
        normalized(v)
    }

    fn tol(&self) -> f64 {
        let s = self.z.rows().map(norm).fold(0.0, f64::max);
        1e-9 * s.max(f64::MIN_POSITIVE)
    }
}

/// Orthogonal `r x r` basis of whitened points determined by the data alone:
/// eigenvectors of `mean(|z|^2 z z^T)` by decreasing eigenvalue, each signed
/// so the third moment along it is nonnegative.
fn canonical_rotation(z: &PointSet) -> DMatrix<f64> {
    let r = z.d();
    let mut b = DMatrix::<f64>::zeros(r, r);
    for p in z.rows() {
        let s: f64 = p.iter().map(|v| v * v).sum();
        for i in 0..r {
            for j in i..r {
                b[(i, j)] += s * p[i] * p[j];
            }
        }
    }
    for i in 0..r {
        for j in 0..i {
            b[(i, j)] = b[(j, i)];
        }
    }
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &c| eig.eigenvalues[c].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&c)));
    let mut rot = DMatrix::<f64>::zeros(r, r);
    for (col, &k) in order.iter().enumerate() {
        let u = eig.eigenvectors.column(k);
        let skew: f64 = z.rows().map(|p| dot(p, u.as_slice()).powi(3)).sum();
        let sign = if skew < 0.0 { -1.0 } else { 1.0 };
        for i in 0..r {
            rot[(i, col)] = sign * u[i];
        }
    }
    rot
}

/// Certificate slab of `x` along `v`: the minimum-`sigma1` window of size at least `m`.
fn certificate_slab(x: &PointSet, v: Vec<f64>, m: usize) -> CertificateSlab {
    let proj = project_raw(x, &v);
    let sorted = SortedSample::new(&proj);
    let w = sorted.scan(m, None, 0.0).min_sigma;
    let spread = sorted.max() - sorted.min();
    let mag = sorted.min().abs().max(sorted.max().abs());
    CertificateSlab {
        direction: v,
        center: w.mu,
        sigma1: w.sigma1,
        tol: 1e-8 * spread + 1e-13 * mag,
    }
}

/// Weights on the two sorted neighbours of `p` that reproduce it.
fn bracket_weights(sorted: &SortedSample, p: f64, n: usize) -> Vec<f64> {
    let values = sorted.values();
    let mut w = vec![0.0; n];
    let b = values.partition_point(|&v| v < p).min(values.len() - 1);
    if b == 0 || values[b] == p {
        w[sorted.original_index(b)] = 1.0;
    } else {
        let a = b - 1;
        let wa = (values[b] - p) / (values[b] - values[a]);
        w[sorted.original_index(a)] = wa;
        w[sorted.original_index(b)] += 1.0 - wa;
    }
    w
}

/// The slab-intersection median of `x`.
pub fn high_dim_median(x: &PointSet, cfg: &MedianConfig) -> Result<MedianReport> {
    let (n, d) = (x.n(), x.d());
    cfg.validate(d)?;
    let m = admissible_size(n, cfg.nu_for(d))?;

    if d == 1 {
        return Ok(median_1d(x, m));
    }
    let frame = Frame::new(x, cfg.equivariant_mode);
    if frame.rank == 0 {
        return Ok(constant_report(x));
    }
    if frame.rank == 1 && cfg.equivariant_mode == EquivariantMode::Whitened {
        return Ok(median_on_line(x, &frame, m));
    }
    median_cutting_plane(x, &frame, m, cfg)
}

fn constant_report(x: &PointSet) -> MedianReport {
    let n = x.n();
    MedianReport {
        estimate: x.point(0).to_vec(),
        certified_outlyingness: 0.0,
        iterations: 0,
        constraints_used: 0,
        hull_weights: vec![1.0 / n as f64; n],
        diagnostics: Diagnostics::default(),
        certificate: Vec::new(),
    }
}

/// Exact one-dimensional median: the midpoint of the feasible interval.
fn median_1d(x: &PointSet, m: usize) -> MedianReport {
    let y = x.as_flat();
    let sorted = SortedSample::new(y);
    let fi = sorted.feasible_interval(m);
    let p = fi.interval.midpoint();
    let cert = vec![certificate_slab(x, vec![1.0], m)];
    let weights = bracket_weights(&sorted, p, x.n());
    finish_bypass(vec![p], cert, weights, fi.crossed, if sorted.min() == sorted.max() { 0 } else { 1 })
}

/// Rank-one data: solve along the line and map back.
fn median_on_line(x: &PointSet, frame: &Frame, m: usize) -> MedianReport {
    let y: Vec<f64> = frame.z.rows().map(|p| p[0]).collect();
    let sorted = SortedSample::new(&y);
    let fi = sorted.feasible_interval(m);
    let weights = bracket_weights(&sorted, fi.interval.midpoint(), x.n());
    let estimate = lp::combine(x, &weights);
    let v = frame.to_original(&[1.0]).expect("rank one frame has a direction");
    let cert = vec![certificate_slab(x, v, m)];
    finish_bypass(estimate, cert, weights, fi.crossed, 1)
}

fn finish_bypass(
    estimate: Vec<f64>,
    certificate: Vec<CertificateSlab>,
    hull_weights: Vec<f64>,
    crossed: bool,
    rank: usize,
) -> MedianReport {
    let mut report = MedianReport {
        estimate,
        certified_outlyingness: 0.0,
        iterations: 0,
        constraints_used: 0,
        hull_weights,
        diagnostics: Diagnostics {
            crossed_interval: crossed,
            rank,
            ..Diagnostics::default()
        },
        certificate,
    };
    report.certified_outlyingness = report.recompute_outlyingness();
    report
}

/// Directions accumulated by the cutting-plane loop, with their windows.
struct Pool {
    dirs: Vec<Vec<f64>>,
    windows: Vec<Vec<(usize, usize)>>,
    slabs: usize,
}

impl Pool {
    fn new() -> Self {
        Self {
            dirs: Vec::new(),
            windows: Vec::new(),
            slabs: 0,
        }
    }

    /// Adds the binding, minimum-`sigma1` and most violated windows of `e`.
    fn add(&mut self, lp: &mut PointLp, e: &Eval) {
        let j = match self
            .dirs
            .iter()
            .position(|u| dot(u, &e.u) > 1.0 - 1e-12)
        {
            Some(j) => j,
            None => {
                self.dirs.push(e.u.clone());
                self.windows.push(Vec::new());
                lp.add_support(&e.u, e.min, e.max);
                self.dirs.len() - 1
            }
        };
        let mut ws: Vec<Window> = vec![e.scan.lower, e.scan.upper, e.scan.min_sigma];
        if let Some((_, w)) = e.scan.worst {
            ws.push(w);
        }
        for w in ws {
            let key = (w.start, w.len);
            if self.windows[j].contains(&key) {
                continue;
            }
            self.windows[j].push(key);
            self.slabs += 1;
            lp.add_cut(&Cut {
                u: self.dirs[j].clone(),
                center: w.mu,
                halfwidth: 2.0 * w.sigma1,
            });
        }
    }

    fn cuts(&self, z: &PointSet) -> Vec<Cut> {
        let mut out = Vec::with_capacity(self.slabs);
        for (u, ws) in self.dirs.iter().zip(&self.windows) {
            let sorted = SortedSample::new(&project_raw(z, u));
            for &(start, len) in ws {
                let w = sorted.window(start, len);
                out.push(Cut {
                    u: u.clone(),
                    center: w.mu,
                    halfwidth: 2.0 * w.sigma1,
                });
            }
        }
        out
    }
}

fn median_cutting_plane(
    x: &PointSet,
    frame: &Frame,
    m: usize,
    cfg: &MedianConfig,
) -> Result<MedianReport> {
    let z = &frame.z;
    let r = z.d();
    let tol = frame.tol();
    let mut rng: ChaCha8Rng = rng::rng(cfg.seed);
    let mut pool = Pool::new();
    let mut lp = PointLp::new(r, tol);

    let init = match cfg.equivariant_mode {
        EquivariantMode::Whitened => random_directions(z, 2 * r, cfg.equivariant_mode, &mut rng),
        EquivariantMode::Raw => frame_directions(z),
    };
    let flats = flat_normals(z, m, tol, FLAT_DRAWS, &mut rng);
    for u in init.into_iter().chain(flats) {
        pool.add(&mut lp, &evaluate(z, u, None, m, tol));
    }
    let (mut y, mut t) = lp.solve()?;
    let mut iterations = 1;
    let mut iteration_limit = false;
    let mut final_violation;
    let mut sweep: Vec<Eval>;
    loop {
        let round = oracle_round(z, &y, m, tol, cfg, &mut rng);
        let mut violated: Vec<Eval> = round
            .ranked()
            .into_iter()
            .take(cfg.cuts_per_round)
            .map(|i| round.evals[i].clone())
            .filter(|e| e.excess > cfg.slack_eps)
            .collect();
        final_violation = round.best_excess();
        sweep = round.evals;
        if violated.is_empty() {
            // Other windows of pooled directions are not in the program; check them too.
            for u in &pool.dirs {
                let e = evaluate(z, u.clone(), Some(&y), m, tol);
                final_violation = final_violation.max(e.excess);
                if e.excess > cfg.slack_eps {
                    violated.push(e);
                }
            }
            if violated.is_empty() {
                break;
            }
        }
        if iterations >= cfg.max_iterations {
            iteration_limit = true;
            break;
        }
        for e in &violated {
            pool.add(&mut lp, e);
        }
        (y, t) = lp.solve()?;
        iterations += 1;
    }

    let scale = z.rows().map(norm).fold(0.0, f64::max);
    let mut fallback = false;
    let weights = match lp::hull_weights(z, &y, 1e-7 * scale.max(f64::MIN_POSITIVE)) {
        Some(w) => w,
        None => {
            fallback = true;
            let (_, tw, w) = lp::solve_weight_form(z, &pool.cuts(z), tol)?;
            t = tw;
            w
        }
    };
    let estimate = lp::combine(x, &weights);

    let certificate: Vec<CertificateSlab> = sweep
        .iter()
        .map(|e| &e.u)
        .chain(pool.dirs.iter())
        .filter_map(|u| frame.to_original(u))
        .map(|v| certificate_slab(x, v, m))
        .collect();
    let mut report = MedianReport {
        estimate,
        certified_outlyingness: 0.0,
        iterations,
        constraints_used: pool.slabs,
        hull_weights: weights,
        diagnostics: Diagnostics {
            iteration_limit,
            crossed_interval: false,
            weight_form_fallback: fallback,
            rank: frame.rank,
            final_violation: final_violation.max(0.0),
            lp_objective: t,
        },
        certificate,
    };
    report.certified_outlyingness = report.recompute_outlyingness();
    Ok(report)
}

/// Searches for a direction along which `point` violates the slab family of
/// `x` by more than `cfg.slack_eps`.
///
/// The violation of a direction is the largest relative excess
/// `|<point, v> - mu_S| / (2 sigma_S) - 1` over admissible windows `S`.
pub fn find_violating_direction(
    x: &PointSet,
    point: &[f64],
    cfg: &MedianConfig,
) -> Result<Option<(Direction, f64)>> {
    if point.len() != x.d() {
        return Err(Error::DimensionMismatch {
            expected: x.d(),
            found: point.len(),
        });
    }
    if point.iter().any(|v| !v.is_finite()) {
        return Err(invalid("point must be finite"));
    }
    cfg.validate(x.d())?;
    let m = admissible_size(x.n(), cfg.nu_for(x.d()))?;
    let frame = Frame::new(x, cfg.equivariant_mode);
    let mean = sample_mean(x);
    let y: Vec<f64> = (0..frame.z.d())
        .map(|j| {
            let row = frame.functionals.row(j);
            point
                .iter()
                .zip(&mean)
                .zip(row.iter())
                .map(|((p, mu), a)| (p - mu) * a)
                .sum()
        })
        .collect();
    let mut rng = rng::rng(cfg.seed);
    let round = oracle_round(&frame.z, &y, m, frame.tol(), cfg, &mut rng);
    let Some(&best) = round.ranked().first() else {
        return Ok(None);
    };
    let e = &round.evals[best];
    if e.excess <= cfg.slack_eps {
        return Ok(None);
    }
    let v = frame
        .to_original(&e.u)
        .ok_or_else(|| Error::Solver("degenerate direction".into()))?;
    Ok(Some((Direction::new(v)?, e.excess)))
}

/// Min-max point of `pool` over the convex hull of `x`.
///
/// Returns the point, the optimal value of `max_j |<x, v_j> - c_j| / h_j`
/// (zero-width slabs enter as equalities) and the barycentric weights.
pub fn solve_minmax(x: &PointSet, pool: &[SlabConstraint]) -> Result<(Vec<f64>, f64, Vec<f64>)> {
    if pool.is_empty() {
        return Err(invalid("empty constraint pool"));
    }
    if let Some(s) = pool.iter().find(|s| s.direction.dim() != x.d()) {
        return Err(Error::DimensionMismatch {
            expected: x.d(),
            found: s.direction.dim(),
        });
    }
    let frame = Frame::new(x, EquivariantMode::Raw);
    let mean = sample_mean(x);
    let inv_scale = frame.functionals[(0, 0)];
    let cuts: Vec<Cut> = pool
        .iter()
        .map(|c| Cut {
            u: c.direction.as_slice().to_vec(),
            center: (c.center - dot(&mean, c.direction.as_slice())) * inv_scale,
            halfwidth: c.halfwidth * inv_scale,
        })
        .collect();
    let tol = frame.tol();
    let mut lp = PointLp::new(x.d(), tol);
    for c in &cuts {
        lp.add_cut(c);
    }
    for c in pool {
        let proj = project_raw(&frame.z, c.direction.as_slice());
        let lo = proj.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = proj.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        lp.add_support(c.direction.as_slice(), lo, hi);
    }
    // The hull's bounding box keeps every coordinate bounded.
    for j in 0..x.d() {
        let mut e = vec![0.0; x.d()];
        e[j] = 1.0;
        let col = frame.z.rows().map(|r| r[j]);
        let (lo, hi) = col.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
        lp.add_support(&e, lo, hi);
    }
    let (y, mut t) = lp.solve()?;
    let scale = frame.z.rows().map(norm).fold(0.0, f64::max);
    let weights = match lp::hull_weights(&frame.z, &y, 1e-7 * scale.max(f64::MIN_POSITIVE)) {
        Some(w) => w,
        None => {
            let (_, tw, w) = lp::solve_weight_form(&frame.z, &cuts, tol)?;
            t = tw;
            w
        }
    };
    Ok((lp::combine(x, &weights), t, weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_points() {
        let x = PointSet::new(vec![vec![2.0, -1.0, 0.5]; 7]).unwrap();
        let r = high_dim_median(&x, &MedianConfig::default()).unwrap();
        assert_eq!(r.estimate, vec![2.0, -1.0, 0.5]);
        assert_eq!(r.certified_outlyingness, 0.0);
    }

    #[test]
    fn one_dimensional_example() {
        let x = PointSet::from_scalars(&[0.0, 1.0, 2.0, 10.0]).unwrap();
        let cfg = MedianConfig {
            nu: Some(1.0 / 3.0),
            ..MedianConfig::default()
        };
        let r = high_dim_median(&x, &cfg).unwrap();
        assert_relative_eq!(r.estimate[0], 7.0 / 6.0, epsilon = 1e-14);
        let w: f64 = r.hull_weights.iter().sum();
        assert_relative_eq!(w, 1.0, epsilon = 1e-14);
        assert_relative_eq!(lp::combine(&x, &r.hull_weights)[0], 7.0 / 6.0, epsilon = 1e-14);
        assert!(r.certified_outlyingness <= 2.0);
    }

    #[test]
    fn solve_minmax_examples() {
        let x = PointSet::new(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let slab = build_slab(&x, &Direction::axis(2, 0), WindowChoice::Subset(vec![0, 1, 2])).unwrap();
        let (p, t, w) = solve_minmax(&x, &[slab]).unwrap();
        assert!(t <= 1.0 + 1e-9);
        assert!(w.iter().all(|&v| v >= 0.0));
        assert_relative_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert!(p[0] >= -1e-9 && p[1] >= -1e-9 && p[0] + p[1] <= 2.0 + 1e-9);

        let y = PointSet::from_scalars(&[0.0, 1.0, 2.0, 10.0]).unwrap();
        let v = Direction::axis(1, 0);
        let mut pool = Vec::new();
        for len in 3..=4 {
            for start in 0..=4 - len {
                pool.push(build_slab(&y, &v, WindowChoice::Sorted { start, len }).unwrap());
            }
        }
        let (p, t, _) = solve_minmax(&y, &pool).unwrap();
        assert!(p[0] >= -1e-9 && p[0] <= 7.0 / 3.0 + 1e-9);
        assert!(t <= 1.0 + 1e-9);

        let flat = PointSet::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let a = SlabConstraint {
            direction: Direction::axis(2, 0),
            center: 0.0,
            halfwidth: 0.0,
            subset: vec![0, 2],
        };
        let b = SlabConstraint {
            center: 1.0,
            subset: vec![1, 3],
            ..a.clone()
        };
        assert_eq!(solve_minmax(&flat, &[a, b]), Err(Error::InfeasibleDegenerate));
    }
}
