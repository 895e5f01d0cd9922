//! Heuristic search for a direction along which a point leaves the slab family.
//!
//! Candidates are random directions, point-to-data directions and (in raw
//! mode) coordinate axes and covariance eigenvectors. The most violated
//! candidates are polished by normalized ascent on the sphere.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{EquivariantMode, MedianConfig};
use crate::geometry::{dot, norm, project_raw, sample_cov, PointSet};
use crate::trimmed::{SortedSample, Window, WindowScan};

/// A candidate direction evaluated at a point.
#[derive(Debug, Clone)]
pub(crate) struct Eval {
    pub u: Vec<f64>,
    pub excess: f64,
    pub scan: WindowScan,
    pub min: f64,
    pub max: f64,
}

pub(crate) fn normalized(mut u: Vec<f64>) -> Option<Vec<f64>> {
    let s = norm(&u);
    if !(s > 0.0) || !s.is_finite() {
        return None;
    }
    u.iter_mut().for_each(|v| *v /= s);
    Some(u)
}

pub(crate) fn evaluate(z: &PointSet, u: Vec<f64>, y: Option<&[f64]>, m: usize, tol: f64) -> Eval {
    let proj = project_raw(z, &u);
    let sorted = SortedSample::new(&proj);
    let p = y.map(|y| dot(y, &u));
    let scan = sorted.scan(m, p, tol);
    Eval {
        excess: scan.worst.map_or(f64::NEG_INFINITY, |(e, _)| e),
        scan,
        min: sorted.min(),
        max: sorted.max(),
        u,
    }
}

/// Directions whose law is invariant under rotations of the working frame.
///
/// In whitened coordinates `sum_i g_i z_i` with standard normal `g` is an
/// isotropic Gaussian, so its normalization is uniform on the sphere.
pub(crate) fn random_directions(
    z: &PointSet,
    count: usize,
    mode: EquivariantMode,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    let r = z.d();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let u = match mode {
            EquivariantMode::Whitened => {
                let mut u = vec![0.0; r];
                for p in z.rows() {
                    let g: f64 = rng.sample(StandardNormal);
                    for (a, b) in u.iter_mut().zip(p) {
                        *a += g * b;
                    }
                }
                u
            }
            EquivariantMode::Raw => (0..r).map(|_| rng.sample(StandardNormal)).collect(),
        };
        if let Some(u) = normalized(u) {
            out.push(u);
        }
    }
    out
}

/// Coordinate axes and covariance eigenvectors of the working points.
pub(crate) fn frame_directions(z: &PointSet) -> Vec<Vec<f64>> {
    let r = z.d();
    let mut out: Vec<Vec<f64>> = (0..r)
        .map(|i| {
            let mut e = vec![0.0; r];
            e[i] = 1.0;
            e
        })
        .collect();
    let eig = SymmetricEigen::new(sample_cov(z).matrix().clone());
    for j in 0..r {
        if let Some(u) = normalized(eig.eigenvectors.column(j).iter().copied().collect()) {
            out.push(u);
        }
    }
    out
}

/// Normals of hyperplanes holding at least `m` points within `tol`, found by
/// fitting hyperplanes through `draws` random `r`-subsets. Along such a normal
/// an admissible window has zero width, which random directions never hit.
pub(crate) fn flat_normals(z: &PointSet, m: usize, tol: f64, draws: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let (n, r) = (z.n(), z.d());
    let mut out: Vec<Vec<f64>> = Vec::new();
    if r < 2 || n < r {
        return out;
    }
    for _ in 0..draws {
        let pick = index::sample(rng, n, r).into_vec();
        let base = z.point(pick[0]);
        let mut gram = DMatrix::<f64>::zeros(r, r);
        for &i in &pick[1..] {
            let diff = DVector::from_iterator(r, z.point(i).iter().zip(base).map(|(a, b)| a - b));
            gram += &diff * diff.transpose();
        }
        let eig = SymmetricEigen::new(gram);
        let mut order: Vec<usize> = (0..r).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        if !(eig.eigenvalues[order[1]] > 1e-10 * eig.eigenvalues[order[r - 1]]) {
            continue;
        }
        let Some(u) = normalized(eig.eigenvectors.column(order[0]).iter().copied().collect()) else {
            continue;
        };
        if out.iter().any(|v| dot(v, &u).abs() > 1.0 - 1e-9) {
            continue;
        }
        let c = dot(base, &u);
        let on = z.rows().filter(|p| (dot(p, &u) - c).abs() <= tol).count();
        if on >= m {
            out.push(u);
        }
    }
    out
}

/// Directions from the current point towards a seeded subsample of data points.
fn data_directions(z: &PointSet, y: &[f64], count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = z.n();
    let picks = index::sample(rng, n, count.min(n));
    picks
        .iter()
        .filter_map(|i| normalized(y.iter().zip(z.point(i)).map(|(a, b)| a - b).collect()))
        .collect()
}

/// Gradient of the excess of `y` over window `w` with respect to `u`,
/// projected on the tangent space of the sphere.
fn excess_gradient(z: &PointSet, y: &[f64], u: &[f64], members: &[usize], tol: f64) -> Option<Vec<f64>> {
    let r = z.d();
    let k = members.len() as f64;
    let mut zbar = vec![0.0; r];
    for &i in members {
        for (a, b) in zbar.iter_mut().zip(z.point(i)) {
            *a += b / k;
        }
    }
    let mut dsigma = vec![0.0; r];
    let mut sigma = 0.0;
    for &i in members {
        let p = z.point(i);
        let s: f64 = p.iter().zip(u).zip(&zbar).map(|((a, b), c)| (a - c) * b).sum();
        sigma += s.abs() / k;
        let sign = if s == 0.0 { 0.0 } else { s.signum() };
        for ((g, a), c) in dsigma.iter_mut().zip(p).zip(&zbar) {
            *g += sign * (a - c) / k;
        }
    }
    let hw = 2.0 * sigma;
    if hw <= tol {
        return None;
    }
    let diff: Vec<f64> = y.iter().zip(&zbar).map(|(a, b)| a - b).collect();
    let a = dot(&diff, u);
    let sa = a.signum();
    let mut g: Vec<f64> = diff
        .iter()
        .zip(&dsigma)
        .map(|(dv, ds)| (sa * dv * hw - a.abs() * 2.0 * ds) / (hw * hw))
        .collect();
    let gu = dot(&g, u);
    g.iter_mut().zip(u).for_each(|(gi, ui)| *gi -= gu * ui);
    normalized(g)
}

fn worst_members(z: &PointSet, u: &[f64], w: &Window) -> Vec<usize> {
    SortedSample::new(&project_raw(z, u)).window_indices(w.start, w.len)
}

/// Normalized ascent on the sphere, step 0.2 halved on every failed step.
fn refine(z: &PointSet, y: &[f64], start: Eval, m: usize, tol: f64, steps: usize) -> Eval {
    let mut best = start;
    let mut step = 0.2;
    for _ in 0..steps {
        let Some((_, w)) = best.scan.worst else { break };
        let members = worst_members(z, &best.u, &w);
        let Some(g) = excess_gradient(z, y, &best.u, &members, tol) else {
            break;
        };
        let Some(cand) = normalized(best.u.iter().zip(&g).map(|(a, b)| a + step * b).collect()) else {
            break;
        };
        let e = evaluate(z, cand, Some(y), m, tol);
        if e.excess > best.excess {
            best = e;
        } else {
            step *= 0.5;
        }
    }
    best
}

/// One oracle round at `y`: every candidate evaluated, the best few refined.
pub(crate) struct Round {
    pub evals: Vec<Eval>,
}

impl Round {
    /// Indices of evaluations sorted by decreasing excess, ties by index.
    pub fn ranked(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.evals.len()).collect();
        idx.sort_by(|&a, &b| {
            self.evals[b]
                .excess
                .total_cmp(&self.evals[a].excess)
                .then(a.cmp(&b))
        });
        idx
    }

    pub fn best_excess(&self) -> f64 {
        self.evals
            .iter()
            .map(|e| e.excess)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub(crate) fn oracle_round(
    z: &PointSet,
    y: &[f64],
    m: usize,
    tol: f64,
    cfg: &MedianConfig,
    rng: &mut ChaCha8Rng,
) -> Round {
    let mut dirs = random_directions(z, cfg.directions_random, cfg.equivariant_mode, rng);
    if cfg.directions_data {
        dirs.extend(data_directions(z, y, cfg.data_subsample, rng));
        if cfg.equivariant_mode == EquivariantMode::Raw {
            dirs.extend(frame_directions(z));
        }
    }
    let evals: Vec<Eval> = dirs
        .into_par_iter()
        .map(|u| evaluate(z, u, Some(y), m, tol))
        .collect();
    let mut round = Round { evals };
    let top: Vec<usize> = round
        .ranked()
        .into_iter()
        .take(cfg.refine_candidates)
        .collect();
    let refined: Vec<Eval> = top
        .par_iter()
        .map(|&i| refine(z, y, round.evals[i].clone(), m, tol, cfg.refine_steps))
        .collect();
    for (i, e) in top.into_iter().zip(refined) {
        round.evals[i] = e;
    }
    round
}
