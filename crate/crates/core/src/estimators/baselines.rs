use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{BaselineConfig, EstimateResult, EstimatorConfig};
use crate::geometry::{dot, norm, project_raw, sample_mean, PointSet};
use crate::rng;

pub fn estimate_empirical_mean(x: &PointSet) -> EstimateResult {
    EstimateResult::plain(sample_mean(x), x.n())
}

/// Lower median: the element of rank `floor((n - 1) / 2)`.
pub fn lower_median(values: &mut [f64]) -> f64 {
    let mid = (values.len() - 1) / 2;
    *values.select_nth_unstable_by(mid, f64::total_cmp).1
}

pub fn estimate_coord_median(x: &PointSet) -> EstimateResult {
    EstimateResult::plain(coord_median(x), x.n())
}

fn coord_median(x: &PointSet) -> Vec<f64> {
    (0..x.d())
        .map(|j| {
            let mut col: Vec<f64> = x.rows().map(|p| p[j]).collect();
            lower_median(&mut col)
        })
        .collect()
}

/// `(1/n) min(#{y_i >= y}, #{y_i <= y})`.
pub fn tukey_depth_1d(y: f64, sample: &[f64]) -> f64 {
    let ge = sample.iter().filter(|&&v| v >= y).count();
    let le = sample.iter().filter(|&&v| v <= y).count();
    ge.min(le) as f64 / sample.len() as f64
}

fn depth_sorted(y: f64, sorted: &[f64]) -> f64 {
    let n = sorted.len();
    let ge = n - sorted.partition_point(|&v| v < y);
    let le = sorted.partition_point(|&v| v <= y);
    ge.min(le) as f64 / n as f64
}

/// Distinct points in order of first occurrence.
fn distinct_points(x: &PointSet) -> Vec<usize> {
    let mut seen: HashMap<Vec<u64>, ()> = HashMap::new();
    let mut out = Vec::new();
    for (i, p) in x.rows().enumerate() {
        let key: Vec<u64> = p.iter().map(|v| (v + 0.0).to_bits()).collect();
        if seen.insert(key, ()).is_none() {
            out.push(i);
        }
    }
    out
}

fn unit(v: Vec<f64>) -> Option<Vec<f64>> {
    let s = norm(&v);
    (s > 0.0 && s.is_finite()).then(|| v.into_iter().map(|a| a / s).collect())
}

/// Unit normal of the hyperplane through the given points, when unique.
fn hyperplane_normal(x: &PointSet, pts: &[usize]) -> Option<Vec<f64>> {
    let d = x.d();
    let base = x.point(pts[0]);
    let mut gram = DMatrix::<f64>::zeros(d, d);
    for &i in &pts[1..] {
        let diff: Vec<f64> = x.point(i).iter().zip(base).map(|(a, b)| a - b).collect();
        for a in 0..d {
            for b in 0..d {
                gram[(a, b)] += diff[a] * diff[b];
            }
        }
    }
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let top = eig.eigenvalues[order[d - 1]];
    if d < 2 || !(eig.eigenvalues[order[1]] > 1e-10 * top) {
        return None;
    }
    unit(eig.eigenvectors.column(order[0]).iter().copied().collect())
}

/// Random, axis, point-to-mean and hyperplane-normal directions in the
/// original coordinates.
pub fn baseline_directions(x: &PointSet, cfg: &BaselineConfig, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let (n, d) = (x.n(), x.d());
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for _ in 0..cfg.directions_random {
        if let Some(u) = unit((0..d).map(|_| rng.sample(StandardNormal)).collect()) {
            dirs.push(u);
        }
    }
    for j in 0..d {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        dirs.push(e);
    }
    let mean = sample_mean(x);
    for i in index::sample(rng, n, cfg.data_subsample.min(n)) {
        if let Some(u) = unit(x.point(i).iter().zip(&mean).map(|(a, b)| a - b).collect()) {
            dirs.push(u);
        }
    }
    let distinct = distinct_points(x);
    if d >= 2 && distinct.len() >= d {
        for _ in 0..cfg.hyperplane_draws {
            let pick: Vec<usize> = index::sample(rng, distinct.len(), d)
                .iter()
                .map(|i| distinct[i])
                .collect();
            if let Some(u) = hyperplane_normal(x, &pick) {
                dirs.push(u);
            }
        }
    }
    dirs
}

/// Distinct data points (capped), midpoints of random pairs, the coordinate median.
fn candidates(x: &PointSet, cfg: &BaselineConfig, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let distinct = distinct_points(x);
    let mut picked: Vec<usize> = if distinct.len() > cfg.max_point_candidates {
        let mut s: Vec<usize> = index::sample(rng, distinct.len(), cfg.max_point_candidates).into_vec();
        s.sort_unstable();
        s.into_iter().map(|i| distinct[i]).collect()
    } else {
        distinct.clone()
    };
    picked.dedup();
    let mut out: Vec<Vec<f64>> = picked.iter().map(|&i| x.point(i).to_vec()).collect();
    if distinct.len() >= 2 {
        for _ in 0..cfg.midpoint_candidates {
            let pair = index::sample(rng, distinct.len(), 2);
            let (a, b) = (x.point(distinct[pair.index(0)]), x.point(distinct[pair.index(1)]));
            out.push(a.iter().zip(b).map(|(p, q)| 0.5 * (p + q)).collect());
        }
    }
    out.push(coord_median(x));
    out
}

struct Projected {
    u: Vec<f64>,
    sorted: Vec<f64>,
}

fn projected(x: &PointSet, dirs: Vec<Vec<f64>>) -> Vec<Projected> {
    dirs.into_par_iter()
        .map(|u| {
            let mut sorted = project_raw(x, &u);
            sorted.sort_by(f64::total_cmp);
            Projected { u, sorted }
        })
        .collect()
}

/// Index of the best score, ties to the first.
fn argbest(scores: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if better(s, scores[best]) {
            best = i;
        }
    }
    best
}

/// Candidate with the largest depth minimized over sampled directions.
pub fn estimate_tukey(x: &PointSet, cfg: &EstimatorConfig) -> EstimateResult {
    let mut rng = rng::rng(rng::derive(cfg.seed, 2));
    let dirs = projected(x, baseline_directions(x, &cfg.baseline, &mut rng));
    let cands = candidates(x, &cfg.baseline, &mut rng);
    let depths: Vec<f64> = cands
        .par_iter()
        .map(|c| {
            dirs.iter()
                .map(|p| depth_sorted(dot(c, &p.u), &p.sorted))
                .fold(1.0, f64::min)
        })
        .collect();
    let best = argbest(&depths, |a, b| a > b);
    let mut out = EstimateResult::plain(cands[best].clone(), x.n());
    out.score = Some(depths[best]);
    out
}

/// Candidate with the smallest Stahel-Donoho outlyingness maximized over
/// sampled directions; undefined when every candidate is infinitely outlying.
pub fn estimate_stahel_donoho(x: &PointSet, cfg: &EstimatorConfig) -> EstimateResult {
    let mut rng = rng::rng(rng::derive(cfg.seed, 2));
    let dirs = projected(x, baseline_directions(x, &cfg.baseline, &mut rng));
    let cands = candidates(x, &cfg.baseline, &mut rng);
    // (direction, median, mad, zero tolerance)
    let scales: Vec<(&[f64], f64, f64, f64)> = dirs
        .iter()
        .map(|p| {
            let n = p.sorted.len();
            let med = p.sorted[(n - 1) / 2];
            let mut dev: Vec<f64> = p.sorted.iter().map(|v| (v - med).abs()).collect();
            let mad = lower_median(&mut dev);
            let mag = p.sorted[0].abs().max(p.sorted[n - 1].abs());
            (p.u.as_slice(), med, mad, 1e-9 * mag)
        })
        .collect();
    let outlying: Vec<f64> = cands
        .par_iter()
        .map(|c| {
            scales
                .iter()
                .map(|&(u, med, mad, tol)| {
                    let dev = (dot(c, u) - med).abs();
                    if mad > tol {
                        dev / mad
                    } else if dev <= tol {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let best = argbest(&outlying, |a, b| a < b);
    if outlying[best].is_infinite() {
        let mut out = EstimateResult::plain(vec![f64::NAN; x.d()], x.n());
        out.undefined_flag = true;
        out.score = Some(f64::INFINITY);
        return out;
    }
    let mut out = EstimateResult::plain(cands[best].clone(), x.n());
    out.score = Some(outlying[best]);
    out
}
