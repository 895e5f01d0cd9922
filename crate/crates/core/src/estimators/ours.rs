use rand::seq::SliceRandom;

use super::{EstimateResult, EstimatorConfig};
use crate::error::{invalid, Result};
use crate::geometry::PointSet;
use crate::median::{high_dim_median, MedianConfig};
use crate::rng;
use crate::trimmed::ceil_tol;

/// `clamp(ceil(max(6 eta d n, C d ln(1/delta))), 1, n)`.
pub fn choose_k(n: usize, d: usize, delta: f64, eta: f64, c: f64) -> Result<usize> {
    if n == 0 || d == 0 {
        return Err(invalid("n and d must be positive"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(invalid(format!("eta must lie in [0, 1], got {eta}")));
    }
    if !(c > 0.0) {
        return Err(invalid("bucket constant must be positive"));
    }
    let (n_f, d_f) = (n as f64, d as f64);
    let raw = (6.0 * eta * d_f * n_f).max(c * d_f * (1.0 / delta).ln());
    Ok(ceil_tol(raw).clamp(1, n))
}

/// Index buckets after a seeded shuffle: `k` buckets of `floor(n / k)` points,
/// the remainder dropped.
pub fn bucket_partition(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k == 0 || k > n {
        return Err(invalid(format!("bucket count {k} outside 1..={n}")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::rng(seed));
    let size = n / k;
    Ok(idx.chunks_exact(size).take(k).map(<[usize]>::to_vec).collect())
}

pub fn bucket_means(x: &PointSet, k: usize, seed: u64) -> Result<PointSet> {
    let buckets = bucket_partition(x.n(), k, seed)?;
    let d = x.d();
    let mut data = Vec::with_capacity(k * d);
    for b in &buckets {
        let mut mean = vec![0.0; d];
        for &i in b {
            for (m, v) in mean.iter_mut().zip(x.point(i)) {
                *m += v;
            }
        }
        let len = b.len() as f64;
        data.extend(mean.into_iter().map(|m| m / len));
    }
    PointSet::from_flat(k, d, data)
}

/// Bucket the data, then take the slab median of the bucket means.
pub fn estimate_ours(x: &PointSet, cfg: &EstimatorConfig) -> Result<EstimateResult> {
    let (n, d) = (x.n(), x.d());
    let k = choose_k(n, d, cfg.delta, cfg.eta, cfg.bucket_constant)?;
    let means = bucket_means(x, k, rng::derive(cfg.seed, 0))?;
    let median_cfg = MedianConfig {
        seed: rng::derive(cfg.seed, 1),
        ..cfg.median.clone()
    };
    let report = high_dim_median(&means, &median_cfg)?;
    Ok(EstimateResult {
        estimate: report.estimate.clone(),
        k_buckets: k,
        report: Some(report),
        undefined_flag: false,
        eta_above_regime: cfg.eta > 1.0 / (6.0 * d as f64),
        score: None,
        runtime_ms: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn choose_k_examples() {
        assert_eq!(choose_k(1000, 5, 0.05, 0.0, 5.0).unwrap(), 75);
        assert_eq!(choose_k(1000, 5, 0.05, 0.01, 5.0).unwrap(), 300);
        assert_eq!(choose_k(50, 5, 0.05, 0.0, 5.0).unwrap(), 50);
        assert_eq!(choose_k(20000, 20, 0.05, 0.0, 5.0).unwrap(), 300);
        assert!(choose_k(10, 1, 1.0, 0.0, 5.0).is_err());
    }

    #[test]
    fn bucket_examples() {
        let b = bucket_partition(10, 3, 7).unwrap();
        assert_eq!(b.len(), 3);
        assert!(b.iter().all(|x| x.len() == 3));
        let x = PointSet::from_scalars(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let all = bucket_means(&x, 1, 3).unwrap();
        assert_eq!(all.as_flat(), &[2.5]);
        let mut same = bucket_means(&x, 4, 3).unwrap().as_flat().to_vec();
        same.sort_by(f64::total_cmp);
        assert_eq!(same, vec![1.0, 2.0, 3.0, 4.0]);
        assert!(bucket_means(&x, 5, 3).is_err());
    }
}
