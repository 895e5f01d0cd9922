use affmed_core::geometry::{mahalanobis_norm, sample_cov, AffineMap};
use affmed_core::instances::{sample, DistributionSpec};
use affmed_core::median::{
    build_slab, find_violating_direction, helly_feasibility_certificate, high_dim_median, MedianConfig, WindowChoice,
};
use affmed_core::trimmed::admissible_size;
use affmed_core::{rng, Direction, PointSet};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

/// Gaussian, atom-valued or rank-deficient data.
fn instance(kind: u8, n: usize, d: usize, seed: u64) -> PointSet {
    match kind % 3 {
        0 => sample(&DistributionSpec::gaussian(d).unwrap(), n, seed).unwrap(),
        1 => sample(&DistributionSpec::intuition_gamma(d, 0.0).unwrap(), n, seed).unwrap(),
        _ => {
            let k = (d / 2).max(1);
            let z = sample(&DistributionSpec::gaussian(k).unwrap(), n, seed).unwrap();
            let rows: Vec<Vec<f64>> = z
                .rows()
                .map(|p| {
                    let mut v = p.to_vec();
                    v.resize(d, 0.0);
                    v
                })
                .collect();
            PointSet::new(rows).unwrap()
        }
    }
}

fn random_map(d: usize, seed: u64) -> AffineMap {
    let mut g = rng::rng(seed);
    let q = DMatrix::from_fn(d, d, |_, _| g.sample::<f64, _>(StandardNormal)).qr().q();
    let s = DMatrix::from_diagonal(&DVector::from_fn(d, |_, _| g.random_range(0.5..2.0)));
    let b = DVector::from_fn(d, |_, _| g.random_range(-10.0..10.0));
    AffineMap::new(q * s, b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn median_is_certified_and_in_the_hull(kind in 0u8..3, n in 1usize..120, d in 1usize..6, seed in any::<u64>()) {
        let x = instance(kind, n, d, seed);
        let rep = high_dim_median(&x, &MedianConfig { seed, ..MedianConfig::default() }).unwrap();
        prop_assert!(rep.certified_outlyingness <= 2.1, "outlyingness {}", rep.certified_outlyingness);
        prop_assert!((rep.recompute_outlyingness() - rep.certified_outlyingness).abs() <= 1e-12);
        prop_assert!(!rep.diagnostics.iteration_limit);

        let w = &rep.hull_weights;
        prop_assert_eq!(w.len(), n);
        prop_assert!(w.iter().all(|&v| v >= 0.0));
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        let scale = x.scale().max(1.0);
        for j in 0..d {
            let combo: f64 = x.rows().zip(w).map(|(p, wi)| wi * p[j]).sum();
            prop_assert!((combo - rep.estimate[j]).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn whitened_median_commutes_with_affine_maps(n in 20usize..120, d in 2usize..5, seed in any::<u64>()) {
        let x = instance(0, n, d, seed);
        let map = random_map(d, seed ^ 0x9e37);
        let fx = x.map(&map).unwrap();
        let cfg = MedianConfig { seed, ..MedianConfig::default() };
        let m = high_dim_median(&x, &cfg).unwrap().estimate;
        let fm = high_dim_median(&fx, &cfg).unwrap().estimate;
        let mapped = map.apply(&m).unwrap();
        let diff: Vec<f64> = fm.iter().zip(&mapped).map(|(a, b)| a - b).collect();
        let gap = mahalanobis_norm(&diff, &sample_cov(&fx)).unwrap();
        prop_assert!(gap <= 1e-6, "gap {gap}");
    }

    #[test]
    fn helly_mean_fits_every_slab(n in 4usize..150, d in 1usize..5, seed in any::<u64>()) {
        let x = instance(0, n, d, seed);
        let nu = 1.0 / (2.0 * (d as f64 + 1.0));
        let m = admissible_size(n, nu).unwrap();
        let mut g = rng::rng(seed);
        let slabs: Vec<_> = (0..=d)
            .map(|_| {
                let v: Vec<f64> = (0..d).map(|_| g.sample(StandardNormal)).collect();
                let len = g.random_range(m..=n);
                let start = g.random_range(0..=n - len);
                build_slab(&x, &Direction::new(v).unwrap(), WindowChoice::Sorted { start, len }).unwrap()
            })
            .collect();
        let cert = helly_feasibility_certificate(&x, &slabs, nu).unwrap();
        prop_assert!(cert.intersection_size >= 1);
        prop_assert!(cert.max_ratio <= 1.0 + 1e-9, "ratio {}", cert.max_ratio);
    }
}

#[test]
fn far_point_has_a_violating_direction() {
    let x = instance(0, 200, 3, 11);
    let cfg = MedianConfig::default();
    let (v, excess) = find_violating_direction(&x, &[50.0, 0.0, 0.0], &cfg).unwrap().unwrap();
    assert!(excess > 1.0);
    // The offending direction points roughly along the displacement.
    assert!(v.as_slice()[0].abs() > 0.5);
}

#[test]
fn median_of_a_symmetric_line_has_no_violation() {
    let y: Vec<f64> = (-10..=10).map(f64::from).collect();
    let x = PointSet::from_scalars(&y).unwrap();
    assert!(find_violating_direction(&x, &[0.0], &MedianConfig::default()).unwrap().is_none());
    assert!(find_violating_direction(&x, &[9.0], &MedianConfig::default()).unwrap().is_some());
}

#[test]
fn violating_direction_rejects_bad_points() {
    let x = instance(0, 20, 2, 3);
    let cfg = MedianConfig::default();
    assert!(find_violating_direction(&x, &[0.0], &cfg).is_err());
    assert!(find_violating_direction(&x, &[f64::NAN, 0.0], &cfg).is_err());
}

#[test]
fn translation_moves_the_median() {
    let x = instance(1, 90, 4, 5);
    let shift = [3.0, -2.0, 0.5, 7.0];
    let moved = PointSet::new(
        x.rows()
            .map(|p| p.iter().zip(&shift).map(|(a, b)| a + b).collect())
            .collect(),
    )
    .unwrap();
    let cfg = MedianConfig::default();
    let a = high_dim_median(&x, &cfg).unwrap().estimate;
    let b = high_dim_median(&moved, &cfg).unwrap().estimate;
    for j in 0..4 {
        assert!((b[j] - a[j] - shift[j]).abs() <= 1e-8, "coordinate {j}: {} vs {}", b[j], a[j] + shift[j]);
    }
}
