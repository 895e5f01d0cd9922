use affmed_bench::metrics::{certified_lower_bound, directional_certificate, mahalanobis_error, sweep_directions};
use affmed_core::geometry::mahalanobis_norm;
use affmed_core::instances::Moments;
use affmed_core::{rng, SpdMatrix};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

fn random_pd(d: usize, g: &mut impl Rng) -> SpdMatrix {
    let a = DMatrix::from_fn(d, d, |_, _| g.sample::<f64, _>(StandardNormal));
    SpdMatrix::new(&a * a.transpose() + DMatrix::identity(d, d) * 0.05).unwrap()
}

#[test]
fn certificate_never_exceeds_the_mahalanobis_error() {
    let mut g = rng::rng(17);
    for trial in 0..50 {
        let d = 2 + trial % 7;
        let cov = random_pd(d, &mut g);
        let mean: Vec<f64> = (0..d).map(|_| g.random_range(-3.0..3.0)).collect();
        let est: Vec<f64> = (0..d).map(|_| g.random_range(-3.0..3.0)).collect();
        let exact = mahalanobis_norm(&est.iter().zip(&mean).map(|(a, b)| a - b).collect::<Vec<_>>(), &cov).unwrap();

        let dirs = sweep_directions(d, 1000);
        let swept = directional_certificate(&est, &mean, &cov, &dirs).unwrap();
        assert!(!swept.all_null);
        assert!(swept.value <= exact + 1e-10, "{} > {exact}", swept.value);

        // The optimal direction Sigma^{-1} (estimate - mean) attains it.
        let diff = DVector::from_iterator(d, est.iter().zip(&mean).map(|(a, b)| a - b));
        let opt = cov.matrix().clone().try_inverse().unwrap() * diff;
        let mut with_opt = dirs.clone();
        with_opt.push(opt.as_slice().to_vec());
        let attained = directional_certificate(&est, &mean, &cov, &with_opt).unwrap();
        assert!((attained.value - exact).abs() <= 1e-9 * exact.max(1.0));

        let moments = Moments {
            mean: mean.clone(),
            cov: cov.clone(),
            nonsingular: true,
        };
        let bound = certified_lower_bound(&est, &moments).unwrap().value;
        assert!((bound - mahalanobis_error(&est, &moments).unwrap()).abs() <= 1e-9 * exact.max(1.0));
    }
}

#[test]
fn null_directions_are_skipped() {
    let cov = SpdMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 0.0]))).unwrap();
    let cert = directional_certificate(&[1.0, 5.0], &[0.0, 0.0], &cov, &[vec![0.0, 1.0]]).unwrap();
    assert!(cert.all_null);
    assert_eq!(cert.value, 0.0);
    let cert = directional_certificate(&[1.0, 5.0], &[0.0, 0.0], &cov, &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    assert!(!cert.all_null);
    assert!((cert.value - 0.5).abs() <= 1e-15);
}
