use affmed_core::trimmed::{
    admissible_size, brute_force_interval, directional_feasible_interval, min_sigma_subset, outlyingness_1d,
};
use proptest::prelude::*;

fn nu_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0 / 3.0), Just(1.0 / 6.0), Just(0.1), 0.02f64..0.45]
}

/// Small integer grid values make ties and duplicate windows common.
fn sample_strategy(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop_oneof![
        prop::collection::vec(-1e3f64..1e3, 1..=max),
        prop::collection::vec((-4i32..=4).prop_map(f64::from), 1..=max),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn window_scan_matches_brute_force(y in sample_strategy(12), nu in nu_strategy()) {
        let fast = directional_feasible_interval(&y, nu).unwrap().interval;
        let brute = brute_force_interval(&y, nu).unwrap();
        let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!((fast.lo - brute.lo).abs() <= 1e-10 * scale, "lo {} vs {}", fast.lo, brute.lo);
        prop_assert!((fast.hi - brute.hi).abs() <= 1e-10 * scale, "hi {} vs {}", fast.hi, brute.hi);
    }

    #[test]
    fn feasible_interval_lies_in_the_data_range(y in sample_strategy(200), nu in nu_strategy()) {
        let iv = directional_feasible_interval(&y, nu).unwrap().interval;
        let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(!iv.is_empty());
        prop_assert!(iv.lo >= lo && iv.hi <= hi);
    }

    #[test]
    fn feasible_interval_is_shift_and_scale_equivariant(
        y in sample_strategy(60),
        nu in nu_strategy(),
        a in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0],
        b in -1e3f64..1e3,
    ) {
        let iv = directional_feasible_interval(&y, nu).unwrap().interval;
        let mapped: Vec<f64> = y.iter().map(|v| a * v + b).collect();
        let jv = directional_feasible_interval(&mapped, nu).unwrap().interval;
        let (lo, hi) = if a > 0.0 { (a * iv.lo + b, a * iv.hi + b) } else { (a * iv.hi + b, a * iv.lo + b) };
        let scale = mapped.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!((jv.lo - lo).abs() <= 1e-9 * scale);
        prop_assert!((jv.hi - hi).abs() <= 1e-9 * scale);
    }

    #[test]
    fn min_sigma_subset_has_admissible_size(y in sample_strategy(80), nu in nu_strategy()) {
        let m = admissible_size(y.len(), nu).unwrap();
        let s = min_sigma_subset(&y, m).unwrap();
        prop_assert!(s.size() >= m && s.size() <= y.len());
        prop_assert!(s.sigma1 >= 0.0);
    }

    #[test]
    fn interval_midpoint_has_outlyingness_at_most_two(
        y in sample_strategy(80),
        nu in nu_strategy(),
    ) {
        let iv = directional_feasible_interval(&y, nu).unwrap().interval;
        let t = outlyingness_1d(iv.midpoint(), &y, nu).unwrap();
        prop_assert!(t <= 2.0 + 1e-9, "outlyingness {t}");
    }
}
