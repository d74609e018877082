mod common;

use common::HIST_ROUNDED;
use glidepath::quasi::{
    conditional_ruin, critical_alpha_single_period, critical_residual, two_period_difference, two_period_probability,
    verify_counterexample, zf0, zf0_derivative, zf0_second_derivative, GridSpec, VerifyMethod,
};
use glidepath::ruin::success_probability_dp;
use glidepath::scenarios::{EVENSKY, HISTORICAL};
use glidepath::{DensitySelector, DpGrid, ReturnParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WR: f64 = 0.586352;
const GP_1: [f64; 2] = [0.439547, 0.137059];
const GP_2: [f64; 2] = [0.140591, 0.999999];
const LAMBDA: f64 = 0.688882;

fn gp_c() -> [f64; 2] {
    [LAMBDA * GP_1[0] + (1.0 - LAMBDA) * GP_2[0], LAMBDA * GP_1[1] + (1.0 - LAMBDA) * GP_2[1]]
}

fn wide_grid() -> GridSpec {
    GridSpec::new(-13.1730, 13.1730, 263_460).unwrap()
}

#[test]
fn zf0_examples() {
    let m = HISTORICAL.mean(0.6);
    assert_eq!(zf0(&HISTORICAL, 0.6, m), 0.0);
    assert!((zf0(&HIST_ROUNDED, 0.45, 0.04) + 9.788).abs() < 1e-3);
    assert!((zf0(&HISTORICAL, GP_1[0], WR) + 4.545114).abs() < 2e-6);
    assert!((zf0(&HISTORICAL, GP_2[0], WR) + 5.673628).abs() < 2e-5);
    assert!((zf0(&HISTORICAL, gp_c()[0], WR) + 5.056522).abs() < 2e-5);
}

#[test]
fn zf0_derivatives_match_finite_differences() {
    let h = 1e-5;
    for p in [HISTORICAL, EVENSKY] {
        for a in [0.3, 0.5, 0.9] {
            for wr in [0.04, 0.5] {
                let fd1 = (zf0(&p, a + h, wr) - zf0(&p, a - h, wr)) / (2.0 * h);
                let fd2 = (zf0_derivative(&p, a + h, wr) - zf0_derivative(&p, a - h, wr)) / (2.0 * h);
                assert!((fd1 - zf0_derivative(&p, a, wr)).abs() < 1e-6 * fd1.abs().max(1.0));
                assert!((fd2 - zf0_second_derivative(&p, a, wr)).abs() < 1e-5 * fd2.abs().max(1.0));
            }
        }
    }
}

#[test]
fn critical_point_examples() {
    let a = critical_alpha_single_period(&HISTORICAL, 0.04).unwrap();
    assert!(critical_residual(&HISTORICAL, a, 0.04).abs() < 1e-10);
    assert!(zf0_derivative(&HISTORICAL, a, 0.04).abs() < 1e-8);

    for p in [HISTORICAL, HIST_ROUNDED, EVENSKY, ReturnParams { expense_ratio: 0.01, ..EVENSKY }] {
        let lo = p.min_variance_alpha().unwrap();
        for i in 1..200 {
            let wr = 0.01 * i as f64;
            let a = critical_alpha_single_period(&p, wr).unwrap();
            assert!(critical_residual(&p, a, wr).abs() < 1e-10);
            if a > lo && a <= 1.0 {
                assert!(zf0_second_derivative(&p, a, wr) > 0.0, "wr={wr} a={a}");
            }
        }
    }
}

#[test]
fn critical_point_moves_continuously() {
    let mut prev = critical_alpha_single_period(&HISTORICAL, 0.001).unwrap();
    for i in 2..=1000 {
        let a = critical_alpha_single_period(&HISTORICAL, 0.001 * i as f64).unwrap();
        assert!((a - prev).abs() <= 0.2, "jump at {}", 0.001 * i as f64);
        prev = a;
    }
}

#[test]
fn zf0_has_no_interior_maximum() {
    for p in [HISTORICAL, EVENSKY] {
        let lo = p.lower_bound();
        for i in 1..=100 {
            let wr = 0.02 * i as f64;
            let n = 20_000;
            let alpha = |j: usize| lo + (1.0 - lo) * j as f64 / n as f64;
            for j in 0..n {
                let (a, b) = (alpha(j), alpha(j + 1));
                let (da, db) = (zf0_derivative(&p, a, wr), zf0_derivative(&p, b, wr));
                if da.signum() != db.signum() {
                    let mid = 0.5 * (a + b);
                    assert!(zf0_second_derivative(&p, mid, wr) > 0.0, "wr={wr} near {mid}");
                    assert!(da < 0.0 && db > 0.0);
                }
            }
        }
    }
}

#[test]
fn grid_differences_match_reference_values() {
    let g = wide_grid();
    assert!((g.width() - 1e-4).abs() < 1e-12);
    let d_c2 = two_period_difference(&HISTORICAL, gp_c(), GP_2, WR, &g);
    let d_1c = two_period_difference(&HISTORICAL, GP_1, gp_c(), WR, &g);
    assert!((d_c2 + 0.042246).abs() < 2e-4, "{d_c2}");
    assert!((d_1c - 0.010014).abs() < 2e-4, "{d_1c}");
    assert_eq!(two_period_difference(&HISTORICAL, GP_1, GP_1, WR, &g), 0.0);
}

#[test]
fn grid_probabilities_reproduce_the_counterexample() {
    let r = verify_counterexample(&HISTORICAL, &GP_1, &GP_2, LAMBDA, WR, VerifyMethod::Grid(wide_grid())).unwrap();
    assert!(r.is_counterexample());
    assert!((r.p_1 - 0.158522).abs() < 2e-4, "{}", r.p_1);
    assert!((r.p_2 - 0.190762).abs() < 2e-4, "{}", r.p_2);
    assert!((r.p_c - 0.148574).abs() < 2e-4, "{}", r.p_c);
    assert_eq!(r.n, None);
    let csv = r.to_csv();
    assert!(csv.starts_with("lambda,gp_1,gp_2,gp_c,p_1,p_2,p_c,counterexample\n"));
    assert!(csv.trim_end().ends_with(",true"));
}

#[test]
fn simulated_counterexample_check() {
    let method = VerifyMethod::Mc { n: 2_000_000, seed: 11, workers: 4 };
    let r = verify_counterexample(&HISTORICAL, &GP_1, &GP_2, LAMBDA, WR, method).unwrap();
    assert!(r.is_counterexample());
    assert_eq!(r.n, Some(2_000_000));
    for (got, want) in [(r.p_1, 0.158522), (r.p_2, 0.190762), (r.p_c, 0.148574)] {
        let se = (want * (1.0 - want) / 2e6f64).sqrt();
        assert!((got - want).abs() < 4.0 * se, "{got} vs {want}");
    }
}

#[test]
fn endpoints_are_not_counterexamples() {
    for lambda in [0.0, 1.0] {
        let r = verify_counterexample(&HISTORICAL, &GP_1, &GP_2, lambda, WR, VerifyMethod::Grid(wide_grid())).unwrap();
        assert!(!r.is_counterexample());
        assert_eq!(r.gp_c, if lambda == 0.0 { GP_2.to_vec() } else { GP_1.to_vec() });
    }
    assert!(verify_counterexample(&HISTORICAL, &GP_1, &GP_2, 1.5, WR, VerifyMethod::Grid(wide_grid())).is_err());
    assert!(verify_counterexample(&HISTORICAL, &GP_1, &[0.5], 0.5, WR, VerifyMethod::Grid(wide_grid())).is_err());
}

#[test]
fn grid_validation() {
    assert!(GridSpec::new(1.0, 2.0, 10).is_err());
    assert!(GridSpec::new(-1.0, 1.0, 0).is_err());
    assert!(GridSpec::new(-1.0, 1.0, 1).is_ok());
}

#[test]
fn conditional_ruin_is_certain_below_the_first_threshold() {
    let z = zf0(&HISTORICAL, GP_1[0], WR);
    assert_eq!(conditional_ruin(&HISTORICAL, GP_1, WR, z - 1e-9), 1.0);
    assert!(conditional_ruin(&HISTORICAL, GP_1, WR, z + 6.0) < 1.0);
}

#[test]
fn grid_differences_agree_with_the_dp() {
    let grid = GridSpec::new(-10.0, 10.0, 100_000).unwrap();
    let dp = DpGrid::new(5000, 2.75).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let lo = HISTORICAL.lower_bound();
    for _ in 0..8 {
        let a = [rng.random_range(lo..1.0), rng.random_range(lo..1.0)];
        let b = [rng.random_range(lo..1.0), rng.random_range(lo..1.0)];
        let wr = (rng.random_range(0.2..0.7f64) * 5000.0).round() / 5000.0;
        let pa = success_probability_dp(&HISTORICAL, &a, wr, &dp, &DensitySelector::STANDARD).unwrap();
        let pb = success_probability_dp(&HISTORICAL, &b, wr, &dp, &DensitySelector::STANDARD).unwrap();
        let d = two_period_difference(&HISTORICAL, a, b, wr, &grid);
        assert!((d - (pa - pb)).abs() < 2e-4, "{a:?} {b:?} wr={wr}: {d} vs {}", pa - pb);
        let p = two_period_probability(&HISTORICAL, a, wr, &grid);
        assert!((p - pa).abs() < 2e-4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn grid_difference_is_antisymmetric(
        a1 in 0.14f64..1.0, a2 in 0.14f64..1.0, b1 in 0.14f64..1.0, b2 in 0.14f64..1.0, wr in 0.05f64..0.8
    ) {
        let g = GridSpec::new(-9.0, 9.0, 5000).unwrap();
        let d = two_period_difference(&HISTORICAL, [a1, a2], [b1, b2], wr, &g);
        let e = two_period_difference(&HISTORICAL, [b1, b2], [a1, a2], wr, &g);
        prop_assert!((d + e).abs() <= 1e-15);
    }
}
