use std::io::Write;

use glidepath::horizon::{
    gradient_random, hessian_random, load_lifetable, neumaier_sum, success_probability_random, MortalityDistribution,
};
use glidepath::ruin::success_probability_dp;
use glidepath::scenarios::{EVENSKY, HISTORICAL};
use glidepath::{DensitySelector, DpGrid, Error, Estimator, FixedHorizon, Method, Optimizer, OptimizerConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const PREC: u32 = 1000;

fn grid() -> DpGrid {
    DpGrid::new(PREC, 2.75).unwrap()
}

fn cfg() -> OptimizerConfig {
    OptimizerConfig::new(Method::Newton, Estimator::Dp(grid()), 1e-6)
}

fn fixed(gp: &[f64], wr: f64) -> f64 {
    success_probability_dp(&HISTORICAL, gp, wr, &grid(), &DensitySelector::STANDARD).unwrap()
}

fn mortality_3() -> MortalityDistribution {
    MortalityDistribution::new(vec![0.05, 0.2, 0.45, 0.3]).unwrap()
}

#[test]
fn point_mass_equals_fixed_horizon() {
    let gp = [0.7, 0.55, 0.4];
    let wr = 0.3;
    let pm = MortalityDistribution::point_mass(3).unwrap();
    let p = success_probability_random(&HISTORICAL, &gp, wr, &pm, &cfg()).unwrap();
    assert_eq!(p, fixed(&gp, wr));

    let obj = FixedHorizon::new(HISTORICAL, wr, 3).unwrap();
    let mut opt = Optimizer::new(&obj, cfg()).unwrap();
    let pf = opt.probability(&gp).unwrap();
    let gf = opt.build_gradient(&gp, pf).unwrap();
    let hf = opt.build_hessian(&gp, pf, &gf).unwrap();
    let (_, gr) = gradient_random(&HISTORICAL, &gp, wr, &pm, &cfg()).unwrap();
    let hr = hessian_random(&HISTORICAL, &gp, wr, &pm, &cfg()).unwrap();
    assert_eq!(gr.elements, gf.elements);
    assert_eq!(hr.entries, hf.entries);
}

#[test]
fn death_before_first_withdrawal_is_success() {
    let m = MortalityDistribution::new(vec![1.0, 0.0, 0.0]).unwrap();
    assert_eq!(success_probability_random(&HISTORICAL, &[0.5, 0.5], 5.0, &m, &cfg()).unwrap(), 1.0);
    assert_eq!(m.last_positive(), 0);
}

#[test]
fn uniform_two_period_horizon() {
    let (gp, wr) = ([0.8, 0.35], 0.55);
    let m = MortalityDistribution::new(vec![0.0, 0.5, 0.5]).unwrap();
    let p = success_probability_random(&HISTORICAL, &gp, wr, &m, &cfg()).unwrap();
    let want = 0.5 * (fixed(&gp[..1], wr) + fixed(&gp, wr));
    assert!((p - want).abs() < 1e-15);

    // Draw the horizon, then the returns.
    let n = 2_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let normals: Vec<Normal<f64>> =
        gp.iter().map(|&a| Normal::new(HISTORICAL.mean(a), HISTORICAL.variance(a).sqrt()).unwrap()).collect();
    let mut wins = 0u64;
    for _ in 0..n {
        let horizon = if rng.random_bool(0.5) { 1 } else { 2 };
        let mut rf = wr;
        let mut alive = true;
        for dist in &normals[..horizon] {
            let r = dist.sample(&mut rng);
            if r <= rf {
                alive = false;
                break;
            }
            rf /= r - rf;
        }
        wins += alive as u64;
    }
    let est = wins as f64 / n as f64;
    let se = (est * (1.0 - est) / n as f64).sqrt();
    assert!((est - p).abs() < 4.0 * se + 1e-3, "{est} vs {p}");
}

#[test]
fn result_is_a_mixture_of_fixed_horizons() {
    let gp = [0.9, 0.6, 0.4];
    let wr = 0.25;
    let m = mortality_3();
    let p = success_probability_random(&HISTORICAL, &gp, wr, &m, &cfg()).unwrap();
    let per: Vec<f64> = (1..=3).map(|k| fixed(&gp[..k], wr)).collect();
    let naive = m.probabilities()[0] + (1..=3).map(|k| m.probabilities()[k] * per[k - 1]).sum::<f64>();
    assert!((p - naive).abs() < 1e-12);
    let lo = per.iter().copied().fold(1.0, f64::min);
    assert!(p >= lo && p <= 1.0);
}

fn fd_check(m: &MortalityDistribution, gp: &[f64], wr: f64) {
    let h = 1e-4;
    let f = |x: &[f64]| success_probability_random(&HISTORICAL, x, wr, m, &cfg()).unwrap();
    let (p, g) = gradient_random(&HISTORICAL, gp, wr, m, &cfg()).unwrap();
    let hess = hessian_random(&HISTORICAL, gp, wr, m, &cfg()).unwrap();
    let n = gp.len();
    for i in 0..n {
        let mut up = gp.to_vec();
        let mut dn = gp.to_vec();
        up[i] += h;
        dn[i] -= h;
        let fd = (f(&up) - f(&dn)) / (2.0 * h);
        assert!((g.elements[i] - fd).abs() < 1e-4, "g[{i}]: {} vs {fd}", g.elements[i]);
        for j in 0..n {
            let shift = |di: f64, dj: f64| {
                let mut x = gp.to_vec();
                x[i] += di;
                x[j] += dj;
                f(&x)
            };
            let fd = if i == j {
                (shift(h, 0.0) - 2.0 * p + shift(-h, 0.0)) / (h * h)
            } else {
                (shift(h, h) - shift(h, -h) - shift(-h, h) + shift(-h, -h)) / (4.0 * h * h)
            };
            assert!((hess.entries[(i, j)] - fd).abs() < 1e-4, "H[{i},{j}]: {} vs {fd}", hess.entries[(i, j)]);
        }
    }
}

#[test]
fn derivatives_match_finite_differences() {
    fd_check(&mortality_3(), &[0.75, 0.5, 0.45], 0.3);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let w: Vec<f64> = (0..6).map(|_| rng.random_range(0.0..1.0)).collect();
    let m = MortalityDistribution::renormalized(w).unwrap();
    let gp: Vec<f64> = (0..5).map(|_| rng.random_range(0.35..0.9)).collect();
    fd_check(&m, &gp, 0.18);
}

#[test]
fn coordinates_beyond_the_last_horizon_have_zero_derivatives() {
    let m = MortalityDistribution::new(vec![0.1, 0.3, 0.6, 0.0, 0.0]).unwrap();
    assert_eq!(m.last_positive(), 2);
    let gp = [0.7, 0.5, 0.6, 0.8];
    let (_, g) = gradient_random(&HISTORICAL, &gp, 0.4, &m, &cfg()).unwrap();
    assert!(g.elements[0] != 0.0 && g.elements[1] != 0.0);
    assert_eq!(&g.elements[2..], &[0.0, 0.0]);
    let hess = hessian_random(&HISTORICAL, &gp, 0.4, &m, &cfg()).unwrap();
    for i in 0..4 {
        for j in 2..4 {
            assert_eq!(hess.entries[(i, j)], 0.0);
            assert_eq!(hess.entries[(j, i)], 0.0);
        }
    }
}

#[test]
fn glidepath_length_must_match() {
    let err = success_probability_random(&HISTORICAL, &[0.5, 0.5], 0.3, &mortality_3(), &cfg()).unwrap_err();
    assert!(matches!(err, Error::InvalidParams(_)), "{err}");
}

#[test]
fn lifetable_parsing() {
    let m = MortalityDistribution::parse("0.0\n1.0", false).unwrap();
    assert_eq!(m, MortalityDistribution::point_mass(1).unwrap());
    assert!(MortalityDistribution::parse("0.5\n-0.1\n0.6", false).is_err());
    assert!(MortalityDistribution::parse("0.5\nabc\n0.5", false).is_err());
    assert!(MortalityDistribution::parse("0.5\n0.6", false).is_err());
    assert!(MortalityDistribution::parse("1.0", false).is_err());
    let r = MortalityDistribution::parse("1\n3\n\n4\n", true).unwrap();
    assert_eq!(r.probabilities(), &[0.125, 0.375, 0.5]);
    let err = MortalityDistribution::parse("0.5\n0.6", false).unwrap_err();
    assert!(err.to_string().contains("renormalize"));
}

#[test]
fn forty_eight_entry_table_from_file() {
    let weights: Vec<f64> =
        (0..48).map(|t| if t == 0 { 0.0 } else { (-(t as f64 - 25.0).powi(2) / 120.0).exp() }).collect();
    let total: f64 = weights.iter().sum();
    let mut file = tempfile_path("lifetable48.txt");
    {
        let mut f = std::fs::File::create(&file).unwrap();
        for w in &weights {
            writeln!(f, "{:.17}", w / total).unwrap();
        }
    }
    let m = load_lifetable(&file, false).unwrap();
    assert_eq!(m.s_max(), 47);
    assert_eq!(m.probabilities().len(), 48);
    assert!((neumaier_sum(m.probabilities().iter().copied()) - 1.0).abs() < 1e-12);
    file.set_extension("missing");
    assert!(load_lifetable(&file, false).is_err());

    let gp = vec![0.6; 47];
    let p = success_probability_random(&EVENSKY, &gp, 0.04, &m, &cfg()).unwrap();
    assert!(p > 0.0 && p < 1.0);
    assert!(success_probability_random(&EVENSKY, &vec![0.6; 48], 0.04, &m, &cfg()).is_err());
}

#[test]
fn compensated_sum_is_order_insensitive() {
    let mut v: Vec<f64> = (1..2000).map(|i| 1.0 / (i as f64 * i as f64)).collect();
    v.push(1e8);
    let a = neumaier_sum(v.iter().copied());
    v.reverse();
    let b = neumaier_sum(v.iter().copied());
    assert!((a - b).abs() <= 1e-12 * a.abs());
}

fn tempfile_path(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("glidepath-rh-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}
