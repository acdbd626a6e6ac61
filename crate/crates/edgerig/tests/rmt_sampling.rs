use std::f64::consts::PI;

use edgerig::asymptotics::moment_asymptotics;
use edgerig::fredholm::{Discretization, QuadratureRule};
use edgerig::kernels::{KernelEvaluator, ProcessSpec};
use edgerig::rmt_sampling::*;
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::Rng;

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

fn counts(samples: &[Vec<f64>], s: f64) -> Vec<f64> {
    samples.iter().map(|p| p.iter().filter(|x| **x <= s).count() as f64).collect()
}

fn gap_probability(spec: &ProcessSpec, s: f64) -> f64 {
    let k = KernelEvaluator::new(spec).unwrap();
    let r = QuadratureRule::gauss_legendre(60, 0.0, s).unwrap();
    Discretization::new(&k, r).unwrap().log_det(1e-300).unwrap().exp()
}

#[test]
fn same_seed_same_points() {
    let a = sample_gue_edge(300, 10, 42, 3).unwrap();
    let b = sample_gue_edge(300, 10, 42, 3).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.points, sample_gue_edge(300, 10, 42, 4).unwrap().points);
    assert_ne!(a.points, sample_gue_edge(300, 10, 43, 3).unwrap().points);
    let l = sample_lue_hard_edge(200, 1.0, 10, 7, 0).unwrap();
    assert_eq!(l, sample_lue_hard_edge(200, 1.0, 10, 7, 0).unwrap());
    let g = sample_ginibre_product_hard_edge(60, 2, 5, 7, 1).unwrap();
    assert_eq!(g, sample_ginibre_product_hard_edge(60, 2, 5, 7, 1).unwrap());
}

#[test]
fn samples_sorted_and_hard_edge_positive() {
    let g = sample_gue_edge(400, 50, 1, 0).unwrap();
    assert_eq!(g.len(), 50);
    assert!(g.points.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(g.provenance.target, ProcessSpec::Airy);
    for p in [
        sample_lue_hard_edge(300, 0.0, 40, 2, 0).unwrap(),
        sample_lue_hard_edge(300, 2.5, 40, 2, 1).unwrap(),
        sample_ginibre_product_hard_edge(80, 3, 20, 2, 0).unwrap(),
    ] {
        assert!(p.points[0] > 0.0);
        assert!(p.points.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn invalid_sampler_inputs() {
    assert!(sample_gue_edge(99, 5, 0, 0).is_err());
    assert!(sample_gue_edge(400, 101, 0, 0).is_err());
    assert!(sample_lue_hard_edge(50, 0.0, 5, 0, 0).is_err());
    assert!(sample_lue_hard_edge(200, -1.0, 5, 0, 0).is_err());
    assert!(sample_ginibre_product_hard_edge(40, 2, 5, 0, 0).is_err());
    assert!(sample_ginibre_product_hard_edge(60, 4, 5, 0, 0).is_err());
    assert!(tridiagonal_extreme_eigenvalues(&[1.0, 2.0], &[], 1, true).is_err());
}

#[test]
fn bisection_matches_dense_eigensolver() {
    let mut rng = replica_rng(11, 0);
    let n = 60;
    let diag: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
    let off: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-2.0..2.0)).collect();
    let m = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => diag[i],
        1 => off[i.min(j)],
        _ => 0.0,
    });
    let mut dense: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    dense.sort_by(f64::total_cmp);
    let low = tridiagonal_extreme_eigenvalues(&diag, &off, 5, false).unwrap();
    let high = tridiagonal_extreme_eigenvalues(&diag, &off, 5, true).unwrap();
    for i in 0..5 {
        assert!((low[i] - dense[i]).abs() < 1e-12, "{} vs {}", low[i], dense[i]);
        assert!((high[i] - dense[n - 5 + i]).abs() < 1e-12);
    }
    for x in [-2.0, 0.0, 0.7, 2.5] {
        let brute = dense.iter().filter(|l| **l < x).count();
        assert_eq!(tridiagonal_count_below(&diag, &off, x), brute);
    }
}

fn semicircle_cdf(u: f64) -> f64 {
    let u = u.clamp(-1.0, 1.0);
    0.5 + (u * (1.0 - u * u).sqrt() + u.asin()) / PI
}

fn marchenko_pastur_cdf(x: f64) -> f64 {
    let phi = (x.clamp(0.0, 4.0) / 4.0).sqrt().asin();
    2.0 / PI * (phi + phi.sin() * phi.cos())
}

// Kolmogorov-Smirnov distance on a fine grid, from Sturm counts
fn ks_distance(diag: &[f64], off: &[f64], lo: f64, hi: f64, cdf: impl Fn(f64) -> f64) -> f64 {
    let n = diag.len() as f64;
    (0..=800)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / 800.0;
            (tridiagonal_count_below(diag, off, x) as f64 / n - cdf(x)).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn bulk_spectra_follow_semicircle_and_marchenko_pastur() {
    let n = 2000;
    let root = (n as f64).sqrt();
    let mut worst: f64 = 0.0;
    for rep in 0..50 {
        let mut rng = replica_rng(5, rep);
        let (d, o) = gue_tridiagonal(n, &mut rng);
        worst = worst.max(ks_distance(&d, &o, -2.2 * root, 2.2 * root, |x| semicircle_cdf(x / (2.0 * root))));
        let (d, o) = lue_tridiagonal(n, 0.0, &mut rng);
        worst = worst.max(ks_distance(&d, &o, 0.0, 4.4 * n as f64, |x| marchenko_pastur_cdf(x / n as f64)));
    }
    assert!(worst < 0.05, "KS distance {worst}");
}

#[test]
fn lue_smallest_point_matches_gap_determinant() {
    // for alpha = 0 the law is exact at every n: P(4 n lambda_min > s) = exp(-s/4)
    let spec = ProcessSpec::bessel(0.0).unwrap();
    let reps = 2000;
    let first: Vec<f64> = (0..reps).map(|r| sample_lue_hard_edge(100, 0.0, 1, 9, r).unwrap().points[0]).collect();
    for s in [1.0, 4.0] {
        let det = gap_probability(&spec, s);
        assert!((det - (-s / 4.0f64).exp()).abs() < 1e-12, "{det}");
        let p = first.iter().filter(|x| **x > s).count() as f64 / reps as f64;
        let se = (det * (1.0 - det) / reps as f64).sqrt();
        assert!((p - det).abs() < 3.0 * se, "s={s}: {p} vs {det}");
    }
}

#[test]
fn lue_mean_count_matches_bessel_mean() {
    let alpha = 0.0;
    let mu = moment_asymptotics(&ProcessSpec::bessel(alpha).unwrap());
    let samples: Vec<Vec<f64>> = (0..200).map(|r| sample_lue_hard_edge(1000, alpha, 30, 21, r).unwrap().points).collect();
    for s in [25.0, 100.0] {
        let (m, se) = mean_se(&counts(&samples, s));
        assert!((m - mu.mu(s)).abs() < 3.0 * se, "s={s}: {m} +- {se} vs {}", mu.mu(s));
    }
}

#[test]
fn gue_mean_count_matches_airy_mean() {
    let mu = moment_asymptotics(&ProcessSpec::Airy);
    let samples: Vec<Vec<f64>> = (0..200).map(|r| sample_gue_edge(2000, 30, 17, r).unwrap().points).collect();
    for s in [2.0, 4.0, 6.0] {
        let (m, se) = mean_se(&counts(&samples, s));
        assert!((m - mu.mu(s)).abs() < 3.0 * se, "s={s}: {m} +- {se} vs {}", mu.mu(s));
    }
}

#[test]
fn single_ginibre_is_quarter_scaled_lue() {
    let g = sample_ginibre_product_hard_edge(60, 1, 3, 0, 0).unwrap();
    let l = sample_lue_hard_edge(100, 0.0, 3, 0, 0).unwrap();
    assert_eq!(g.provenance.scale / g.provenance.matrix_size as f64, 0.25 * l.provenance.scale / l.provenance.matrix_size as f64);
    // the r = 1 target kernel is the Bessel kernel seen at 4x, so both gap laws agree
    let target = ginibre_product_target(1).unwrap();
    let bessel = ProcessSpec::bessel(0.0).unwrap();
    assert!((gap_probability(&target, 0.5) - gap_probability(&bessel, 2.0)).abs() < 1e-10);
    let reps = 1500;
    let p = (0..reps)
        .filter(|r| sample_ginibre_product_hard_edge(50, 1, 1, 4, *r).unwrap().points[0] > 0.5)
        .count() as f64
        / reps as f64;
    let want = (-0.5f64).exp();
    assert!((p - want).abs() < 3.0 * (want * (1.0 - want) / reps as f64).sqrt(), "{p} vs {want}");
}

#[test]
fn calibrated_product_scale_reproduces_meijer_mean() {
    let (n, r) = (200, 2);
    let target = ginibre_product_target(r).unwrap();
    let mu = moment_asymptotics(&target);
    let c = calibrate_product_scale(n, r, 30.0, 200, 1).unwrap();
    assert!(c > 0.75 && c < 1.25, "calibration factor {c}");
    let samples: Vec<Vec<f64>> = (0..200)
        .map(|rep| {
            let p = sample_ginibre_product_calibrated(n, r, 40, 2, rep, c).unwrap();
            assert_eq!(p.provenance.scale, c * n as f64);
            p.points
        })
        .collect();
    for s in [10.0, 50.0] {
        let (m, se) = mean_se(&counts(&samples, s));
        assert!((m - mu.mu(s)).abs() < 3.0 * se, "s={s}: {m} +- {se} vs {}", mu.mu(s));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn count_below_is_monotone(seed in 0u64..1000, a in -30.0f64..30.0, b in -30.0f64..30.0) {
        let mut rng = replica_rng(seed, 0);
        let (d, o) = gue_tridiagonal(150, &mut rng);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(tridiagonal_count_below(&d, &o, lo) <= tridiagonal_count_below(&d, &o, hi));
    }

    #[test]
    fn lue_extremes_are_spectrum_ends(seed in 0u64..1000, alpha in 0.0f64..3.0) {
        let mut rng = replica_rng(seed, 1);
        let (d, o) = lue_tridiagonal(120, alpha, &mut rng);
        let low = tridiagonal_extreme_eigenvalues(&d, &o, 3, false).unwrap();
        prop_assert!(low[0] > 0.0);
        prop_assert_eq!(tridiagonal_count_below(&d, &o, low[0] * (1.0 - 1e-9)), 0);
        prop_assert_eq!(tridiagonal_count_below(&d, &o, low[2] * (1.0 + 1e-9)), 3);
    }
}
