use std::f64::consts::PI;

use edgerig::asymptotics::moment_asymptotics;
use edgerig::kernels::ProcessSpec;
use edgerig::rigidity::*;
use edgerig::rmt_sampling::*;
use proptest::prelude::*;

fn synthetic(points: Vec<f64>, target: ProcessSpec) -> PointSample {
    PointSample {
        points,
        provenance: Provenance {
            ensemble: "synthetic".into(),
            matrix_size: 10_000,
            parameter: None,
            scale: 1.0,
            shift: 0.0,
            scale_source: "none".into(),
            seed: 0,
            replica: 0,
            target,
        },
    }
}

fn bessel() -> ProcessSpec {
    ProcessSpec::bessel(0.0).unwrap()
}

#[test]
fn counting_function_edges_and_ties() {
    let s = synthetic(vec![1.0, 2.0, 2.5, 7.0], bessel());
    assert_eq!(counting_function(&s, 0.5), 0);
    assert_eq!(counting_function(&s, 2.0), 2);
    assert_eq!(counting_function(&s, 2.4999), 2);
    assert_eq!(counting_function(&s, 7.0), 4);
    assert_eq!(counting_function(&s, 1e9), 4);
}

#[test]
fn exact_quantiles_have_zero_deviation() {
    for spec in [bessel(), ProcessSpec::Airy, ProcessSpec::wright(2.0, 0.5).unwrap(), ProcessSpec::meijer(vec![0.0, 0.0], vec![]).unwrap()] {
        let m = moment_asymptotics(&spec);
        let s = synthetic((1..=40).map(|k| m.mu_inverse(k as f64)).collect(), spec.clone());
        let r = sup_point_deviation(&s, &spec, 2, 40, 0.05).unwrap();
        assert!(r.sup_statistic < 1e-11, "{spec:?}: {}", r.sup_statistic);
        assert!(!r.violated);
        assert_eq!(r.per_k.len(), 39);
        assert!((r.bound - 2.0 * PI * 1.05f64.sqrt()).abs() < 1e-14);
    }
}

#[test]
fn small_k0_rejected() {
    let s = synthetic(vec![1.0, 2.0, 3.0], bessel());
    assert!(sup_point_deviation(&s, &bessel(), 1, 3, 0.1).is_err());
    assert!(sup_point_deviation(&s, &bessel(), 2, 4, 0.1).is_err());
    assert!(sup_point_deviation(&s, &bessel(), 2, 3, 0.0).is_err());
}

#[test]
fn bessel_normalization_identity() {
    let m = moment_asymptotics(&bessel());
    let eps = 0.1;
    for k in [2u32, 3, 10, 57, 400, 10_000] {
        let k = k as f64;
        let v = m.sigma2(m.mu_inverse(k));
        assert!((v - (PI * PI * k * k).ln() / (4.0 * PI * PI)).abs() < 1e-13);
        // the bound on the sigma2-normalized deviation is sqrt(1+eps)/pi per unit of log(pi k)
        let allowed = rigidity_bound(eps) * v;
        assert!((allowed - (1.0 + eps).sqrt() / PI * (PI * k).ln()).abs() < 1e-12);
    }
}

#[test]
fn counting_deviation_at_quantiles_is_one_jump() {
    let spec = bessel();
    let m = moment_asymptotics(&spec);
    let s = synthetic((1..=30).map(|k| m.mu_inverse(k as f64)).collect(), spec.clone());
    let start = m.mu_inverse(3.0);
    let sup = sup_counting_deviation(&s, &spec, start);
    assert!(sup <= 1.0 / m.sigma2(start) + 1e-12);
    assert!(sup > 0.0);
}

fn brute_counting_sup(s: &PointSample, spec: &ProcessSpec, start: f64) -> f64 {
    let m = moment_asymptotics(spec);
    let count = |x: f64| s.points.iter().filter(|p| **p <= x).count() as f64;
    let mut xs = vec![start];
    for &p in &s.points {
        if p > start {
            xs.push(p);
            xs.push(p * (1.0 - 1e-13));
        }
    }
    xs.iter().map(|&x| (count(x) - m.mu(x)).abs() / m.sigma2(x)).fold(0.0, f64::max)
}

#[test]
fn sampled_statistics_match_brute_force_and_imply_point_bound() {
    let spec = bessel();
    let m = moment_asymptotics(&spec);
    for rep in 0..5 {
        let s = sample_lue_hard_edge(400, 0.0, 20, 3, rep).unwrap();
        let start = s.points[4];
        let fast = sup_counting_deviation(&s, &spec, start);
        let slow = brute_counting_sup(&s, &spec, start);
        assert!((fast - slow).abs() < 1e-9 * slow.max(1.0), "{fast} vs {slow}");
        // at x_k the counting statistic controls |mu(x_k) - k| up to the change of normalizer
        let report = sup_point_deviation(&s, &spec, 5, 20, 0.05).unwrap();
        let widen = (5..=20).map(|k| m.sigma2(s.points[k - 1]) / m.sigma2(m.mu_inverse(k as f64))).fold(0.0, f64::max);
        assert!(report.sup_statistic <= fast * widen * (1.0 + 1e-12));
    }
}

#[test]
fn wilson_half_widths() {
    // reference values from a statistics library
    assert!((wilson_half_width(30, 100) - 0.088_449_846_692_069_55).abs() < 1e-12);
    assert!((wilson_half_width(0, 100) - 0.018_496_749_103_492_846).abs() < 1e-12);
    assert!((wilson_half_width(7, 200) - 0.026_707_534_756_861_77).abs() < 1e-12);
}

#[test]
fn wide_envelopes_are_never_violated() {
    let cfg = McConfig { sampler: SamplerConfig::Lue { n: 300, alpha: 0.0 }, k_max: 17, reps: 60, seed: 8, jobs: 3 };
    let t = tail_probability_mc(&bessel(), &cfg, 10.0, 2).unwrap();
    assert_eq!(t.violations, 0);
    assert!(t.half_width > 0.0 && t.half_width < 0.05);
    assert!(tail_probability_mc(&bessel(), &McConfig { reps: 49, ..cfg }, 10.0, 2).is_err());
}

#[test]
fn violation_fraction_non_increasing_in_k0_and_jobs_invariant() {
    let cfg = McConfig { sampler: SamplerConfig::Lue { n: 400, alpha: 0.0 }, k_max: 20, reps: 80, seed: 12, jobs: 4 };
    let f: Vec<f64> = [3, 5, 10, 20].iter().map(|&k0| tail_probability_mc(&bessel(), &cfg, 0.05, k0).unwrap().fraction).collect();
    assert!(f.windows(2).all(|w| w[0] >= w[1]), "{f:?}");
    let serial = tail_probability_mc(&bessel(), &McConfig { jobs: 1, ..cfg.clone() }, 0.05, 5).unwrap();
    assert_eq!(serial.fraction, f[1]);
}

#[test]
fn some_points_fall_between_the_band_edges() {
    // normalized deviations (mu(x_k) - k) / log k land in (1/pi, 1/pi + eps) for some sample
    let spec = bessel();
    let m = moment_asymptotics(&spec);
    let eps = 0.05;
    let mut in_band = 0;
    for rep in 0..200 {
        let s = sample_lue_hard_edge(400, 0.0, 20, 30, rep).unwrap();
        for k in 2..=20 {
            let d = (m.mu(s.points[k - 1]) - k as f64).abs() / (k as f64).ln();
            if d > 1.0 / PI && d < 1.0 / PI + eps {
                in_band += 1;
            }
        }
    }
    assert!(in_band > 0);
}

#[test]
fn gue_normalized_deviations_concentrate_inside_the_bands() {
    let spec = ProcessSpec::Airy;
    let m = moment_asymptotics(&spec);
    let (mut inside, mut beyond, mut total) = (0, 0, 0);
    for rep in 0..20 {
        let s = sample_gue_edge(2000, 44, 4, rep).unwrap();
        for k in 5..=44 {
            let d = (m.mu(s.points[k - 1]) - k as f64).abs() / (k as f64).ln();
            total += 1;
            if d < 1.0 / PI + 0.05 {
                inside += 1;
            } else {
                beyond += 1;
            }
        }
    }
    assert!(inside as f64 > 0.8 * total as f64, "{inside} of {total}");
    assert!(beyond > 0);
}

#[test]
fn default_truncation_stays_in_edge_regime() {
    let s = sample_lue_hard_edge(400, 0.0, 100, 1, 0).unwrap();
    assert_eq!(default_k_max(&s), 20);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counting_matches_linear_scan(mut pts in prop::collection::vec(0.0f64..100.0, 1..40), x in -5.0f64..110.0) {
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let s = synthetic(pts.clone(), bessel());
        prop_assert_eq!(counting_function(&s, x), pts.iter().filter(|p| **p <= x).count());
        let at = pts[pts.len() / 2];
        prop_assert_eq!(counting_function(&s, at), pts.len() / 2 + 1);
    }

    #[test]
    fn envelope_check_agrees_with_sup_statistic(seed in 0u64..10_000, eps in 0.01f64..0.3) {
        let spec = bessel();
        let s = sample_lue_hard_edge(200, 0.0, 14, seed, 0).unwrap();
        let violated = envelope_violated(&s, &spec, 2, 14, eps).unwrap();
        let stat = envelope_statistic(&s, &spec, 2, 14, eps).unwrap();
        prop_assume!((stat - 1.0).abs() > 1e-9);
        prop_assert_eq!(violated, stat > 1.0);
    }
}
