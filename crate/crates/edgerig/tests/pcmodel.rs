use std::f64::consts::PI;

use edgerig::pcmodel::*;
use edgerig::specfun::EULER_GAMMA;
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn params() -> Vec<PCParams> {
    vec![
        PCParams::real(0.3).unwrap(),
        PCParams::real(0.5).unwrap(),
        PCParams::real(0.9).unwrap(),
        PCParams::imaginary(0.5).unwrap(),
        PCParams::imaginary(1.5).unwrap(),
    ]
}

fn max_entry(m: &Matrix2C) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

#[test]
fn parameter_consistency() {
    for p in params() {
        assert!(p.consistency() < 1e-14);
    }
    for nu in [0.05, 0.2, 0.5, 1.0, 2.0, -0.05, -0.2, -0.5, -1.0, -2.0] {
        let p = PCParams::from_nu(nu).unwrap();
        assert_eq!(p.nu(), nu);
        // q carries the rounding of sqrt(1 - e^{-2 pi nu}), amplified by 1/|1 - q^2| for q near 1
        let cond = 1.0 / (1.0 - p.q() * p.q()).norm();
        assert!(p.consistency() < 1e-14 * cond.max(1.0), "nu={nu}: {}", p.consistency());
        assert_eq!(nu > 0.0, p.q().im == 0.0);
    }
    assert!(PCParams::real(1.0).is_err());
    assert!(PCParams::real(-0.1).is_err());
    assert!(PCParams::imaginary(-1.0).is_err());
    assert_eq!(PCParams::real(0.0).unwrap().nu(), 0.0);
}

#[test]
fn beta_product_is_nu_on_both_branches() {
    for nu in [0.05, 0.2, 0.5, 1.0, 2.0] {
        for signed in [nu, -nu] {
            let (b12, b21) = beta_coefficients(&PCParams::from_nu(signed).unwrap()).unwrap();
            assert!((b12 * b21 - signed).norm() < 1e-10, "nu={signed}");
        }
    }
}

#[test]
fn beta_conjugation_structure() {
    // Gamma(-i nu) = conj Gamma(i nu): beta21 = conj(beta12) for real q, -conj(beta12) for imaginary q
    let (b12, b21) = beta_coefficients(&PCParams::real(0.6).unwrap()).unwrap();
    assert!((b21 - b12.conj()).norm() < 1e-14);
    let (b12, b21) = beta_coefficients(&PCParams::imaginary(0.8).unwrap()).unwrap();
    assert!((b21 + b12.conj()).norm() < 1e-14);
}

#[test]
fn beta_small_nu_series() {
    // 1/Gamma(z) = z + g z^2 + (g^2/2 - pi^2/12) z^3 + O(z^4)
    let g = EULER_GAMMA;
    for nu in [1e-3, 1e-4] {
        let p = PCParams::from_nu(nu).unwrap();
        let z = C::new(0.0, nu);
        let rg = z + g * z * z + (g * g / 2.0 - PI * PI / 12.0) * z * z * z;
        let want = C::from_polar(1.0, -0.75 * PI) * (-0.5 * PI * nu).exp() * (2.0 * PI).sqrt() * rg / p.q();
        let (b12, _) = beta_coefficients(&p).unwrap();
        assert!((b12 - want).norm() < 1e-9 * want.norm(), "{b12} vs {want}");
        // leading behaviour e^{-i pi/4} sqrt(nu)
        assert!((b12 / nu.sqrt() - C::from_polar(1.0, -0.25 * PI)).norm() < 10.0 * nu);
    }
    assert!(beta_coefficients(&PCParams::real(0.0).unwrap()).is_err());
}

#[test]
fn psi_jump_across_the_real_axis() {
    for p in params() {
        let q = p.q();
        let want = Matrix2C::new(C::new(1.0, 0.0), -q, q, 1.0 - q * q);
        let got = psi_jump_at_origin(&p).unwrap();
        assert!(max_entry(&(got - want)) < 1e-12, "{got} vs {want}");
        // the same constant jump at other real points
        for x in [-2.0, 1.5] {
            let z = C::new(x, 0.0);
            let up = psi_matrix_branch(z, &p, true).unwrap();
            let down = psi_matrix_branch(z, &p, false).unwrap();
            assert!(max_entry(&(up - down * want)) < 1e-11 * max_entry(&up).max(1.0));
        }
    }
}

#[test]
fn psi_solves_first_order_system() {
    for p in params() {
        for z in [C::new(0.7, 1.3), C::new(-2.0, 0.4), C::new(1.0, -2.5), C::new(-0.3, -0.2)] {
            let (psi, d) = psi_matrix_with_derivative(z, &p).unwrap();
            let rhs = psi_ode_rhs(z, &psi, &p).unwrap();
            assert!(max_entry(&(d - rhs)) < 1e-8, "z={z}");
        }
    }
}

#[test]
fn psi_determinant_is_constant() {
    for p in params() {
        for sign in [1.0, -1.0] {
            for k in 0..12 {
                let t = k as f64 / 11.0;
                let z = C::new(-3.0 + 6.0 * t, sign * (0.1 + 2.0 * t * (1.0 - t)));
                let det = psi_matrix(z, &p).unwrap().determinant();
                assert!((det - 1.0).norm() < 1e-9, "z={z}: {det}");
            }
        }
    }
}

#[test]
fn all_five_jumps_hold() {
    for p in params() {
        for ray in Ray::ALL {
            for r in [1.0, 3.0] {
                let res = jump_residual(ray, r, &p).unwrap();
                assert!(res < 1e-10, "{ray:?} r={r} nu={}: {res}", p.nu());
            }
        }
        // no jump on the positive real axis
        let above = phi_pc(C::new(2.0, 1e-9), &p).unwrap();
        let below = phi_pc(C::new(2.0, -1e-9), &p).unwrap();
        assert!(max_entry(&(above - below)) < 1e-7);
    }
}

#[test]
fn trivial_solution_at_q_zero() {
    let p = PCParams::real(0.0).unwrap();
    for z in [C::new(1.0, 2.0), C::new(-2.0, 0.5), C::new(0.3, -1.0), C::new(-1.0, -3.0)] {
        let phi = phi_pc(z, &p).unwrap();
        let e = (C::i() * z * z * 0.25).exp();
        let want = Matrix2C::new(e, C::new(0.0, 0.0), C::new(0.0, 0.0), 1.0 / e);
        assert!(max_entry(&(phi - want)) < 1e-12 * max_entry(&want), "{z}");
    }
    assert!(asymptotic_coefficient_check(&p, 20.0).unwrap() < 1e-9);
}

#[test]
fn first_coefficient_residual_halves() {
    let p = PCParams::real(0.5).unwrap();
    let a = asymptotic_coefficient_check(&p, 20.0).unwrap();
    let b = asymptotic_coefficient_check(&p, 40.0).unwrap();
    assert!(a < 0.2);
    let ratio = b / a;
    assert!((0.4..=0.6).contains(&ratio), "{ratio}");
    let p = PCParams::imaginary(1.0).unwrap();
    let ratio = asymptotic_coefficient_check(&p, 40.0).unwrap() / asymptotic_coefficient_check(&p, 20.0).unwrap();
    assert!((0.4..=0.6).contains(&ratio), "{ratio}");
}

#[test]
fn second_coefficient_matches() {
    for p in [PCParams::real(0.5).unwrap(), PCParams::imaginary(1.0).unwrap()] {
        let a = second_coefficient_check(&p, 20.0).unwrap();
        let b = second_coefficient_check(&p, 40.0).unwrap();
        assert!(b < 1e-3, "{b}");
        assert!(b / a < 0.3, "{a} {b}");
    }
}

#[test]
fn contour_points_rejected() {
    let p = PCParams::real(0.5).unwrap();
    assert!(psi_matrix(C::new(1.0, 0.0), &p).is_err());
    assert!(phi_pc(C::new(-1.0, 0.0), &p).is_err());
    assert!(phi_pc(Ray::NorthWest.point(2.0), &p).is_err());
    assert!(phi_pc(C::new(0.0, 0.0), &p).is_err());
    assert!(phi_pc(C::new(3.0, 0.0), &p).is_ok());
    assert!(asymptotic_coefficient_check(&p, 5.0).is_err());
}

#[test]
fn full_report() {
    let r = verify(&PCParams::from_nu(0.5).unwrap(), &[1.0, 3.0], &[20.0, 40.0]).unwrap();
    assert!(r.beta_product_residual < 1e-10);
    assert!(r.jump_residuals.iter().all(|(_, v)| *v < 1e-10));
    assert!(r.origin_jump_residual < 1e-12);
    assert!((0.4..=0.6).contains(&r.halving_ratio));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn beta_product_property(nu in -1.0f64..3.0) {
        prop_assume!(nu.abs() > 1e-6);
        let (b12, b21) = beta_coefficients(&PCParams::from_nu(nu).unwrap()).unwrap();
        prop_assert!((b12 * b21 - nu).norm() < 1e-10 * nu.abs().max(1.0));
    }

    #[test]
    fn jumps_at_random_points(q in 0.0f64..0.95, imaginary in any::<bool>(), r in 0.2f64..4.0, ray in 0usize..5) {
        let p = if imaginary { PCParams::imaginary(1.5 * q).unwrap() } else { PCParams::real(q).unwrap() };
        prop_assert!(jump_residual(Ray::ALL[ray], r, &p).unwrap() < 1e-9);
    }
}
