use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{domain, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;

// Godfrey's coefficients, g = 607/128.
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

// B_{2k} / (2k (2k-1)), k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Principal branch of log Gamma(z), cut along (-inf, 0].
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return domain("log_gamma of a non-finite argument");
    }
    if z.im == 0.0 && z.re <= 0.0 {
        return domain(format!("log_gamma at {} lies on the branch cut", z.re));
    }
    Ok(lgamma(z))
}

/// Unchecked principal log Gamma; callers guarantee `z` is off the cut.
pub(crate) fn lgamma(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        if z.re > 0.0 {
            return Complex64::new(log_gamma_pos(z.re), 0.0);
        }
        // On the cut only exp(lgamma) matters: phase i pi where Gamma < 0,
        // real part +inf at the poles.
        let s = (PI * z.re).sin();
        if s == 0.0 || z.re == z.re.round() {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        let re = LN_PI - s.abs().ln() - log_gamma_pos(1.0 - z.re);
        return Complex64::new(re, if s < 0.0 { PI } else { 0.0 });
    }
    if z.im < 0.0 {
        return lgamma(z.conj()).conj();
    }
    if z.re >= 0.5 {
        return lgamma_right(z);
    }
    // Reflection in the upper half plane. log sin(pi z) is taken on the branch
    // that is real on (0, 1) and analytic for Im z > 0.
    let frac = z.re - z.re.round();
    let b = 2.0 * PI * frac;
    let a = -2.0 * PI * z.im;
    let ea = a.exp();
    let h = (0.5 * b).sin();
    let one_minus = Complex64::new(-(a.exp_m1() * b.cos() - 2.0 * h * h), -ea * b.sin());
    let i = Complex64::i();
    let log_sin = Complex64::new(-LN_2, 0.5 * PI) - i * PI * z + one_minus.ln();
    Complex64::new(LN_PI, 0.0) - log_sin - lgamma_right(Complex64::new(1.0, 0.0) - z)
}

fn lgamma_right(z: Complex64) -> Complex64 {
    if z.norm_sqr() >= 225.0 {
        return stirling(z);
    }
    let w = z - 1.0;
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += *c / (w + k as f64);
    }
    let t = w + LANCZOS_G + 0.5;
    (w + 0.5) * t.ln() - t + LN_SQRT_2PI + acc.ln()
}

fn stirling(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut tail = Complex64::new(0.0, 0.0);
    for c in STIRLING.iter().rev() {
        tail = tail * inv2 + *c;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + tail * inv
}

pub(crate) fn log_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // Gamma(x) = Gamma(x + 1) / x keeps us on the positive axis.
        if x > 0.0 {
            return log_gamma_pos(x + 1.0) - x.ln();
        }
        // Real part of the continuation onto the cut: log|Gamma(x)|.
        return LN_PI - (PI * x).sin().abs().ln() - log_gamma_pos(1.0 - x);
    }
    if x >= 15.0 {
        return stirling(Complex64::new(x, 0.0)).re;
    }
    let w = x - 1.0;
    let mut acc = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (w + k as f64);
    }
    let t = w + LANCZOS_G + 0.5;
    (w + 0.5) * t.ln() - t + LN_SQRT_2PI + acc.ln()
}

/// log Gamma(x) for real x > 0.
pub fn log_gamma_real(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("log_gamma_real needs x > 0, got {x}"));
    }
    Ok(log_gamma_pos(x))
}

/// Gamma(x) for real x, including negative non-integers.
pub fn gamma_real(x: f64) -> f64 {
    if x > 0.0 {
        if x > 171.7 {
            return f64::INFINITY;
        }
        return log_gamma_pos(x).exp();
    }
    if x == x.floor() {
        return f64::NAN;
    }
    PI / ((PI * x).sin() * gamma_real(1.0 - x))
}

/// 1/Gamma(x) for real x; zero at the poles.
pub(crate) fn rgamma_real(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x > 0.0 {
        return (-log_gamma_pos(x)).exp();
    }
    (PI * x).sin() * gamma_real(1.0 - x) / PI
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn classical_values() {
        assert!(lgamma(c(1.0, 0.0)).norm() < 1e-15);
        assert!(lgamma(c(2.0, 0.0)).norm() < 1e-15);
        let half = lgamma(c(0.5, 0.0)).re;
        assert!((half - 0.5 * PI.ln()).abs() < 1e-15);
        assert!((gamma_real(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma_real(-0.5) + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn cut_is_rejected() {
        assert!(log_gamma(c(-2.5, 0.0)).is_err());
        assert!(log_gamma(c(0.0, 0.0)).is_err());
        assert!(log_gamma(c(-2.5, 1e-300)).is_ok());
    }

    #[test]
    fn recurrence_across_branches() {
        for &(x, y) in &[(0.3, 0.7), (-3.4, 2.0), (-7.9, 0.01), (12.0, -30.0), (-20.5, -3.0)] {
            let z = c(x, y);
            let lhs = lgamma(z + 1.0);
            let rhs = lgamma(z) + z.ln();
            // both sides use principal logs; they may differ by 2 pi i
            let d = lhs - rhs;
            let k = (d.im / (2.0 * PI)).round();
            assert!(d.re.abs() < 1e-12 && (d.im - 2.0 * PI * k).abs() < 1e-11, "{z}: {d}");
        }
    }

    #[test]
    fn stirling_lanczos_agree() {
        for &(x, y) in &[(15.5, 0.0), (3.0, 14.8), (10.0, 11.2), (14.9, 1.0)] {
            let z = c(x, y);
            let a = stirling(z);
            let w = z - 1.0;
            let mut acc = Complex64::new(LANCZOS[0], 0.0);
            for (k, cc) in LANCZOS.iter().enumerate().skip(1) {
                acc += *cc / (w + k as f64);
            }
            let t = w + LANCZOS_G + 0.5;
            let b = (w + 0.5) * t.ln() - t + LN_SQRT_2PI + acc.ln();
            assert!((a - b).norm() < 2e-13 * a.norm().max(1.0), "{z}: {a} vs {b}");
        }
    }
}
