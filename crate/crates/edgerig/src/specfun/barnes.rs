use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::lgamma;
use crate::error::{domain, Result};

// zeta'(-1)
const ZETA_PRIME_M1: f64 = -0.165_421_143_700_450_93;

// B_{2k+2} / (4k(k+1)), k = 1..8
const TAIL: [f64; 8] = [
    -1.0 / 240.0,
    1.0 / 1008.0,
    -1.0 / 1440.0,
    1.0 / 1056.0,
    -691.0 / 327_600.0,
    1.0 / 144.0,
    -3617.0 / 114_240.0,
    43867.0 / 229_824.0,
];

const SHIFT: usize = 8;

/// log G(1 + z) from the asymptotic expansion; valid for |z| >= 8, Re z > 0.
fn log_g1p_asymptotic(z: Complex64) -> Complex64 {
    let lz = z.ln();
    let z2 = z * z;
    let inv2 = (z2).inv();
    let mut tail = Complex64::new(0.0, 0.0);
    for c in TAIL.iter().rev() {
        tail = (tail + *c) * inv2;
    }
    (0.5 * z2 - 1.0 / 12.0) * lz - 0.75 * z2 + 0.5 * z * (2.0 * PI).ln() + ZETA_PRIME_M1 + tail
}

/// log G(1 + z) for Re z > -1, by the recurrence log G(z+1) = log G(z) + log Gamma(z)
/// down from the asymptotic region.
pub fn log_barnes_g(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return domain("log_barnes_g of a non-finite argument");
    }
    if z.re <= -1.0 {
        return domain("log_barnes_g implemented for Re z > -1 only");
    }
    let w = z + SHIFT as f64;
    let mut acc = log_g1p_asymptotic(w);
    for k in 0..SHIFT {
        acc -= lgamma(z + 1.0 + k as f64);
    }
    Ok(acc)
}

/// log[G(1 + i nu) G(1 - i nu)], real and even in nu.
pub fn log_barnes_g_conjugate_pair(nu: f64) -> Result<f64> {
    if !nu.is_finite() {
        return domain("log_barnes_g_conjugate_pair of a non-finite argument");
    }
    if nu == 0.0 {
        return Ok(0.0);
    }
    let g = log_barnes_g(Complex64::new(0.0, nu.abs()))?;
    Ok(2.0 * g.re)
}
