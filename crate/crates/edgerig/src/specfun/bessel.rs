use std::f64::consts::PI;

use super::gamma::log_gamma_pos;
use crate::error::{domain, Result};
use crate::quadrature::gl16;

/// (J_alpha(x), J_alpha'(x)) for alpha > -1, x >= 0.
pub fn bessel_j_with_derivative(alpha: f64, x: f64) -> Result<(f64, f64)> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return domain(format!("bessel_j needs alpha > -1, got {alpha}"));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("bessel_j needs finite x >= 0, got {x}"));
    }
    Ok(bessel_j_pair(alpha, x))
}

pub(crate) fn bessel_j_pair(alpha: f64, x: f64) -> (f64, f64) {
    if x == 0.0 {
        let j = if alpha == 0.0 {
            1.0
        } else if alpha > 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let dj = if alpha == 1.0 {
            0.5
        } else if alpha > 1.0 || alpha == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        return (j, dj);
    }
    if x <= 8.0 || x * x < 4.0 * (alpha + 1.0) {
        return series(alpha, x);
    }
    if x >= 30.0_f64.max(alpha * alpha) {
        let (j0, _) = hankel(alpha, x);
        let (j1, _) = hankel(alpha + 1.0, x);
        return (j0, alpha / x * j0 - j1);
    }
    schlafli(alpha, x)
}

fn series(alpha: f64, x: f64) -> (f64, f64) {
    let h = 0.5 * x;
    let lead = if alpha == 0.0 {
        1.0
    } else {
        (alpha * h.ln() - log_gamma_pos(alpha + 1.0)).exp()
    };
    let q = -h * h;
    let mut term = lead;
    let mut j = 0.0;
    let mut dj = 0.0;
    for k in 0..300 {
        let kf = k as f64;
        j += term;
        dj += term * (2.0 * kf + alpha) / x;
        if term.abs() < 1e-17 * j.abs() && k > 2 {
            break;
        }
        term *= q / ((kf + 1.0) * (kf + 1.0 + alpha));
    }
    (j, dj)
}

/// Hankel's expansion; returns (J, truncation estimate).
fn hankel(alpha: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * alpha * alpha;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    let mut err = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (mu - odd * odd) / (kf * 8.0 * x);
        if a.abs() > last || a.abs() < 1e-17 {
            err = a.abs();
            break;
        }
        last = a.abs();
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
    }
    let chi = x - (0.5 * alpha + 0.25) * PI;
    let amp = (2.0 / (PI * x)).sqrt();
    (amp * (p * chi.cos() - q * chi.sin()), amp * err)
}

fn schlafli(alpha: f64, x: f64) -> (f64, f64) {
    let (gx, gw) = gl16();
    let panels = ((x + alpha.abs()) / 8.0).ceil() as usize + 2;
    let width = PI / panels as f64;
    let mut j = 0.0;
    let mut dj = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * width;
        for (t, w) in gx.iter().zip(gw) {
            let s = mid + 0.5 * width * t;
            let ph = alpha * s - x * s.sin();
            let wt = 0.5 * width * w;
            j += wt * ph.cos();
            dj += wt * ph.sin() * s.sin();
        }
    }
    j /= PI;
    dj /= PI;
    let sa = (alpha * PI).sin();
    if sa != 0.0 && alpha.fract() != 0.0 {
        let top = ((45.0 + 4.0 * alpha.abs()) / x).asinh() + 0.5;
        let panels = 4;
        let width = top / panels as f64;
        let mut a = 0.0;
        let mut b = 0.0;
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * width;
            for (t, w) in gx.iter().zip(gw) {
                let s = mid + 0.5 * width * t;
                let e = (-x * s.sinh() - alpha * s).exp() * 0.5 * width * w;
                a += e;
                b += e * s.sinh();
            }
        }
        j -= sa / PI * a;
        dj += sa / PI * b;
    }
    (j, dj)
}
