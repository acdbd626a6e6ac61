//! Closed-form large-`s` asymptotics of the exponential moments
//!
//!   log E[exp(-2 pi nu N(s))] = -2 pi nu mu(s) + 2 pi^2 nu^2 sigma^2(s) + log C(nu) + o(1),
//!
//! with `mu(s) = mu_coeff s^rho`, `sigma^2(s) = sigma2_coeff log s` and
//! `log C(nu) = linear nu + log_bracket nu^2 + log[G(1 + i nu) G(1 - i nu)]`.
//!
//! For the Wright and Meijer-G processes the same quantities are also
//! reconstructed from the saddle point data of the double contour integral
//! (`saddle_data`, `saddle_crosscheck`).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::kernels::ProcessSpec;
use crate::specfun::{log_barnes_g_conjugate_pair, EULER_GAMMA};

/// The exponent `a` shared by all four processes in the rigidity estimate.
pub const RIGIDITY_A: f64 = 1.0 / (2.0 * PI * PI);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentAsymptotics {
    /// Growth exponent of `mu`.
    pub rho: f64,
    pub mu_coeff: f64,
    pub sigma2_coeff: f64,
    /// Coefficient of `nu` in `log C`.
    pub linear: f64,
    /// Coefficient of `nu^2` in `log C`, the log of the bracket raised to `nu^2`.
    pub log_bracket: f64,
    /// The relative error of the expansion decays like `s^{-error_exponent}`.
    pub error_exponent: f64,
}

impl MomentAsymptotics {
    /// `mu(s)`, extended to negative `s` as an odd function (Airy points can be negative).
    pub fn mu(&self, s: f64) -> f64 {
        self.mu_coeff * s.signum() * s.abs().powf(self.rho)
    }

    /// Inverse of `mu` on the positive axis.
    pub fn mu_inverse(&self, k: f64) -> f64 {
        k.signum() * (k.abs() / self.mu_coeff).powf(1.0 / self.rho)
    }

    pub fn sigma2(&self, s: f64) -> f64 {
        self.sigma2_coeff * s.ln()
    }

    pub fn log_c(&self, nu: f64) -> Result<f64> {
        Ok(self.linear * nu + self.log_bracket * nu * nu + log_barnes_g_conjugate_pair(nu)?)
    }

    pub fn asymptote(&self, s: f64, nu: f64) -> Result<f64> {
        Ok(-2.0 * PI * nu * self.mu(s) + 2.0 * PI * PI * nu * nu * self.sigma2(s) + self.log_c(nu)?)
    }
}

fn k_of(nu: &[f64], mu: &[f64]) -> f64 {
    (1 + nu.len() - mu.len()) as f64
}

fn param_sum(nu: &[f64], mu: &[f64]) -> f64 {
    nu.iter().sum::<f64>() - mu.iter().sum::<f64>()
}

pub fn moment_asymptotics(spec: &ProcessSpec) -> MomentAsymptotics {
    match spec {
        ProcessSpec::Airy => MomentAsymptotics {
            rho: 1.5,
            mu_coeff: 2.0 / (3.0 * PI),
            sigma2_coeff: 3.0 / (4.0 * PI * PI),
            linear: 0.0,
            log_bracket: 8f64.ln(),
            error_exponent: 1.5,
        },
        ProcessSpec::Bessel { alpha } => MomentAsymptotics {
            rho: 0.5,
            mu_coeff: 1.0 / PI,
            sigma2_coeff: 1.0 / (4.0 * PI * PI),
            linear: PI * alpha,
            log_bracket: 4f64.ln(),
            error_exponent: 0.5,
        },
        ProcessSpec::Wright { theta, alpha } => {
            let rho = theta / (1.0 + theta);
            MomentAsymptotics {
                rho,
                mu_coeff: (1.0 + theta) / PI * theta.powf(-rho) * (0.5 * PI * (1.0 - theta) / (1.0 + theta)).cos(),
                sigma2_coeff: rho / (2.0 * PI * PI),
                linear: PI * (1.0 - theta + 2.0 * alpha) / (1.0 + theta),
                log_bracket: (4.0 * (1.0 + theta) * theta.powf(-rho) * (PI * rho).sin().powi(2)).ln(),
                error_exponent: rho,
            }
        }
        ProcessSpec::MeijerG { nu, mu } => {
            let k = k_of(nu, mu);
            MomentAsymptotics {
                rho: 1.0 / k,
                mu_coeff: k / PI * (0.5 * PI * (k - 2.0) / k).cos(),
                sigma2_coeff: 1.0 / (2.0 * PI * PI * k),
                linear: 2.0 * PI / k * param_sum(nu, mu),
                log_bracket: (4.0 * k * (PI / k).sin().powi(2)).ln(),
                error_exponent: 1.0 / k,
            }
        }
    }
}

pub fn log_constant_c(spec: &ProcessSpec, nu: f64) -> Result<f64> {
    moment_asymptotics(spec).log_c(nu)
}

/// `-2 pi nu mu(s) + 2 pi^2 nu^2 sigma^2(s) + log C(nu)`.
pub fn moment_asymptote(spec: &ProcessSpec, s: f64, nu: f64) -> Result<f64> {
    if !(s > 0.0) {
        return domain(format!("moment asymptote needs s > 0, got {s}"));
    }
    moment_asymptotics(spec).asymptote(s, nu)
}

/// Asymptotic mean and variance of `N(s)` for the Wright and Meijer-G processes.
pub fn counting_mean_var_asym(spec: &ProcessSpec, s: f64) -> Result<(f64, f64)> {
    if !matches!(spec, ProcessSpec::Wright { .. } | ProcessSpec::MeijerG { .. }) {
        return domain(format!("counting asymptotics are stated for wright and meijer only, got {}", spec.label()));
    }
    if !(s > 0.0) {
        return domain(format!("counting asymptotics need s > 0, got {s}"));
    }
    let a = moment_asymptotics(spec);
    let pi2 = PI * PI;
    let mean = a.mu(s) - a.linear / (2.0 * PI);
    let var = a.sigma2(s) + a.log_bracket / (2.0 * pi2) + (1.0 + EULER_GAMMA) / (2.0 * pi2);
    Ok((mean, var))
}

/// Band `lower <= x_k <= upper` from `|mu(x_k) - k| <= (1/pi + eps) log k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub lower: f64,
    pub upper: f64,
    /// Set when `k - (1/pi + eps) log k < 0` and the lower edge was clamped to 0.
    pub clamped: bool,
}

pub fn rigidity_envelope(spec: &ProcessSpec, k: u64, eps: f64) -> Result<Envelope> {
    if k < 2 {
        return domain(format!("rigidity envelope needs k >= 2, got {k}"));
    }
    if !(eps > 0.0) {
        return domain(format!("rigidity envelope needs eps > 0, got {eps}"));
    }
    let a = moment_asymptotics(spec);
    let kf = k as f64;
    let width = (1.0 / PI + eps) * kf.ln();
    let lo = kf - width;
    let clamped = lo < 0.0;
    Ok(Envelope {
        lower: if clamped { 0.0 } else { a.mu_inverse(lo) },
        upper: a.mu_inverse(kf + width),
        clamped,
    })
}

/// Saddle point data of the phase `h(z) = -c1 z log(iz) - c2 z log(-iz) - c3 z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaddleData {
    pub c: [f64; 6],
    pub b2: Complex64,
    pub b1: Complex64,
    /// `Re(i h(b2))`
    pub ell: f64,
    /// `Im(i h(b2))`
    pub ell_tilde: f64,
    pub f_prime_b2: Complex64,
}

impl SaddleData {
    pub fn from_constants(c: [f64; 6]) -> Self {
        let (c1, c2, c3) = (c[0], c[1], c[2]);
        let b2 = Complex64::from_polar((-(c1 + c2 + c3) / (c1 + c2)).exp(), 0.5 * PI * (c2 - c1) / (c1 + c2));
        let i = Complex64::i();
        let ih = i * h(&c, b2);
        Self {
            c,
            b2,
            b1: -b2.conj(),
            ell: ih.re,
            ell_tilde: ih.im,
            f_prime_b2: (Complex64::from(c1 + c2) / b2).sqrt(),
        }
    }

    /// `|h'(b2)|`
    pub fn residual(&self) -> f64 {
        h_prime(&self.c, self.b2).norm()
    }

    pub fn rho(&self) -> f64 {
        1.0 / (self.c[0] + self.c[1])
    }

    pub fn mu_coeff(&self) -> f64 {
        self.b2.re / (PI * self.rho())
    }

    pub fn sigma2_coeff(&self) -> f64 {
        self.rho() / (2.0 * PI * PI)
    }

    pub fn log_c(&self, nu: f64) -> Result<f64> {
        let [c1, c2, _, _, c5, c6] = self.c;
        let scale = ((self.b2 - self.b1) * self.f_prime_b2).norm().ln();
        Ok(-2.0 * PI * nu * (c1 * c6 - c2 * c5) / (c1 + c2) + 2.0 * nu * nu * scale + log_barnes_g_conjugate_pair(nu)?)
    }
}

fn h(c: &[f64; 6], z: Complex64) -> Complex64 {
    let i = Complex64::i();
    -c[0] * z * (i * z).ln() - c[1] * z * (-i * z).ln() - c[2] * z
}

fn h_prime(c: &[f64; 6], z: Complex64) -> Complex64 {
    let i = Complex64::i();
    -(c[0] + c[1] + c[2]) - c[0] * (i * z).ln() - c[1] * (-i * z).ln()
}

/// The constants `c1..c6` of the large-argument expansion of the Mellin integrand.
pub fn saddle_data(spec: &ProcessSpec) -> Result<SaddleData> {
    let c = match spec {
        ProcessSpec::Wright { theta, alpha } => [
            1.0,
            1.0 / theta,
            -(theta + 1.0 + theta.ln()) / theta,
            (theta - 1.0) * (1.0 + alpha) / (2.0 * (theta + 1.0)),
            0.5 * alpha,
            (theta - alpha - 1.0) / (2.0 * theta),
        ],
        ProcessSpec::MeijerG { nu, mu } => {
            let rq = (nu.len() - mu.len()) as f64;
            let nu_min = nu.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            let sum = param_sum(nu, mu);
            [
                1.0,
                rq,
                -(rq + 1.0),
                0.5 * nu_min - sum / (rq + 1.0),
                0.5 * nu_min,
                rq * 0.5 * nu_min - sum,
            ]
        }
        _ => return domain(format!("saddle data exist for wright and meijer only, got {}", spec.label())),
    };
    Ok(SaddleData::from_constants(c))
}

/// `(mu_coeff, sigma2_coeff, log C(nu))` computed from the saddle data alone.
pub fn saddle_crosscheck(spec: &ProcessSpec, nu: f64) -> Result<(f64, f64, f64)> {
    let d = saddle_data(spec)?;
    Ok((d.mu_coeff(), d.sigma2_coeff(), d.log_c(nu)?))
}

/// Largest discrepancy in the invariance of `mu`, `sigma^2` and `C` under
/// `s -> s^theta, theta -> 1/theta, alpha -> (1 + alpha)/theta - 1`.
pub fn symmetry_check(theta: f64, alpha: f64, s: f64, nu: f64) -> Result<f64> {
    let a = moment_asymptotics(&ProcessSpec::wright(theta, alpha)?);
    let b = moment_asymptotics(&ProcessSpec::wright(1.0 / theta, (1.0 + alpha) / theta - 1.0)?);
    let st = s.powf(theta);
    Ok([
        (a.mu(s) - b.mu(st)).abs(),
        (a.sigma2(s) - b.sigma2(st)).abs(),
        (a.log_c(nu)? - b.log_c(nu)?).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max))
}

/// Largest discrepancy in `mu^Me(s) = mu^Wr(r^r s)`, `sigma^Me = sigma^Wr` and
/// `log C^Me = log C^Wr + r nu^2 theta/(theta + 1) log r` at `theta = 1/r`.
pub fn meijer_wright_check(r: usize, alpha: f64, s: f64, nu: f64) -> Result<f64> {
    let me = moment_asymptotics(&ProcessSpec::meijer_from_wright(r, alpha)?);
    let theta = 1.0 / r as f64;
    let wr = moment_asymptotics(&ProcessSpec::wright(theta, alpha)?);
    let rf = r as f64;
    let shift = rf * nu * nu * theta / (theta + 1.0) * rf.ln();
    Ok([
        (me.mu(s) - wr.mu(rf.powf(rf) * s)).abs(),
        (me.sigma2(s) - wr.sigma2(s)).abs(),
        (me.log_c(nu)? - wr.log_c(nu)? - shift).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max))
}
