use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ProcessSpec;
use crate::error::{domain, Error, Result};
use crate::quadrature::gl16;
use crate::specfun::gamma::{lgamma, log_gamma_pos};

type C = Complex64;

// ln(1e16): integrand values this far below the running peak are dropped.
const DROP: f64 = 36.9;
const IMAG_TOL: f64 = 1e-9;
// Below this x the u-integral is replaced by its residue series.
const X_SERIES: f64 = 1.0;

/// Wedge-shaped contours for the double contour representation.
///
/// `gamma` is `apex_gamma + r e^{+-i wing_angle}` (opening to the left) and
/// `gamma_tilde` is `apex_gamma_tilde + r e^{+-i (pi - wing_angle)}` (opening
/// to the right), `r` in `[0, L]`. The length `L` is chosen adaptively and may
/// not exceed `truncation_height`; each wing gets at least `panel_count`
/// 16-point Gauss-Legendre panels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub apex_gamma: f64,
    pub apex_gamma_tilde: f64,
    pub wing_angle: f64,
    pub truncation_height: f64,
    pub panel_count: usize,
}

impl ContourSpec {
    /// Open interval the two apexes must lie in.
    pub fn admissible_interval(spec: &ProcessSpec) -> Result<(f64, f64)> {
        match spec {
            ProcessSpec::Wright { alpha, .. } => Ok((-0.5 * alpha, 1.0 + 0.5 * alpha)),
            ProcessSpec::MeijerG { nu, .. } => {
                let lo = nu.iter().cloned().fold(f64::INFINITY, f64::min);
                Ok((0.0, 1.0 + lo))
            }
            _ => Err(Error::Config(format!(
                "double contour route needs a wright or meijer process, got {}",
                spec.label()
            ))),
        }
    }

    /// Apexes at the points one and two thirds into the admissible interval,
    /// symmetric about its midpoint.
    pub fn default_for(spec: &ProcessSpec) -> Result<Self> {
        let (lo, hi) = Self::admissible_interval(spec)?;
        Ok(Self {
            apex_gamma: lo + (hi - lo) / 3.0,
            apex_gamma_tilde: lo + 2.0 * (hi - lo) / 3.0,
            wing_angle: 0.75 * PI,
            truncation_height: 400.0,
            panel_count: 8,
        })
    }

    pub(crate) fn check(&self, spec: &ProcessSpec) -> Result<()> {
        let (lo, hi) = Self::admissible_interval(spec)?;
        let (a, b) = (self.apex_gamma, self.apex_gamma_tilde);
        if !(lo < a && a < b && b < hi) {
            return Err(Error::Config(format!(
                "contour apexes must satisfy {lo} < apex_gamma < apex_gamma_tilde < {hi}, got ({a}, {b})"
            )));
        }
        if !(self.wing_angle > 0.5 * PI && self.wing_angle < PI) {
            return Err(Error::Config(format!(
                "wing_angle must lie in (pi/2, pi), got {}",
                self.wing_angle
            )));
        }
        if !(self.truncation_height > 0.0) || self.panel_count == 0 {
            return Err(Error::Config("truncation_height and panel_count must be positive".into()));
        }
        Ok(())
    }
}

enum Structure {
    Meijer { nu: Vec<f64>, mu: Vec<f64> },
    Wright { theta: f64, half_alpha: f64 },
}

impl Structure {
    fn new(spec: &ProcessSpec) -> Result<Self> {
        match spec {
            ProcessSpec::MeijerG { nu, mu } => Ok(Self::Meijer {
                nu: nu.clone(),
                mu: mu.clone(),
            }),
            ProcessSpec::Wright { theta, alpha } => Ok(Self::Wright {
                theta: *theta,
                half_alpha: 0.5 * alpha,
            }),
            _ => Err(Error::Config("double contour route needs a wright or meijer process".into())),
        }
    }

    /// log F(z).
    fn log_f(&self, z: C) -> C {
        match self {
            Self::Meijer { nu, mu } => {
                let mut s = lgamma(z);
                for m in mu {
                    s += lgamma(1.0 + m - z);
                }
                for n in nu {
                    s -= lgamma(1.0 + n - z);
                }
                s
            }
            Self::Wright { theta, half_alpha } => {
                lgamma(z + half_alpha) - lgamma((half_alpha + 1.0 - z) / theta)
            }
        }
    }

    /// Left poles of F sit at `-shift - k`; returns `shift` and
    /// `ln|Res_k|` with the sign `(-1)^k`.
    fn residues(&self) -> (f64, impl Fn(usize) -> f64 + '_) {
        let shift = match self {
            Self::Meijer { .. } => 0.0,
            Self::Wright { half_alpha, .. } => *half_alpha,
        };
        (shift, move |k: usize| {
            let kf = k as f64;
            let mut l = -log_gamma_pos(kf + 1.0);
            match self {
                Self::Meijer { nu, mu } => {
                    for m in mu {
                        l += log_gamma_pos(1.0 + m + kf);
                    }
                    for n in nu {
                        l -= log_gamma_pos(1.0 + n + kf);
                    }
                }
                Self::Wright { theta, half_alpha } => {
                    l -= log_gamma_pos((2.0 * half_alpha + 1.0 + kf) / theta);
                }
            }
            l
        })
    }

    /// Net number of gamma factors decaying along the wings.
    fn order(&self) -> f64 {
        match self {
            Self::Meijer { nu, mu } => (1 + nu.len() - mu.len()) as f64,
            Self::Wright { theta, .. } => 1.0 + 1.0 / theta,
        }
    }

    /// Rough count of gamma factors, for the phase rate along a wing.
    fn weight(&self) -> f64 {
        match self {
            Self::Meijer { nu, mu } => (1 + nu.len() + mu.len()) as f64,
            Self::Wright { theta, .. } => 1.0 + 1.0 / theta,
        }
    }
}

struct Wing {
    z: Vec<C>,
    w: Vec<C>,
    lf: Vec<C>,
}

/// Quadrature nodes of both contours prepared for points in given ranges.
pub struct ContourKernel {
    st: Structure,
    u: Wing,
    v: Wing,
    rho: f64,
    g: f64,
}

impl ContourKernel {
    /// Nodes adequate for `x` in the range of `xs` and `y` in the range of `ys`.
    pub fn new(spec: &ProcessSpec, contour: &ContourSpec, xs: &[f64], ys: &[f64]) -> Result<Self> {
        contour.check(spec)?;
        if let Some(v) = xs.iter().chain(ys).find(|v| !(**v > 0.0 && v.is_finite())) {
            return domain(format!("contour kernel needs x, y > 0, got {v}"));
        }
        let st = Structure::new(spec)?;
        let (rho, g) = spec.gauge();
        let range = |p: &[f64]| {
            let lo = p.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = p.iter().cloned().fold(0.0, f64::max);
            (lo.ln(), hi.ln())
        };
        let sep = contour.apex_gamma_tilde - contour.apex_gamma;
        // small x are served by the residue series, which keeps the gamma wing short
        let big: Vec<f64> = xs.iter().cloned().filter(|&x| x >= X_SERIES).collect();
        let big = if big.is_empty() { vec![X_SERIES] } else { big };
        // gamma: F(u) x^{-u}; gamma tilde: y^{v-1} / F(v)
        let u = build_wing(&st, contour, contour.apex_gamma, contour.wing_angle, sep, range(&big), true)?;
        let v = build_wing(
            &st,
            contour,
            contour.apex_gamma_tilde,
            PI - contour.wing_angle,
            sep,
            range(ys),
            false,
        )?;
        Ok(Self { st, u, v, rho, g })
    }

    /// Row-major `exp(G (x_i^rho - y_j^rho)) K(x_i, y_j)`.
    pub fn balanced_block(&self, xs: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
        let (nu, nv) = (self.u.z.len(), self.v.z.len());
        let weights = |wing: &Wing, lp: f64, sign: f64| -> (Vec<C>, f64) {
            let ex: Vec<C> = wing
                .z
                .iter()
                .zip(&wing.lf)
                .map(|(z, lf)| sign * lf - sign * z * lp)
                .collect();
            let top = ex.iter().fold(f64::NEG_INFINITY, |a, e| a.max(e.re));
            let out = ex.iter().zip(&wing.w).map(|(e, w)| w * (e - top).exp()).collect();
            (out, top)
        };
        let mut inv = vec![C::new(0.0, 0.0); nu * nv];
        for a in 0..nu {
            for b in 0..nv {
                inv[a * nv + b] = 1.0 / (self.u.z[a] - self.v.z[b]);
            }
        }
        let mut rows = Vec::with_capacity(xs.len());
        for &x in xs {
            if x < X_SERIES {
                let (t, top) = self.residue_row(x);
                rows.push((t, top + self.g * x.powf(self.rho)));
                continue;
            }
            let (aw, top) = weights(&self.u, x.ln(), 1.0);
            let mut t = vec![C::new(0.0, 0.0); nv];
            for a in 0..nu {
                let c = aw[a];
                if c == C::new(0.0, 0.0) {
                    continue;
                }
                let row = &inv[a * nv..(a + 1) * nv];
                for b in 0..nv {
                    t[b] += c * row[b];
                }
            }
            rows.push((t, top + self.g * x.powf(self.rho)));
        }
        let mut out = vec![0.0; xs.len() * ys.len()];
        for (j, &y) in ys.iter().enumerate() {
            // y^{v-1}/F(v) = exp(-(log F(v) - v ln y)) / y
            let (bw, top) = weights(&self.v, y.ln(), -1.0);
            let shift = top - y.ln() - self.g * y.powf(self.rho);
            for (i, (t, lt)) in rows.iter().enumerate() {
                let s: C = t.iter().zip(&bw).map(|(p, q)| p * q).sum();
                let k = s * ((lt + shift).exp() / (4.0 * PI * PI));
                if k.im.abs() > IMAG_TOL * k.re.abs().max(1.0) {
                    return Err(Error::Accuracy(format!(
                        "contour kernel at ({}, {y}) has imaginary part {:e}",
                        xs[i], k.im
                    )));
                }
                out[i * ys.len() + j] = k.re;
            }
        }
        Ok(out)
    }

    // int_gamma F(u) x^{-u} / (u - v) du at every node v, closing gamma to the
    // left: 2 pi i sum_k Res_k x^{shift + k} / (-shift - k - v), scaled by exp(top).
    fn residue_row(&self, x: f64) -> (Vec<C>, f64) {
        let (shift, log_res) = self.st.residues();
        let lx = x.ln();
        let mut terms = Vec::new();
        let mut top = f64::NEG_INFINITY;
        for k in 0..500 {
            let l = log_res(k) + (shift + k as f64) * lx;
            top = top.max(l);
            terms.push(l);
            if k > 4 && l < top - DROP {
                break;
            }
        }
        let mut t = vec![C::new(0.0, 0.0); self.v.z.len()];
        for (k, l) in terms.iter().enumerate() {
            let c = if k % 2 == 0 { 1.0 } else { -1.0 } * (l - top).exp();
            let pole = -shift - k as f64;
            for (tb, v) in t.iter_mut().zip(&self.v.z) {
                *tb += c / (pole - v);
            }
        }
        let two_pi_i = C::new(0.0, 2.0 * PI);
        t.iter_mut().for_each(|tb| *tb *= two_pi_i);
        (t, top)
    }
}

fn build_wing(
    st: &Structure,
    contour: &ContourSpec,
    apex: f64,
    angle: f64,
    sep: f64,
    (lx_lo, lx_hi): (f64, f64),
    left: bool,
) -> Result<Wing> {
    let dir = C::from_polar(1.0, angle);
    let sign = if left { 1.0 } else { -1.0 };
    // log|integrand| at the two ends of the point range bounds it on the whole range
    let level = |r: f64| -> (f64, f64) {
        let z = apex + r * dir;
        let lf = sign * st.log_f(z);
        let e = |lp: f64| (lf - sign * z * lp).re;
        (e(lx_lo), e(lx_hi))
    };
    let lmax = lx_lo.abs().max(lx_hi.abs());
    let r_min = 2.0 * lx_hi.max(0.0).exp().powf(1.0 / st.order()) + 2.0;
    let (mut peak_lo, mut peak_hi) = level(0.0);
    let mut edges = vec![0.0];
    let mut r = 0.0;
    loop {
        let rate = st.weight() * ((2.0 + r + apex.abs()).ln() + 1.0) + lmax;
        let width = (0.5 * r + 0.25 * sep).min(8.0 / rate).min(1.0);
        r += width;
        edges.push(r);
        let (a, b) = level(r);
        peak_lo = peak_lo.max(a);
        peak_hi = peak_hi.max(b);
        let done = r >= r_min && a < peak_lo - DROP && b < peak_hi - DROP;
        if done && edges.len() > contour.panel_count {
            break;
        }
        if r > contour.truncation_height {
            return Err(Error::Accuracy(format!(
                "contour integrand still at exp({:.1}) of its peak at the truncation height {}",
                (a - peak_lo).max(b - peak_hi),
                contour.truncation_height
            )));
        }
    }
    let (gx, gw) = gl16();
    let mut wing = Wing {
        z: Vec::new(),
        w: Vec::new(),
        lf: Vec::new(),
    };
    // upper wing runs outward, lower wing inward: both upward
    for (d, orient) in [(dir, dir), (dir.conj(), -dir.conj())] {
        for cell in edges.windows(2) {
            let half = 0.5 * (cell[1] - cell[0]);
            let mid = 0.5 * (cell[1] + cell[0]);
            for (x, v) in gx.iter().zip(gw) {
                let z = apex + (mid + half * x) * d;
                wing.z.push(z);
                wing.w.push(orient * (half * v));
                wing.lf.push(st.log_f(z));
            }
        }
    }
    Ok(wing)
}

/// The kernel (1/4 pi^2) int_gamma du int_gamma~ dv F(u)/F(v) x^{-u} y^{v-1} / (u - v).
pub fn double_contour_kernel(spec: &ProcessSpec, contour: &ContourSpec, x: f64, y: f64) -> Result<f64> {
    let ck = ContourKernel::new(spec, contour, &[x], &[y])?;
    let k = ck.balanced_block(&[x], &[y])?[0];
    Ok(k * (-ck.g * (x.powf(ck.rho) - y.powf(ck.rho))).exp())
}

/// The Meijer-G kernel through the double contour route with default contours.
pub fn meijer_kernel(spec: &ProcessSpec, x: f64, y: f64) -> Result<f64> {
    if !matches!(spec, ProcessSpec::MeijerG { .. }) {
        return Err(Error::Config(format!("meijer_kernel needs a meijer process, got {}", spec.label())));
    }
    spec.validate()?;
    double_contour_kernel(spec, &ContourSpec::default_for(spec)?, x, y)
}
