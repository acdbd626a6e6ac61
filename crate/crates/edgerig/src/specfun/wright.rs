use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{lgamma, log_gamma_pos};
use crate::error::{domain, Result};
use crate::quadrature::gl16;

/// A real number stored as `m * exp(e)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub m: f64,
    pub e: f64,
}

impl Scaled {
    pub fn value(self) -> f64 {
        self.m * self.e.exp()
    }

    pub fn is_finite(self) -> bool {
        self.m.is_finite() && self.e.is_finite()
    }
}

/// Wright's generalized Bessel function J_{a,b}(x) = sum_m (-x)^m / (m! Gamma(a + b m)).
///
/// Small arguments use the series. Where the series would cancel (the terms
/// peak near exp((1+b)R) while the sum is of size exp((1+b)R cos chi)) the
/// Mellin-Barnes integral
///
///   J_{a,b}(x) = (1/2 pi i) int Gamma(s) x^{-s} / Gamma(a - b s) ds
///
/// is taken along a wedge whose wings pass through the two complex saddles.
#[derive(Debug, Clone, Copy)]
pub struct WrightFunction {
    a: f64,
    b: f64,
    ln_b: f64,
    chi: f64,
    wing: Complex64,
    loss: f64,
}

// Cancellation (in nepers) tolerated before switching to the contour integral.
const SERIES_LOSS: f64 = 8.0;

impl WrightFunction {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
            return domain(format!("wright function needs a, b > 0, got ({a}, {b})"));
        }
        let chi = PI * b / (1.0 + b);
        Ok(Self {
            a,
            b,
            ln_b: b.ln(),
            chi,
            wing: Complex64::from_polar(1.0, 0.5 * (PI + chi)),
            loss: (1.0 + b) * (1.0 + chi.cos()),
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Radius of the two complex saddles of the Mellin-Barnes integrand.
    pub fn saddle_radius(&self, ln_x: f64) -> f64 {
        ((ln_x - self.b * self.ln_b) / (1.0 + self.b)).exp()
    }

    /// J_{a,b}(x) for x >= 0.
    pub fn eval(&self, x: f64) -> Scaled {
        if x == 0.0 {
            return Scaled {
                m: (-log_gamma_pos(self.a)).exp(),
                e: 0.0,
            };
        }
        self.eval_ln(x.ln())
    }

    /// J_{a,b}(e^{ln_x}); lets callers pass z^theta without forming it.
    pub fn eval_ln(&self, ln_x: f64) -> Scaled {
        let r = self.saddle_radius(ln_x);
        if self.loss * r <= SERIES_LOSS {
            Scaled {
                m: self.series(ln_x),
                e: 0.0,
            }
        } else {
            self.mellin_barnes(ln_x, r)
        }
    }

    fn series(&self, ln_x: f64) -> f64 {
        // Neumaier-compensated alternating sum
        let mut sum = 0.0;
        let mut comp = 0.0;
        let mut prev = f64::INFINITY;
        for m in 0..2000 {
            let mf = m as f64;
            let lt = mf * ln_x - log_gamma_pos(mf + 1.0) - log_gamma_pos(self.a + self.b * mf);
            let t = if m % 2 == 0 { lt.exp() } else { -lt.exp() };
            let s = sum + t;
            if sum.abs() >= t.abs() {
                comp += (sum - s) + t;
            } else {
                comp += (t - s) + sum;
            }
            sum = s;
            if lt < prev && t.abs() <= 1e-17 * (sum + comp).abs().max(1e-300) {
                break;
            }
            prev = lt;
        }
        sum + comp
    }

    fn log_integrand(&self, s: Complex64, ln_x: f64) -> Complex64 {
        lgamma(s) - s * ln_x - lgamma(self.a - self.b * s)
    }

    fn mellin_barnes(&self, ln_x: f64, r: f64) -> Scaled {
        let apex = r.max(0.5);
        let saddle = Complex64::from_polar(r, self.chi);
        let to_saddle = (saddle - apex).norm();
        let width = (r / (1.0 + self.b)).sqrt() + 1.0;
        let at = |d: f64| self.log_integrand(apex + d * self.wing, ln_x);
        let peak = at(to_saddle).re;
        // probe slightly up the wing too: the apex can sit on a zero of 1/Gamma
        if at(0.0).re.max(at(0.01).re) < peak - 40.0 {
            return self.trapezoid(&at, to_saddle, peak, (r / (1.0 + self.b)).sqrt());
        }
        if self.b <= 1.0 {
            return self.parabola(ln_x, r);
        }

        let (gx, gw) = gl16();
        let mut vals: Vec<(Complex64, f64)> = Vec::with_capacity(320);
        let mut lo = 0.0;
        for _ in 0..400 {
            let step = if lo < to_saddle + 8.0 * width {
                width
            } else {
                width * (1.0 + (lo - to_saddle) / (4.0 * width))
            };
            let hi = lo + step;
            let mid = 0.5 * (lo + hi);
            for (t, w) in gx.iter().zip(gw) {
                vals.push((at(mid + 0.5 * step * t), 0.5 * step * w));
            }
            lo = hi;
            if lo > to_saddle + 8.0 * width && at(lo).re < peak - 45.0 {
                break;
            }
        }
        let top = vals.iter().fold(f64::NEG_INFINITY, |acc, v| acc.max(v.0.re));
        let mut acc = Complex64::new(0.0, 0.0);
        for (lg, w) in &vals {
            acc += *w * (lg - top).exp();
        }
        acc *= self.wing;
        Scaled {
            m: acc.im / PI,
            e: top,
        }
    }

    // Smooth contour s(t) = R - k t^2 + i t through both saddles; the
    // trapezoid rule in t converges geometrically.
    fn parabola(&self, ln_x: f64, r: f64) -> Scaled {
        let (sc, cc) = self.chi.sin_cos();
        let k = (1.0 - cc) / (r * sc * sc);
        let ts = r * sc;
        let sigma = (r / (1.0 + self.b)).sqrt();
        let h = 0.25 * sigma.min(ts).min(1.0 / k.sqrt());
        let s_of = |t: f64| Complex64::new(r - k * t * t, t);
        let peak = self.log_integrand(s_of(ts), ln_x).re;
        let mut vals: Vec<(f64, Complex64)> = Vec::with_capacity(48);
        for n in 0..4000 {
            let t = n as f64 * h;
            let v = self.log_integrand(s_of(t), ln_x);
            vals.push((t, v));
            if t > ts && v.re < peak - 40.0 {
                break;
            }
        }
        let top = vals.iter().fold(f64::NEG_INFINITY, |acc, v| acc.max(v.1.re));
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, (t, v)) in vals.iter().enumerate() {
            let w = if n == 0 { 0.5 * h } else { h };
            if v.re.is_finite() {
                acc += w * (v - top).exp() * Complex64::new(-2.0 * k * t, 1.0);
            }
        }
        Scaled {
            m: acc.im / PI,
            e: top,
        }
    }

    // The wing integrand is negligible at the apex, so the integral is effectively
    // over the whole line and the trapezoid rule converges geometrically.
    fn trapezoid(
        &self,
        at: &impl Fn(f64) -> Complex64,
        to_saddle: f64,
        peak: f64,
        sigma: f64,
    ) -> Scaled {
        let h = 0.5 * sigma;
        let mut vals: Vec<Complex64> = Vec::with_capacity(48);
        let mut k = 0.0;
        loop {
            let d = to_saddle - k * h;
            if d <= 0.0 {
                break;
            }
            let v = at(d);
            vals.push(v);
            if v.re < peak - 40.0 {
                break;
            }
            k += 1.0;
        }
        k = 1.0;
        loop {
            let v = at(to_saddle + k * h);
            vals.push(v);
            if v.re < peak - 40.0 {
                break;
            }
            k += 1.0;
        }
        let top = vals.iter().fold(f64::NEG_INFINITY, |acc, v| acc.max(v.re));
        let acc: Complex64 = vals.iter().map(|v| (v - top).exp()).sum::<Complex64>() * h * self.wing;
        Scaled {
            m: acc.im / PI,
            e: top,
        }
    }
}

/// J_{a,b}(x) as a plain float.
pub fn wright_bessel(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("wright_bessel needs finite x >= 0, got {x}"));
    }
    Ok(WrightFunction::new(a, b)?.eval(x).value())
}
