use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{lgamma, rgamma_real};

type C = Complex64;

const ASYMPTOTIC_RADIUS: f64 = 8.0;
// The Maclaurin terms reach exp(|z|^2/4); beyond this radius the ODE is marched instead.
const MACLAURIN_RADIUS: f64 = 3.0;
const STEP: f64 = 0.5;

/// D_a(z), Whittaker's parabolic cylinder function.
pub fn parabolic_cylinder_d(a: C, z: C) -> C {
    pcf_pair(a, z).0
}

/// (D_a(z), D_a'(z)).
pub fn parabolic_cylinder_d_with_derivative(a: C, z: C) -> (C, C) {
    pcf_pair(a, z)
}

fn rgamma(w: C) -> C {
    if w.im == 0.0 {
        return C::new(rgamma_real(w.re), 0.0);
    }
    (-lgamma(w)).exp()
}

fn pcf_pair(a: C, z: C) -> (C, C) {
    let r = z.norm();
    if r >= ASYMPTOTIC_RADIUS {
        let d = asymptotic(a, z);
        let d1 = asymptotic(a + 1.0, z);
        return (d, 0.5 * z * d - d1);
    }
    if r <= MACLAURIN_RADIUS {
        return maclaurin(a, z);
    }
    // Each ODE march runs in the direction in which D_a is the dominant solution.
    if (z * z).re <= 0.0 {
        return outward(a, z);
    }
    if z.re > 0.0 {
        return inward(a, z);
    }
    // D_a(z) = e^{i pi a} D_a(-z) + sqrt(2 pi)/Gamma(-a) e^{i pi (a+1)/2} D_{-a-1}(-i z)
    let i = C::i();
    let (dm, dmp) = inward(a, -z);
    let (e, ep) = outward(-a - 1.0, -i * z);
    let c1 = (i * PI * a).exp();
    let c2 = (2.0 * PI).sqrt() * rgamma(-a) * (i * 0.5 * PI * (a + 1.0)).exp();
    (c1 * dm + c2 * e, -c1 * dmp - i * c2 * ep)
}

fn initial_values(a: C) -> (C, C) {
    let sp = PI.sqrt();
    let two = C::new(2.0, 0.0);
    let d0 = two.powc(0.5 * a) * sp * rgamma(0.5 * (1.0 - a));
    let d1 = -two.powc(0.5 * (1.0 + a)) * sp * rgamma(-0.5 * a);
    (d0, d1)
}

fn maclaurin(a: C, z: C) -> (C, C) {
    let (d0, d1) = initial_values(a);
    taylor(d0, d1, C::new(0.0, 0.0), a, z)
}

/// Taylor expansion of the ODE solution about `c` with value `w` and slope `wp`,
/// evaluated at `c + h`.
fn taylor(w: C, wp: C, c: C, a: C, h: C) -> (C, C) {
    // w'' = (z^2/4 - a - 1/2) w with z = c + h
    let q0 = 0.25 * c * c - a - 0.5;
    let q1 = 0.5 * c;
    let mut k: Vec<C> = vec![w, wp];
    let mut val = w + wp * h;
    let mut der = wp;
    let mut hp = h;
    let mut quiet = 0;
    for n in 0..800usize {
        let nf = n as f64;
        let mut rhs = q0 * k[n];
        if n >= 1 {
            rhs += q1 * k[n - 1];
        }
        if n >= 2 {
            rhs += 0.25 * k[n - 2];
        }
        let next = rhs / ((nf + 2.0) * (nf + 1.0));
        k.push(next);
        der += (nf + 2.0) * next * hp;
        hp *= h;
        let t = next * hp;
        val += t;
        if t.norm() <= 1e-18 * val.norm() && (nf + 2.0) * t.norm() <= 1e-18 * (der * h).norm() {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    (val, der)
}

fn march(a: C, from: C, to: C, w: C, wp: C) -> (C, C) {
    let steps = ((to - from).norm() / STEP).ceil().max(1.0) as usize;
    let h = (to - from) / steps as f64;
    let (mut w, mut wp, mut c) = (w, wp, from);
    for _ in 0..steps {
        (w, wp) = taylor(w, wp, c, a, h);
        c += h;
    }
    (w, wp)
}

/// From the asymptotic values at the switch radius down to `z`.
fn inward(a: C, z: C) -> (C, C) {
    let start = z * (ASYMPTOTIC_RADIUS / z.norm());
    let d = asymptotic(a, start);
    let dp = 0.5 * start * d - asymptotic(a + 1.0, start);
    march(a, start, z, d, dp)
}

/// From the exact values at the origin out to `z`.
fn outward(a: C, z: C) -> (C, C) {
    let (d0, d1) = initial_values(a);
    march(a, C::new(0.0, 0.0), z, d0, d1)
}

fn asymptotic(a: C, z: C) -> C {
    let lz = z.ln();
    let z2 = z * z;
    let inv = 1.0 / (2.0 * z2);
    let first = (a * lz - 0.25 * z2).exp() * series(-a, inv, true);
    let arg = z.arg();
    if arg.abs() <= 0.5 * PI {
        return first;
    }
    let i = C::i();
    let phase = if arg > 0.0 {
        (i * PI * a).exp()
    } else {
        (-i * PI * a).exp()
    };
    let second = (0.25 * z2 - (a + 1.0) * lz).exp() * series(a + 1.0, inv, false);
    first - (2.0 * PI).sqrt() * rgamma(-a) * phase * second
}

/// sum_k (+-1)^k (p)_{2k} x^k / k!, stopped at the smallest term.
fn series(p: C, x: C, alternate: bool) -> C {
    let mut sum = C::new(1.0, 0.0);
    let mut term = C::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let mut next = term * (p + 2.0 * kf - 2.0) * (p + 2.0 * kf - 1.0) * x / kf;
        if alternate {
            next = -next;
        }
        let n = next.norm();
        if n > last {
            break;
        }
        sum += next;
        term = next;
        last = n;
        if n < 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}
