use std::f64::consts::PI;

use super::bessel::bessel_j_pair;
use crate::quadrature::gl16;

const AI0: f64 = 0.355_028_053_887_817_24;
const AIP0: f64 = -0.258_819_403_792_806_8;

/// (Ai(x), Ai'(x)).
pub fn airy_ai_with_derivative(x: f64) -> (f64, f64) {
    if x.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    if x.abs() <= 2.0 {
        maclaurin(x)
    } else if x > 0.0 {
        if x > 1e5 {
            return (0.0, -0.0);
        }
        decaying(x)
    } else {
        oscillating(-x)
    }
}

fn maclaurin(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    // f = sum t_k, g = sum u_k with f' = sum d_k, g' = sum e_k
    let (mut t, mut u, mut d, mut e) = (1.0, x, 0.5 * x * x, 1.0);
    let (mut f, mut g, mut fp, mut gp) = (t, u, d, e);
    for k in 0..40 {
        let k3 = 3.0 * k as f64;
        t *= x3 / ((k3 + 2.0) * (k3 + 3.0));
        u *= x3 / ((k3 + 3.0) * (k3 + 4.0));
        e *= x3 / ((k3 + 1.0) * (k3 + 3.0));
        if k > 0 {
            d *= x3 / (k3 * (k3 + 2.0));
            fp += d;
        }
        f += t;
        g += u;
        gp += e;
        if t.abs() + u.abs() + d.abs() + e.abs() < 1e-18 {
            break;
        }
    }
    (AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp)
}

// Ai(x) = e^{-zeta}/pi int_0^inf exp(-sqrt(x) y^2) cos(y^3/3) dy
fn decaying(x: f64) -> (f64, f64) {
    let sx = x.sqrt();
    let top = (46.0 / sx).sqrt();
    let (gx, gw) = gl16();
    let panels = 12;
    let width = top / panels as f64;
    let mut ai = 0.0;
    let mut dai = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * width;
        for (t, w) in gx.iter().zip(gw) {
            let y = mid + 0.5 * width * t;
            let y2 = y * y;
            let v = 0.5 * width * w * (-sx * y2).exp() * (y2 * y / 3.0).cos();
            ai += v;
            dai -= v * (sx + y2 / (2.0 * sx));
        }
    }
    let scale = (-2.0 / 3.0 * x * sx).exp() / PI;
    (scale * ai, scale * dai)
}

fn oscillating(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let jp13 = bessel_j_pair(1.0 / 3.0, zeta).0;
    let jm13 = bessel_j_pair(-1.0 / 3.0, zeta).0;
    let jp23 = bessel_j_pair(2.0 / 3.0, zeta).0;
    let jm23 = bessel_j_pair(-2.0 / 3.0, zeta).0;
    (z.sqrt() / 3.0 * (jp13 + jm13), z / 3.0 * (jp23 - jm23))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branches_agree_at_crossover() {
        for &x in &[2.0, 2.5, 3.0] {
            let a = maclaurin(x);
            let b = decaying(x);
            assert!((a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-14, "{x}");
            let a = maclaurin(-x);
            let b = oscillating(x);
            assert!((a.0 - b.0).abs() < 1e-14 && (a.1 - b.1).abs() < 1e-14, "-{x}");
        }
    }
}
