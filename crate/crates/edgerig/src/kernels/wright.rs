use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::quadrature::gl16;
use crate::specfun::WrightFunction;

// Above this many nepers of cancellation the [1, inf) form is used instead.
const TAIL_SWITCH: f64 = 12.0;
// Terms smaller than exp(-CUTOFF) relative to the entry scale are dropped.
const CUTOFF: f64 = 40.0;
// Largest oscillation phase (radians) handed to one 16-point panel.
const PANEL_PHASE: f64 = 14.0;

pub(crate) fn gauge(theta: f64) -> (f64, f64) {
    let rho = theta / (1.0 + theta);
    (rho, (1.0 + theta) * theta.powf(-rho) * (PI / (1.0 + theta)).cos())
}

/// The Wright kernel
///
///   K(x, y) = theta (xy)^{alpha/2} int_0^1 J_{(alpha+1)/theta, 1/theta}(xt) J_{alpha+1, theta}((yt)^theta) t^alpha dt.
///
/// With `phi(u) = J_{(alpha+1)/theta,1/theta}(u)` of size `exp(-G u^rho)` and
/// `psi(u) = J_{alpha+1,theta}(u^theta)` of size `exp(G u^rho)`, the integrand
/// behaves like `exp(-G t^rho (x^rho - y^rho))`. When that decays in `t` the
/// integral over [0, 1] is a small number built from order-one terms, and the
/// kernel is evaluated as minus the integral over [1, inf) instead (the
/// integral over the whole half-line vanishes for x != y).
///
/// Quadrature runs in `w = t^rho`, where both factors oscillate at a constant rate.
#[derive(Debug, Clone)]
pub struct WrightKernel {
    theta: f64,
    alpha: f64,
    rho: f64,
    g: f64,
    omega: f64,
    phi: WrightFunction,
    psi: WrightFunction,
}

struct Grid {
    w: Vec<f64>,
    ln_t: Vec<f64>,
    c: Vec<f64>,
}

impl WrightKernel {
    pub fn new(theta: f64, alpha: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite() && alpha > -1.0 && alpha.is_finite()) {
            return domain(format!("wright kernel needs theta > 0 and alpha > -1, got ({theta}, {alpha})"));
        }
        let (rho, g) = gauge(theta);
        Ok(Self {
            theta,
            alpha,
            rho,
            g,
            omega: (1.0 + theta) * theta.powf(-rho) * (PI / (1.0 + theta)).sin(),
            phi: WrightFunction::new((alpha + 1.0) / theta, 1.0 / theta)?,
            psi: WrightFunction::new(alpha + 1.0, theta)?,
        })
    }

    /// `(rho, G)` of the balanced gauge.
    pub fn gauge(&self) -> (f64, f64) {
        (self.rho, self.g)
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let d = self.g * (x.powf(self.rho) - y.powf(self.rho));
        let k = self.block(&[x], &[y], d.max(TAIL_SWITCH))?;
        Ok(k[0] * (-d).exp())
    }

    /// Row-major `exp(G (x_i^rho - y_j^rho)) K(x_i, y_j)`.
    pub fn balanced_block(&self, xs: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
        self.block(xs, ys, TAIL_SWITCH)
    }

    fn block(&self, xs: &[f64], ys: &[f64], tail_floor: f64) -> Result<Vec<f64>> {
        if let Some(v) = xs.iter().chain(ys).find(|v| !(**v > 0.0 && v.is_finite())) {
            return domain(format!("wright kernel needs x, y > 0, got {v}"));
        }
        let smax = xs.iter().chain(ys).fold(0.0f64, |a, &b| a.max(b));
        let xr: Vec<f64> = xs.iter().map(|x| x.powf(self.rho)).collect();
        let yr: Vec<f64> = ys.iter().map(|y| y.powf(self.rho)).collect();
        let needs_tail = xr.iter().any(|a| yr.iter().any(|b| self.g * (a - b) > TAIL_SWITCH));

        let head = self.grid(&self.head_edges(smax));
        let tail_grid = needs_tail.then(|| self.grid(&self.tail_edges(smax, tail_floor)));
        // tabulate phi and psi once when many (point, node) pairs need them
        let (tp, tq) = if xs.len() + ys.len() > 8 {
            let top = smax.powf(self.rho) * tail_grid.as_ref().map_or(1.0, |t| t.w[t.w.len() - 1]);
            (Some(self.tables(true, top)), Some(self.tables(false, top)))
        } else {
            (None, None)
        };
        let hp = self.columns(xs, &xr, &head, true, tp.as_ref());
        let hq = self.columns(ys, &yr, &head, false, tq.as_ref());
        let tail = tail_grid.map(|t| {
            let a = self.columns(xs, &xr, &t, true, tp.as_ref());
            let b = self.columns(ys, &yr, &t, false, tq.as_ref());
            (t, a, b)
        });

        let (nh, ny) = (head.w.len(), ys.len());
        let mut out = vec![0.0; xs.len() * ny];
        for (i, x) in xs.iter().enumerate() {
            for (j, y) in ys.iter().enumerate() {
                let d = self.g * (xr[i] - yr[j]);
                let k = if d > TAIL_SWITCH {
                    let (t, tp, tq) = tail.as_ref().expect("tail grid");
                    let n = t.w.len();
                    let (p, q) = (&tp[i * n..(i + 1) * n], &tq[j * n..(j + 1) * n]);
                    let mut s = 0.0;
                    for l in 0..n {
                        let f = d * (1.0 - t.w[l]);
                        if f < -CUTOFF {
                            break;
                        }
                        s += t.c[l] * p[l] * q[l] * f.exp();
                    }
                    -s
                } else {
                    let (p, q) = (&hp[i * nh..(i + 1) * nh], &hq[j * nh..(j + 1) * nh]);
                    let mut s = 0.0;
                    if d == 0.0 {
                        for l in 0..nh {
                            s += head.c[l] * p[l] * q[l];
                        }
                    } else {
                        for l in (0..nh).rev() {
                            let f = d * (1.0 - head.w[l]);
                            if f < -CUTOFF {
                                break;
                            }
                            s += head.c[l] * p[l] * q[l] * f.exp();
                        }
                    }
                    s
                };
                out[i * ny + j] = self.theta * (x * y).powf(0.5 * self.alpha) * k;
            }
        }
        Ok(out)
    }

    fn rate(&self, smax: f64) -> f64 {
        (2.0 * self.omega + self.g.abs()) * smax.powf(self.rho)
    }

    fn head_edges(&self, smax: f64) -> Vec<f64> {
        let panels = ((self.rate(smax) / PANEL_PHASE).ceil() as usize).max(2);
        let h = 1.0 / panels as f64;
        // geometric grading resolves the w^{(alpha+1)/rho - 1} behavior at 0
        let levels = ((23.0 * self.rho / (self.alpha + 1.0)).ceil() as i32).clamp(1, 60);
        let mut edges = vec![0.0];
        for k in (1..=levels).rev() {
            edges.push(h * 0.2f64.powi(k));
        }
        edges.extend((1..=panels).map(|k| k as f64 * h));
        edges
    }

    fn tail_edges(&self, smax: f64, floor: f64) -> Vec<f64> {
        let span = CUTOFF / floor;
        let panels = ((self.rate(smax) * span / PANEL_PHASE).ceil() as usize).max(2);
        (0..=panels).map(|k| 1.0 + span * k as f64 / panels as f64).collect()
    }

    fn grid(&self, edges: &[f64]) -> Grid {
        let (gx, gw) = gl16();
        let n = 16 * (edges.len() - 1);
        let mut g = Grid {
            w: Vec::with_capacity(n),
            ln_t: Vec::with_capacity(n),
            c: Vec::with_capacity(n),
        };
        // dt t^alpha = (1/rho) w^{(alpha+1)/rho - 1} dw
        let power = (self.alpha + 1.0) / self.rho - 1.0;
        for cell in edges.windows(2) {
            let half = 0.5 * (cell[1] - cell[0]);
            let mid = 0.5 * (cell[1] + cell[0]);
            for (x, v) in gx.iter().zip(gw) {
                let w = mid + half * x;
                let lw = w.ln();
                g.w.push(w);
                g.ln_t.push(lw / self.rho);
                g.c.push(half * v / self.rho * (power * lw).exp());
            }
        }
        g
    }

    // phi(u) exp(G u^rho) or psi(u) exp(-G u^rho), both of order one
    fn gauged(&self, first: bool, ln_u: f64, v: f64) -> f64 {
        if first {
            let s = self.phi.eval_ln(ln_u);
            s.m * (s.e + self.g * v).exp()
        } else {
            let s = self.psi.eval_ln(self.theta * ln_u);
            s.m * (s.e - self.g * v).exp()
        }
    }

    // Gauged values in v = u^rho from `width` up, and near 0 the raw function in
    // z = u (phi) or z = u^theta (psi), where both are entire.
    fn tables(&self, first: bool, v_max: f64) -> Tables {
        let width = (6.0 / self.omega).min(4.0);
        let panels = ((v_max - width) / width).ceil().max(1.0) as usize;
        let far = Interpolant::new(width, width, panels, |v| self.gauged(first, v.ln() / self.rho, v));
        let power = if first { 1.0 / self.rho } else { 1.0 + self.theta };
        let z_lo = width.powf(power);
        let near = Interpolant::new(0.0, 0.25 * z_lo, 4, |z| {
            if z == 0.0 {
                return if first { self.phi.eval(0.0).value() } else { self.psi.eval(0.0).value() };
            }
            let ln_u = if first { z.ln() } else { z.ln() / self.theta };
            self.gauged(first, ln_u, (self.rho * ln_u).exp()) * (if first { -self.g } else { self.g } * z.powf(1.0 / power)).exp()
        });
        Tables { far, near, power }
    }

    // row-major over (point, node)
    fn columns(&self, pts: &[f64], pr: &[f64], grid: &Grid, first: bool, table: Option<&Tables>) -> Vec<f64> {
        let n = grid.w.len();
        let mut out = Vec::with_capacity(pts.len() * n);
        let sign = if first { self.g } else { -self.g };
        for (p, r) in pts.iter().zip(pr) {
            let lp = p.ln();
            for l in 0..n {
                let v = r * grid.w[l];
                let val = match table {
                    Some(t) if v >= t.far.lo => t.far.eval(v),
                    Some(t) => t.near.eval(v.powf(t.power)) * (sign * v).exp(),
                    None => self.gauged(first, lp + grid.ln_t[l], v),
                };
                out.push(val);
            }
        }
        out
    }
}

struct Tables {
    far: Interpolant,
    near: Interpolant,
    power: f64,
}

const DEG: usize = 24;

/// Piecewise Chebyshev interpolation on equal panels starting at `lo`.
struct Interpolant {
    lo: f64,
    width: f64,
    panels: usize,
    vals: Vec<f64>,
    nodes: [f64; DEG + 1],
}

impl Interpolant {
    fn new(lo: f64, width: f64, panels: usize, f: impl Fn(f64) -> f64) -> Self {
        let mut nodes = [0.0; DEG + 1];
        for (k, x) in nodes.iter_mut().enumerate() {
            *x = (PI * k as f64 / DEG as f64).cos();
        }
        let mut vals = Vec::with_capacity(panels * (DEG + 1));
        for p in 0..panels {
            let a = lo + p as f64 * width;
            for x in &nodes {
                vals.push(f(a + 0.5 * width * (1.0 + x)));
            }
        }
        Self {
            lo,
            width,
            panels,
            vals,
            nodes,
        }
    }

    fn eval(&self, v: f64) -> f64 {
        let p = (((v - self.lo) / self.width) as usize).min(self.panels - 1);
        let x = 2.0 * (v - self.lo - p as f64 * self.width) / self.width - 1.0;
        let f = &self.vals[p * (DEG + 1)..(p + 1) * (DEG + 1)];
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..=DEG {
            let d = x - self.nodes[k];
            if d == 0.0 {
                return f[k];
            }
            let mut w = if k % 2 == 0 { 1.0 } else { -1.0 };
            if k == 0 || k == DEG {
                w *= 0.5;
            }
            num += w * f[k] / d;
            den += w / d;
        }
        num / den
    }
}

/// K^Wr(x, y) for a single pair.
pub fn wright_kernel(theta: f64, alpha: f64, x: f64, y: f64) -> Result<f64> {
    WrightKernel::new(theta, alpha)?.eval(x, y)
}
