//! Correlation kernels of the four edge processes.
//!
//! Airy and Bessel kernels are closed forms in special functions. The Wright
//! kernel is evaluated from its defining integral over `t in [0, 1]`, and the
//! Meijer-G kernel (and optionally the Wright kernel) from a double contour
//! integral of Mellin-Barnes type.
//!
//! For Nystrom discretizations the evaluator returns matrices in a *balanced
//! gauge* `K^(x_i, x_j) = exp(G (x_i^rho - x_j^rho)) K(x_i, x_j)`. This is a
//! diagonal similarity, so determinants and traces are unchanged, but it
//! keeps every entry of order one where the raw kernel spans hundreds of
//! orders of magnitude.

mod contour;
mod wright;

use serde::{Deserialize, Serialize};

pub use contour::{double_contour_kernel, meijer_kernel, ContourKernel, ContourSpec};
pub use wright::{wright_kernel, WrightKernel};

use crate::error::{domain, Error, Result};
use crate::specfun::{airy_ai_with_derivative, bessel_j_with_derivative, log_gamma_real};

/// One of the four limit processes, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProcessSpec {
    Airy,
    Bessel {
        alpha: f64,
    },
    Wright {
        theta: f64,
        alpha: f64,
    },
    /// `r = nu.len()`, `q = mu.len()`.
    #[serde(rename = "meijer")]
    MeijerG {
        nu: Vec<f64>,
        #[serde(default)]
        mu: Vec<f64>,
    },
}

impl ProcessSpec {
    pub fn bessel(alpha: f64) -> Result<Self> {
        let s = Self::Bessel { alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn wright(theta: f64, alpha: f64) -> Result<Self> {
        let s = Self::Wright { theta, alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn meijer(nu: Vec<f64>, mu: Vec<f64>) -> Result<Self> {
        let s = Self::MeijerG { nu, mu };
        s.validate()?;
        Ok(s)
    }

    /// Meijer-G parameters equivalent to the Wright process with theta = 1/r.
    pub fn meijer_from_wright(r: usize, alpha: f64) -> Result<Self> {
        let nu = (0..r).map(|j| alpha + j as f64 / r as f64).collect();
        Self::meijer(nu, Vec::new())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        match self {
            Self::Airy => Ok(()),
            Self::Bessel { alpha } => {
                if !(*alpha > -1.0 && alpha.is_finite()) {
                    return bad(format!("bessel process needs alpha > -1, got {alpha}"));
                }
                Ok(())
            }
            Self::Wright { theta, alpha } => {
                if !(*theta > 0.0 && theta.is_finite()) {
                    return bad(format!("wright process needs theta > 0, got {theta}"));
                }
                if !(*alpha > -1.0 && alpha.is_finite()) {
                    return bad(format!("wright process needs alpha > -1, got {alpha}"));
                }
                Ok(())
            }
            Self::MeijerG { nu, mu } => {
                if nu.is_empty() {
                    return bad("meijer process needs r >= 1".into());
                }
                if mu.len() >= nu.len() {
                    return bad(format!("meijer process needs r > q, got r = {}, q = {}", nu.len(), mu.len()));
                }
                if let Some(v) = nu.iter().find(|v| !(**v > -1.0 && v.is_finite())) {
                    return bad(format!("meijer process needs nu_j > -1, got {v}"));
                }
                for (k, (m, n)) in mu.iter().zip(nu).enumerate() {
                    if !(m.is_finite() && *m > 0.0 && m > n) {
                        return bad(format!("meijer process needs mu_{} > max(0, nu_{}), got {m}", k + 1, k + 1));
                    }
                }
                Ok(())
            }
        }
    }

    /// Short label used in file names and reports.
    pub fn label(&self) -> String {
        match self {
            Self::Airy => "airy".into(),
            Self::Bessel { alpha } => format!("bessel(alpha={alpha})"),
            Self::Wright { theta, alpha } => format!("wright(theta={theta},alpha={alpha})"),
            Self::MeijerG { nu, mu } => format!("meijer(nu={nu:?},mu={mu:?})"),
        }
    }

    pub fn is_hard_edge(&self) -> bool {
        !matches!(self, Self::Airy)
    }

    /// `(rho, Omega)`: eigenfunctions oscillate like `exp(i Omega x^rho)` (for Airy in `|x|`).
    pub(crate) fn oscillation(&self) -> (f64, f64) {
        use std::f64::consts::PI;
        match self {
            Self::Airy => (1.5, 2.0 / 3.0),
            Self::Bessel { .. } => (0.5, 1.0),
            Self::Wright { theta, .. } => {
                let rho = theta / (1.0 + theta);
                (rho, (1.0 + theta) * theta.powf(-rho) * (PI / (1.0 + theta)).sin())
            }
            Self::MeijerG { nu, mu } => {
                let k = (1 + nu.len() - mu.len()) as f64;
                (1.0 / k, k * (PI / k).sin())
            }
        }
    }

    /// `a` with `K(x, x) ~ x^a` as `x -> 0` (hard edges only).
    pub(crate) fn edge_exponent(&self) -> f64 {
        match self {
            Self::Airy => 0.0,
            Self::Bessel { alpha } | Self::Wright { alpha, .. } => *alpha,
            Self::MeijerG { nu, .. } => nu.iter().fold(f64::INFINITY, |a, &b| a.min(b)),
        }
    }

    /// `(rho, G)`: the entries of the kernel grow or decay like `exp(-+G x^rho)`.
    pub(crate) fn gauge(&self) -> (f64, f64) {
        match self {
            Self::Airy | Self::Bessel { .. } => (0.5, 0.0),
            Self::Wright { theta, .. } => wright::gauge(*theta),
            Self::MeijerG { nu, mu } => {
                let k = (1 + nu.len() - mu.len()) as f64;
                (1.0 / k, k * (std::f64::consts::PI / k).cos())
            }
        }
    }
}

/// The Airy kernel (Ai(x)Ai'(y) - Ai'(x)Ai(y)) / (x - y).
pub fn airy_kernel(x: f64, y: f64) -> f64 {
    let (ax, dx) = airy_ai_with_derivative(x);
    let (ay, dy) = airy_ai_with_derivative(y);
    airy_from_values(x, ax, dx, y, ay, dy)
}

const DIAGONAL_GAP: f64 = 1e-6;

fn airy_from_values(x: f64, ax: f64, dx: f64, y: f64, ay: f64, dy: f64) -> f64 {
    if (x - y).abs() < DIAGONAL_GAP {
        let m = 0.5 * (x + y);
        let (a, d) = if x == y {
            (ax, dx)
        } else {
            airy_ai_with_derivative(m)
        };
        return d * d - m * a * a;
    }
    (ax * dy - dx * ay) / (x - y)
}

/// The Bessel kernel
/// (J(sqrt x) sqrt(y) J'(sqrt y) - sqrt(x) J'(sqrt x) J(sqrt y)) / (2 (x - y)).
pub fn bessel_kernel(alpha: f64, x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return domain(format!("bessel kernel needs x, y > 0, got ({x}, {y})"));
    }
    let bx = BesselNode::new(alpha, x)?;
    let by = BesselNode::new(alpha, y)?;
    Ok(bessel_from_nodes(alpha, &bx, &by))
}

#[derive(Clone, Copy)]
struct BesselNode {
    x: f64,
    root: f64,
    j: f64,
    dj: f64,
}

impl BesselNode {
    fn new(alpha: f64, x: f64) -> Result<Self> {
        let root = x.sqrt();
        let (j, dj) = bessel_j_with_derivative(alpha, root)?;
        Ok(Self { x, root, j, dj })
    }
}

// Below this both-point bound the closed form cancels (its leading terms agree
// to relative order |x - y|) and the double series is used instead.
const BESSEL_SERIES: f64 = 2.0;

// K = (1/4) int_0^1 J(sqrt(tx)) J(sqrt(ty)) dt
//   = (1/4) (xy/16)^{alpha/2} sum_{k,l} a_k(x) a_l(y) / (alpha + k + l + 1)
fn bessel_series(alpha: f64, x: f64, y: f64) -> f64 {
    let coeffs = |z: f64| {
        let mut c = Vec::with_capacity(24);
        let mut t = (-log_gamma_real(alpha + 1.0).unwrap_or(0.0)).exp();
        for k in 0..40 {
            c.push(t);
            if t.abs() < 1e-18 * c[0].abs() {
                break;
            }
            t *= -0.25 * z / ((k as f64 + 1.0) * (k as f64 + 1.0 + alpha));
        }
        c
    };
    let (cx, cy) = (coeffs(x), coeffs(y));
    let mut s = 0.0;
    for (k, a) in cx.iter().enumerate() {
        for (l, b) in cy.iter().enumerate() {
            s += a * b / (alpha + (k + l) as f64 + 1.0);
        }
    }
    0.25 * (x * y / 16.0).powf(0.5 * alpha) * s
}

fn bessel_from_nodes(alpha: f64, a: &BesselNode, b: &BesselNode) -> f64 {
    if a.x.max(b.x) <= BESSEL_SERIES {
        return bessel_series(alpha, a.x, b.x);
    }
    if (a.x - b.x).abs() < DIAGONAL_GAP * a.x.max(1.0) {
        let m = 0.5 * (a.x + b.x);
        let n = if a.x == b.x {
            *a
        } else {
            match BesselNode::new(alpha, m) {
                Ok(n) => n,
                Err(_) => return f64::NAN,
            }
        };
        // J_{a+1} = (a/u) J_a - J_a' and J_{a-1} = (a/u) J_a + J_a'
        let u = n.root;
        let jp = alpha / u * n.j - n.dj;
        let jm = alpha / u * n.j + n.dj;
        return 0.25 * (n.j * n.j - jp * jm);
    }
    (a.j * b.root * b.dj - a.root * a.dj * b.j) / (2.0 * (a.x - b.x))
}

enum Route {
    Airy,
    Bessel(f64),
    Wright(WrightKernel),
    Contour(ContourSpec),
}

/// Kernel of a [`ProcessSpec`], ready for pointwise or matrix evaluation.
pub struct KernelEvaluator {
    spec: ProcessSpec,
    route: Route,
}

impl KernelEvaluator {
    /// Default route: closed forms for Airy and Bessel, the t-integral for
    /// Wright and the double contour integral for Meijer-G.
    pub fn new(spec: &ProcessSpec) -> Result<Self> {
        spec.validate()?;
        let route = match spec {
            ProcessSpec::Airy => Route::Airy,
            ProcessSpec::Bessel { alpha } => Route::Bessel(*alpha),
            ProcessSpec::Wright { theta, alpha } => Route::Wright(WrightKernel::new(*theta, *alpha)?),
            ProcessSpec::MeijerG { .. } => Route::Contour(ContourSpec::default_for(spec)?),
        };
        Ok(Self {
            spec: spec.clone(),
            route,
        })
    }

    /// Force the double contour route (Wright or Meijer-G only).
    pub fn with_contour(spec: &ProcessSpec, contour: ContourSpec) -> Result<Self> {
        spec.validate()?;
        contour.check(spec)?;
        Ok(Self {
            spec: spec.clone(),
            route: Route::Contour(contour),
        })
    }

    pub fn spec(&self) -> &ProcessSpec {
        &self.spec
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        match &self.route {
            Route::Airy => Ok(airy_kernel(x, y)),
            Route::Bessel(a) => bessel_kernel(*a, x, y),
            Route::Wright(w) => w.eval(x, y),
            Route::Contour(c) => double_contour_kernel(&self.spec, c, x, y),
        }
    }

    /// Row-major `m x m` matrix of the balanced kernel on `nodes`.
    pub fn balanced_matrix(&self, nodes: &[f64]) -> Result<Vec<f64>> {
        let m = nodes.len();
        match &self.route {
            Route::Airy => {
                let v: Vec<(f64, f64)> = nodes.iter().map(|&x| airy_ai_with_derivative(x)).collect();
                let mut out = vec![0.0; m * m];
                for i in 0..m {
                    for j in 0..m {
                        let (a, b) = (v[i], v[j]);
                        out[i * m + j] = airy_from_values(nodes[i], a.0, a.1, nodes[j], b.0, b.1);
                    }
                }
                Ok(out)
            }
            Route::Bessel(alpha) => {
                if let Some(x) = nodes.iter().find(|x| !(**x > 0.0)) {
                    return domain(format!("bessel kernel needs x > 0, got {x}"));
                }
                let v = nodes
                    .iter()
                    .map(|&x| BesselNode::new(*alpha, x))
                    .collect::<Result<Vec<_>>>()?;
                let mut out = vec![0.0; m * m];
                for i in 0..m {
                    for j in i..m {
                        let k = bessel_from_nodes(*alpha, &v[i], &v[j]);
                        out[i * m + j] = k;
                        out[j * m + i] = k;
                    }
                }
                Ok(out)
            }
            Route::Wright(w) => w.balanced_block(nodes, nodes),
            Route::Contour(c) => ContourKernel::new(&self.spec, c, nodes, nodes)?.balanced_block(nodes, nodes),
        }
    }
}

/// `max |K^Wr_{1,alpha}(x, y) - 4 K^Be_alpha(4x, 4y)|` over `grid x grid`.
pub fn wright_bessel_identity_error(alpha: f64, grid: &[f64]) -> Result<f64> {
    let w = WrightKernel::new(1.0, alpha)?;
    let mut worst: f64 = 0.0;
    for &x in grid {
        for &y in grid {
            worst = worst.max((w.eval(x, y)? - 4.0 * bessel_kernel(alpha, 4.0 * x, 4.0 * y)?).abs());
        }
    }
    Ok(worst)
}

/// `max |(x/y)^{alpha/2} K^Me(x, y) - r^r K^Wr_{1/r,alpha}(r^r x, r^r y)|` over
/// `grid x grid`, with Meijer-G parameters `nu_j = alpha + (j-1)/r`.
pub fn meijer_wright_identity_error(r: usize, alpha: f64, grid: &[f64]) -> Result<f64> {
    let spec = ProcessSpec::meijer_from_wright(r, alpha)?;
    let w = WrightKernel::new(1.0 / r as f64, alpha)?;
    let scale = (r as f64).powi(r as i32);
    let mut worst: f64 = 0.0;
    for &x in grid {
        for &y in grid {
            let lhs = (x / y).powf(0.5 * alpha) * meijer_kernel(&spec, x, y)?;
            worst = worst.max((lhs - scale * w.eval(scale * x, scale * y)?).abs());
        }
    }
    Ok(worst)
}
