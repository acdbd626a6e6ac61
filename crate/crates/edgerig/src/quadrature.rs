//! Gauss-Legendre rules.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Nodes and weights of a quadrature rule on a finite interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: (f64, f64),
}

impl QuadratureRule {
    /// `n`-point Gauss-Legendre rule on `[a, b]`.
    pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return domain("a quadrature rule needs at least one node");
        }
        if !(a.is_finite() && b.is_finite() && a < b) {
            return domain(format!("bad interval ({a}, {b})"));
        }
        let (x, w) = legendre(n);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        Ok(Self {
            nodes: x.iter().map(|t| mid + half * t).collect(),
            weights: w.iter().map(|v| half * v).collect(),
            interval: (a, b),
        })
    }

    /// Composite rule: `order`-point Gauss-Legendre on each cell of `edges`.
    pub fn composite(edges: &[f64], order: usize) -> Result<Self> {
        if edges.len() < 2 {
            return domain("composite rule needs at least two edges");
        }
        let (x, w) = legendre(order);
        let mut nodes = Vec::with_capacity(order * (edges.len() - 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        for cell in edges.windows(2) {
            let (a, b) = (cell[0], cell[1]);
            if !(b > a) {
                return domain("composite edges must increase");
            }
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (t, v) in x.iter().zip(&w) {
                nodes.push(mid + half * t);
                weights.push(half * v);
            }
        }
        Ok(Self {
            nodes,
            weights,
            interval: (edges[0], edges[edges.len() - 1]),
        })
    }

    /// Gauss-Legendre of individual order on each `(a, b, order)` cell.
    pub fn panels(cells: &[(f64, f64, usize)]) -> Result<Self> {
        if cells.is_empty() {
            return domain("a panel rule needs at least one cell");
        }
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for &(a, b, n) in cells {
            let r = Self::gauss_legendre(n, a, b)?;
            nodes.extend(r.nodes);
            weights.extend(r.weights);
        }
        Ok(Self {
            nodes,
            weights,
            interval: (cells[0].0, cells[cells.len() - 1].1),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss-Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_p(n, z);
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let dp = legendre_p(n, z).1;
        let wt = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wt;
        w[n - 1 - i] = wt;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_p(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Cached 16-point rule on `[-1, 1]`, the panel rule used by the contour code.
pub fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| legendre(16))
}
