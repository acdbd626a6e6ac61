//! The parabolic-cylinder model Riemann-Hilbert problem.
//!
//! `Phi_PC` is analytic off the five rays `R^-` and `e^{i pi/4 + j i pi/2} R^+`,
//! with piecewise constant jumps, and behaves like
//! `(I + Phi_1/z + Phi_2/z^2 + ...) z^{-i nu sigma3} e^{i z^2 sigma3 / 4}` at infinity.
//! It is built as `Psi(z) B(z)^{-1}` from parabolic cylinder functions. The
//! parameter `q` is either in `[0, 1)` or purely imaginary; the two cases give
//! `nu >= 0` and `nu < 0` and are handled by the same formulas.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::Matrix2;
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::specfun::{log_gamma, parabolic_cylinder_d, parabolic_cylinder_d_with_derivative};

pub type Matrix2C = Matrix2<C>;

/// Distance from a ray at which one-sided boundary values are sampled.
pub const BOUNDARY_OFFSET: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PCParams {
    q: C,
    nu: f64,
}

impl PCParams {
    /// `q` in `[0, 1)`.
    pub fn real(q: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&q) {
            return domain(format!("real q must lie in [0, 1), got {q}"));
        }
        Ok(PCParams { q: C::new(q, 0.0), nu: -(-q * q).ln_1p() / (2.0 * PI) })
    }

    /// `q = i b` with `b >= 0`.
    pub fn imaginary(b: f64) -> Result<Self> {
        if !(b >= 0.0 && b.is_finite()) {
            return domain(format!("imaginary q needs b >= 0, got {b}"));
        }
        Ok(PCParams { q: C::new(0.0, b), nu: -(b * b).ln_1p() / (2.0 * PI) })
    }

    /// The `q` with `nu = -log(1 - q^2) / (2 pi)`: real for `nu >= 0`, imaginary otherwise.
    pub fn from_nu(nu: f64) -> Result<Self> {
        if !nu.is_finite() {
            return domain("nu must be finite");
        }
        let m = (-2.0 * PI * nu).exp_m1();
        let q = if nu >= 0.0 { C::new((-m).sqrt(), 0.0) } else { C::new(0.0, m.sqrt()) };
        Ok(PCParams { q, nu })
    }

    pub fn q(&self) -> C {
        self.q
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// `|nu + log(1 - q^2) / (2 pi)|`.
    pub fn consistency(&self) -> f64 {
        // log(1 - q^2) as log(1 - q) + log(1 + q) keeps real q near 1 accurate
        let log_one_minus_q2 = if self.q.im == 0.0 {
            (-self.q.re).ln_1p() + self.q.re.ln_1p()
        } else {
            (self.q.im * self.q.im).ln_1p()
        };
        (self.nu + log_one_minus_q2 / (2.0 * PI)).abs()
    }
}

fn cis(t: f64) -> C {
    C::from_polar(1.0, t)
}

// (beta12, beta21), continued by zero to q = 0
fn betas(p: &PCParams) -> Result<(C, C)> {
    if p.q == C::new(0.0, 0.0) {
        return Ok((C::new(0.0, 0.0), C::new(0.0, 0.0)));
    }
    let pre = (-0.5 * PI * p.nu).exp() * (2.0 * PI).sqrt() / p.q;
    let g_plus = log_gamma(C::new(0.0, p.nu))?;
    let g_minus = log_gamma(C::new(0.0, -p.nu))?;
    Ok((cis(-3.0 * FRAC_PI_4) * pre * (-g_plus).exp(), cis(3.0 * FRAC_PI_4) * pre * (-g_minus).exp()))
}

/// `(beta12, beta21)`, the off-diagonal entries of `Phi_1`. Their product is `nu`.
pub fn beta_coefficients(p: &PCParams) -> Result<(C, C)> {
    if p.q == C::new(0.0, 0.0) {
        return domain("beta coefficients degenerate at q = 0");
    }
    betas(p)
}

/// `Phi_1 = [[0, beta12], [beta21, 0]]`, zero at `q = 0`.
pub fn phi_pc_1(p: &PCParams) -> Result<Matrix2C> {
    let (b12, b21) = betas(p)?;
    Ok(Matrix2C::new(C::new(0.0, 0.0), b12, b21, C::new(0.0, 0.0)))
}

/// `Phi_2 = diag(nu (1 + i nu) / 2, nu (1 - i nu) / 2)`.
pub fn phi_pc_2(p: &PCParams) -> Matrix2C {
    let nu = p.nu;
    Matrix2C::new(C::new(nu, nu * nu) * 0.5, C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(nu, -nu * nu) * 0.5)
}

struct Branch {
    c1: C,
    w1: C,
    c2: C,
    w2: C,
}

fn branch(nu: f64, upper: bool) -> Branch {
    let (up, down) = (C::new((0.25 * PI * nu).exp(), 0.0), C::new((-0.75 * PI * nu).exp(), 0.0));
    if upper {
        Branch { c1: up, w1: cis(-FRAC_PI_4), c2: down, w2: cis(-3.0 * FRAC_PI_4) }
    } else {
        Branch { c1: down, w1: cis(3.0 * FRAC_PI_4), c2: up, w2: cis(FRAC_PI_4) }
    }
}

/// `Psi` from the upper (`upper = true`) or lower half-plane formula, which
/// extend analytically to the real axis and give the boundary values there.
///
/// The off-diagonal entries use `(-i d/dz + z/2) D_a(w z) = -i w a D_{a-1}(w z)`
/// (valid since `w^2 = i`), and its mirror for the first column, which removes
/// the `0/0` of the derivative form as `q -> 0`.
pub fn psi_matrix_branch(z: C, p: &PCParams, upper: bool) -> Result<Matrix2C> {
    let (b12, b21) = betas(p)?;
    let a = C::new(0.0, p.nu);
    let br = branch(p.nu, upper);
    let (x1, x2) = (br.w1 * z, br.w2 * z);
    let p11 = br.c1 * parabolic_cylinder_d(-a, x1);
    let p22 = br.c2 * parabolic_cylinder_d(a, x2);
    let p12 = br.c2 * br.w2 * b12 * parabolic_cylinder_d(a - 1.0, x2);
    let p21 = br.c1 * br.w1 * b21 * parabolic_cylinder_d(-a - 1.0, x1);
    Ok(Matrix2C::new(p11, p12, p21, p22))
}

/// `Psi(z)` off the real axis.
pub fn psi_matrix(z: C, p: &PCParams) -> Result<Matrix2C> {
    if z.im == 0.0 {
        return domain(format!("Psi has a jump on the real axis, got z = {z}"));
    }
    psi_matrix_branch(z, p, z.im > 0.0)
}

/// `(Psi(z), Psi'(z))` with the derivative taken from `D_a'` directly, for
/// checking the first-order system `Psi' = (i z/2) sigma3 Psi - i [[0, b12], [-b21, 0]] Psi`.
pub fn psi_matrix_with_derivative(z: C, p: &PCParams) -> Result<(Matrix2C, Matrix2C)> {
    let psi = psi_matrix(z, p)?;
    let (b12, b21) = betas(p)?;
    let a = C::new(0.0, p.nu);
    let br = branch(p.nu, z.im > 0.0);
    let d = |order: C, w: C, c: C| c * w * parabolic_cylinder_d_with_derivative(order, w * z).1;
    let d11 = d(-a, br.w1, br.c1);
    let d22 = d(a, br.w2, br.c2);
    let d12 = d(a - 1.0, br.w2, br.c2 * br.w2 * b12);
    let d21 = d(-a - 1.0, br.w1, br.c1 * br.w1 * b21);
    Ok((psi, Matrix2C::new(d11, d12, d21, d22)))
}

/// The first-order system's right-hand side `(i z/2) sigma3 Psi - i [[0, b12], [-b21, 0]] Psi`.
pub fn psi_ode_rhs(z: C, psi: &Matrix2C, p: &PCParams) -> Result<Matrix2C> {
    let (b12, b21) = betas(p)?;
    let i = C::i();
    let s3 = Matrix2C::new(C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(-1.0, 0.0));
    let off = Matrix2C::new(C::new(0.0, 0.0), b12, -b21, C::new(0.0, 0.0));
    Ok(s3 * psi * (i * z * 0.5) - off * psi * i)
}

fn on_contour(z: C) -> bool {
    let tol = 4.0 * f64::EPSILON * z.norm();
    z.norm() == 0.0 || (z.im.abs() <= tol && z.re < 0.0) || (z.re.abs() - z.im.abs()).abs() <= tol
}

fn b_matrix(z: C, p: &PCParams) -> Matrix2C {
    let (one, zero) = (C::new(1.0, 0.0), C::new(0.0, 0.0));
    let q = p.q;
    let r = q / (1.0 - q * q);
    let t = z.arg();
    if t > 0.0 && t < FRAC_PI_4 {
        Matrix2C::new(one, -q, zero, one)
    } else if t > 3.0 * FRAC_PI_4 {
        Matrix2C::new(one, zero, r, one)
    } else if t < -3.0 * FRAC_PI_4 {
        Matrix2C::new(one, r, zero, one)
    } else if t < 0.0 && t > -FRAC_PI_4 {
        Matrix2C::new(one, zero, -q, one)
    } else {
        Matrix2C::identity()
    }
}

fn unimodular_inverse(m: &Matrix2C) -> Matrix2C {
    Matrix2C::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)])
}

fn phi_unchecked(z: C, p: &PCParams) -> Result<Matrix2C> {
    // B is unimodular; z on the positive real axis uses the upper formula, as Phi is continuous there
    let psi = psi_matrix_branch(z, p, z.im > 0.0 || (z.im == 0.0 && z.re > 0.0))?;
    Ok(psi * unimodular_inverse(&b_matrix(z, p)))
}

/// `Phi_PC(z)` for `z` off the jump contour.
pub fn phi_pc(z: C, p: &PCParams) -> Result<Matrix2C> {
    if !z.is_finite() || on_contour(z) {
        return domain(format!("Phi_PC is evaluated off its jump contour, got z = {z}"));
    }
    if z.im == 0.0 {
        // the positive real axis is not a jump of Phi; approach from above
        return phi_unchecked(C::new(z.re, f64::MIN_POSITIVE), p);
    }
    phi_unchecked(z, p)
}

/// The five rays of the contour with their orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ray {
    /// `e^{i pi/4} R^+`, oriented away from 0.
    NorthEast,
    NorthWest,
    SouthWest,
    SouthEast,
    /// `R^-`, oriented towards 0.
    NegativeReal,
}

impl Ray {
    pub const ALL: [Ray; 5] = [Ray::NorthEast, Ray::NorthWest, Ray::SouthWest, Ray::SouthEast, Ray::NegativeReal];

    /// The point at distance `r` from the origin on the ray.
    pub fn point(self, r: f64) -> C {
        match self {
            Ray::NorthEast => cis(FRAC_PI_4) * r,
            Ray::NorthWest => cis(3.0 * FRAC_PI_4) * r,
            Ray::SouthWest => cis(-3.0 * FRAC_PI_4) * r,
            Ray::SouthEast => cis(-FRAC_PI_4) * r,
            Ray::NegativeReal => C::new(-r, 0.0),
        }
    }

    /// Unit tangent in the direction of orientation.
    fn tangent(self) -> C {
        match self {
            Ray::NegativeReal => C::new(1.0, 0.0),
            _ => self.point(1.0),
        }
    }

    /// The jump `J` with `Phi_+ = Phi_- J`.
    pub fn jump(self, p: &PCParams) -> Matrix2C {
        let (one, zero) = (C::new(1.0, 0.0), C::new(0.0, 0.0));
        let q = p.q;
        let s = 1.0 - q * q;
        match self {
            Ray::NorthEast => Matrix2C::new(one, -q, zero, one),
            Ray::NorthWest => Matrix2C::new(one, zero, -q / s, one),
            Ray::SouthWest => Matrix2C::new(one, q / s, zero, one),
            Ray::SouthEast => Matrix2C::new(one, zero, q, one),
            Ray::NegativeReal => Matrix2C::new(1.0 / s, zero, zero, s),
        }
    }
}

/// One-sided boundary value of `Phi_PC` at `z` on `ray`: `plus` is the side to
/// the left of the orientation. Sampled at distances `BOUNDARY_OFFSET` and
/// twice that along the normal and extrapolated linearly to the ray.
pub fn phi_pc_boundary(z: C, ray: Ray, plus: bool, p: &PCParams) -> Result<Matrix2C> {
    let normal = C::i() * ray.tangent() * if plus { 1.0 } else { -1.0 };
    let near = phi_pc(z + normal * BOUNDARY_OFFSET, p)?;
    let far = phi_pc(z + normal * (2.0 * BOUNDARY_OFFSET), p)?;
    Ok(near * C::new(2.0, 0.0) - far)
}

fn max_entry(m: &Matrix2C) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `max |Phi_+ - Phi_- J| / max(1, |Phi_-|)` at the point of `ray` at distance `r`.
pub fn jump_residual(ray: Ray, r: f64, p: &PCParams) -> Result<f64> {
    let z = ray.point(r);
    let plus = phi_pc_boundary(z, ray, true, p)?;
    let minus = phi_pc_boundary(z, ray, false, p)?;
    Ok(max_entry(&(plus - minus * ray.jump(p))) / max_entry(&minus).max(1.0))
}

/// `Psi_-(0)^{-1} Psi_+(0)`, which should be `[[1, -q], [q, 1 - q^2]]`.
pub fn psi_jump_at_origin(p: &PCParams) -> Result<Matrix2C> {
    let zero = C::new(0.0, 0.0);
    let up = psi_matrix_branch(zero, p, true)?;
    let down = psi_matrix_branch(zero, p, false)?;
    Ok(unimodular_inverse(&down) / down.determinant() * up)
}

/// Directions for the checks at infinity, each `pi/16` away from the nearest ray.
pub fn check_directions() -> [f64; 8] {
    let t = PI / 16.0;
    [3.0 * t, 5.0 * t, 11.0 * t, 13.0 * t, -3.0 * t, -5.0 * t, -11.0 * t, -13.0 * t]
}

// Phi(z) z^{i nu sigma3} e^{-i z^2 sigma3 / 4}, which tends to I
fn normalized(z: C, p: &PCParams) -> Result<Matrix2C> {
    let phi = phi_pc(z, p)?;
    let i = C::i();
    let f = (-i * z * z * 0.25 + i * p.nu * z.ln()).exp();
    let g = (i * z * z * 0.25 - i * p.nu * z.ln()).exp();
    Ok(Matrix2C::new(phi[(0, 0)] * f, phi[(0, 1)] * g, phi[(1, 0)] * f, phi[(1, 1)] * g))
}

/// `max |z (Phi(z) z^{i nu sigma3} e^{-i z^2 sigma3/4} - I) - Phi_1|` over the
/// check directions at `|z| = radius`; decays like `1/radius`.
pub fn asymptotic_coefficient_check(p: &PCParams, radius: f64) -> Result<f64> {
    if !(radius >= 10.0) {
        return domain(format!("asymptotic check needs radius >= 10, got {radius}"));
    }
    let phi1 = phi_pc_1(p)?;
    let mut worst: f64 = 0.0;
    for t in check_directions() {
        let z = cis(t) * radius;
        let m = (normalized(z, p)? - Matrix2C::identity()) * z - phi1;
        worst = worst.max(max_entry(&m));
    }
    Ok(worst)
}

/// Largest deviation of the diagonal of `z^2 (Phi z^{i nu sigma3} e^{-i z^2 sigma3/4} - I - Phi_1/z)`
/// from the diagonal of `Phi_2` over the check directions; decays like `1/radius^2`.
pub fn second_coefficient_check(p: &PCParams, radius: f64) -> Result<f64> {
    if !(radius >= 10.0) {
        return domain(format!("asymptotic check needs radius >= 10, got {radius}"));
    }
    let phi1 = phi_pc_1(p)?;
    let phi2 = phi_pc_2(p);
    let mut worst: f64 = 0.0;
    for t in check_directions() {
        let z = cis(t) * radius;
        let m = (normalized(z, p)? - Matrix2C::identity() - phi1 / z) * (z * z);
        worst = worst.max((m[(0, 0)] - phi2[(0, 0)]).norm()).max((m[(1, 1)] - phi2[(1, 1)]).norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcReport {
    pub q_re: f64,
    pub q_im: f64,
    pub nu: f64,
    pub beta_product_residual: f64,
    /// Worst jump residual per ray, over the radii checked.
    pub jump_residuals: Vec<(Ray, f64)>,
    pub origin_jump_residual: f64,
    pub asymptotic_residuals: Vec<(f64, f64)>,
    /// Ratio of the residual at the largest radius to the one at the smallest.
    pub halving_ratio: f64,
}

/// All checks of the model problem at the given radii (jumps) and `(10 R, 20 R)`-style
/// pairs `asym_radii` for the behaviour at infinity.
pub fn verify(p: &PCParams, jump_radii: &[f64], asym_radii: &[f64]) -> Result<PcReport> {
    let beta_product_residual = if p.q == C::new(0.0, 0.0) {
        0.0
    } else {
        let (b12, b21) = beta_coefficients(p)?;
        (b12 * b21 - p.nu).norm()
    };
    let mut jump_residuals = Vec::new();
    for ray in Ray::ALL {
        let mut worst: f64 = 0.0;
        for &r in jump_radii {
            worst = worst.max(jump_residual(ray, r, p)?);
        }
        jump_residuals.push((ray, worst));
    }
    let q = p.q;
    let expected = Matrix2C::new(C::new(1.0, 0.0), -q, q, 1.0 - q * q);
    let origin_jump_residual = max_entry(&(psi_jump_at_origin(p)? - expected));
    let asymptotic_residuals = asym_radii
        .iter()
        .map(|&r| Ok((r, asymptotic_coefficient_check(p, r)?)))
        .collect::<Result<Vec<_>>>()?;
    let halving_ratio = match (asymptotic_residuals.first(), asymptotic_residuals.last()) {
        (Some(a), Some(b)) if asymptotic_residuals.len() > 1 && a.1 > 0.0 => b.1 / a.1,
        _ => f64::NAN,
    };
    Ok(PcReport {
        q_re: q.re,
        q_im: q.im,
        nu: p.nu,
        beta_product_residual,
        jump_residuals,
        origin_jump_residual,
        asymptotic_residuals,
        halving_ratio,
    })
}
