//! Special functions used by the kernels, the asymptotic formulas and the
//! parabolic-cylinder model problem.

mod airy;
mod barnes;
mod bessel;
pub(crate) mod gamma;
mod pcf;
mod wright;

pub use airy::airy_ai_with_derivative;
pub use barnes::{log_barnes_g, log_barnes_g_conjugate_pair};
pub use bessel::bessel_j_with_derivative;
pub use gamma::{gamma_real, log_gamma, log_gamma_real, EULER_GAMMA};
pub use pcf::{parabolic_cylinder_d, parabolic_cylinder_d_with_derivative};
pub use wright::{wright_bessel, Scaled, WrightFunction};
