//! Numerics for the four universal edge point processes of random matrix
//! theory: the Airy, Bessel, Wright generalized Bessel and Meijer-G processes.
//!
//! The crate evaluates their correlation kernels, computes exponential moments
//! `E[exp(-2 pi nu N(s))]` as Fredholm determinants, evaluates the closed-form
//! large-gap asymptotics, and checks global rigidity on sampled random matrices.

pub mod asymptotics;
pub mod error;
pub mod fredholm;
pub mod kernels;
pub mod pcmodel;
pub mod quadrature;
pub mod rigidity;
pub mod rmt_sampling;
pub mod specfun;

pub use error::{Error, Result};
pub use kernels::ProcessSpec;
pub use num_complex::Complex64;
