//! Special functions and one-dimensional quadrature.
//!
//! Everything here is a pure function of its arguments. The Gamma function uses
//! a Lanczos approximation, the incomplete Beta function a continued fraction,
//! and [`integrate`] a globally adaptive Gauss-Kronrod scheme with optional
//! endpoint substitutions for inverse-square-root singularities.

mod beta;
mod gamma;
mod quad;
mod sum;

pub use beta::{beta, incomplete_beta, regularized_incomplete_beta};
pub use gamma::{chi_square_sf, gamma, ln_gamma, regularized_gamma_q};
pub use quad::{integrate, Endpoints, Estimate, QuadratureSpec};
pub use sum::NeumaierSum;

/// Surface volume of the unit sphere `S^{m-1}` in `R^m`.
pub fn unit_sphere_volume(m: usize) -> f64 {
    let h = m as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(h) / gamma(h).expect("m >= 1")
}

/// Volume of the unit ball `B^m` in `R^m`.
pub fn unit_ball_volume(m: usize) -> f64 {
    if m == 0 {
        return 1.0;
    }
    unit_sphere_volume(m) / m as f64
}
