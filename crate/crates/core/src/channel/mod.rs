//! Evolution of phase-space functions through the thermal channel.
//!
//! Two routes that share no code with the closed forms in [`crate::wigner`]:
//! Gaussian-kernel convolution of the initial function, and direct
//! finite-difference integration of the drift–diffusion equation
//! `∂W/∂(γt) = ½(∂_q q + ∂_p p)W + ((2n+1)/8)(∂²_q + ∂²_p)W`.

mod convolution;
mod fokker_planck;

pub use convolution::{convolve_evolve, convolve_grid, ConvolutionSpec};
pub use fokker_planck::{fokker_planck_evolve, FokkerPlanckRun, FokkerPlanckSpec, FpScheme};

/// Diffusion coefficient `(2n+1)/8` in units of `γt`.
pub fn diffusion_coefficient(n: f64) -> f64 {
    (2.0 * n + 1.0) / 8.0
}
