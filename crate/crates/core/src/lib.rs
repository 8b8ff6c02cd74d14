//! Phase-space numerics for photon-added thermal states in a thermal channel.
//!
//! * [`states`]: Fock-diagonal density operators and their rate-equation evolution.
//! * [`wigner`]: Wigner and Husimi functions, closed forms and Laguerre series.
//! * [`channel`]: convolution and finite-difference evolution of phase-space functions.
//! * [`negativity`]: volume of the negative part of a Wigner function.
//! * [`threshold`]: threshold decay times and the zero-vacuum-population check.

pub mod channel;
mod error;
pub mod negativity;
mod ode;
pub mod quadrature;
pub mod states;
pub mod threshold;
pub mod wigner;

pub use error::{Error, Result};
pub use ode::{dopri5, OdeStats};
