//! Scalar special functions: complex log-gamma, digamma and polygamma,
//! Hurwitz zeta and the Macdonald function `K₀`.
//!
//! All functions are pure and may be called concurrently.

mod bessel;
mod loggamma;
mod polygamma;

pub use bessel::{bessel_k0, bessel_k0_scaled, ln_bessel_k0};
pub use loggamma::{binet_mu, gamma, gamma_power_c, ln_gamma, log_gamma, BranchPolicy, ComplexValue, LogGammaMethod};
pub use polygamma::{digamma, hurwitz_zeta, polygamma};

pub(crate) use loggamma::{binet_mu_unchecked, lgamma, ln_gamma_unchecked, HALF_LN_2PI};
pub(crate) use polygamma::{digamma_unchecked, hurwitz_zeta_unchecked, inverse_digamma};

/// Euler's constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
