//! Default plans for the saddle-shifted route.

use super::line::{evaluate_shifted, shifted_ln_prefactor, shifted_s, InversionPlan};
use super::{DensityValue, SemigroupParams};
use crate::error::Result;

pub use super::line::density_shifted;

/// Shifted evaluation with a tolerance relative to the integral's size.
pub(crate) fn evaluate(params: &SemigroupParams, ln_t: f64, rel_tol: f64) -> Result<DensityValue> {
    let s = shifted_s(params, ln_t)?;
    // The u-integral is of order sqrt(2π/(cs)) near its Gaussian peak.
    let ln_rel = 0.5 * (std::f64::consts::TAU / (params.c() * s)).ln() + rel_tol.ln();
    let abs = (shifted_ln_prefactor(params, ln_t, s) + ln_rel).exp();
    let plan = InversionPlan::build_shifted(params, ln_t, ln_rel, abs)?;
    evaluate_shifted(params, ln_t, &plan)
}
