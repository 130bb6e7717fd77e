//! Densities `e_c(a,b)(t)` of the product-convolution semigroup whose
//! Mellin transform is `[Γ(az + b)/Γ(b)]^c`.
//!
//! Routes:
//!
//! * closed forms for `c = 1` and `c = 2` ([`density_c1`], [`density_c2`]);
//! * the inversion integral along a horizontal line `Im z = δ`
//!   ([`density_inversion`]);
//! * a Talbot-shaped contour wrapped around the poles of `Γ`, used for small
//!   `t` where horizontal lines suffer from cancellation
//!   ([`density_hankel`]);
//! * the saddle-shifted representation for large `t` ([`density_shifted`]).
//!
//! Every route works internally with `ln t` and reports `ln e_c(t)` next to
//! the value, so densities far below the `f64` range remain usable.

mod hankel;
mod line;
mod shifted;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::specfun::{ln_bessel_k0, ln_gamma_unchecked};

pub use hankel::{density_hankel, HankelPlan};
pub use line::{density_inversion, InversionPlan};
pub use shifted::density_shifted;

/// The triple `(a, b, c)` of positive reals indexing `τ_c(a,b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemigroupParams {
    a: f64,
    b: f64,
    c: f64,
}

impl SemigroupParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(domain(format!("parameter {name} = {v} must be positive and finite")));
            }
        }
        Ok(Self { a, b, c })
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }

    #[inline]
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Same `(a, b)` with another semigroup index.
    pub fn with_c(&self, c: f64) -> Result<Self> {
        Self::new(self.a, self.b, c)
    }

    /// `ln Γ(b)`.
    pub(crate) fn ln_gamma_b(&self) -> f64 {
        ln_gamma_unchecked(self.b)
    }
}

/// Which route produced a [`DensityValue`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedFormC1,
    ClosedFormC2,
    Inversion,
    HankelInversion,
    ShiftedInversion,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedFormC1 => "closed-form-c1",
            Method::ClosedFormC2 => "closed-form-c2",
            Method::Inversion => "inversion",
            Method::HankelInversion => "hankel-inversion",
            Method::ShiftedInversion => "shifted-inversion",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A density evaluation with its error estimate.
///
/// `value` may underflow to zero (or overflow) where `ln_value` is still
/// finite; `est_rel_err` is the same estimate relative to the value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityValue {
    pub t: f64,
    pub ln_t: f64,
    pub value: f64,
    pub ln_value: f64,
    pub est_abs_err: f64,
    pub est_rel_err: f64,
    pub method: Method,
}

impl DensityValue {
    pub(crate) fn from_log(ln_t: f64, ln_value: f64, est_rel_err: f64, method: Method) -> Self {
        let value = ln_value.exp();
        Self {
            t: ln_t.exp(),
            ln_t,
            value,
            ln_value,
            est_abs_err: est_rel_err * value,
            est_rel_err,
            method,
        }
    }
}

/// Rounding-level relative error attributed to closed-form evaluations.
const CLOSED_FORM_REL_ERR: f64 = 1e-14;

pub(crate) fn check_t(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain(format!("t = {t} must be positive and finite")));
    }
    Ok(t.ln())
}

fn check_ln_t(ln_t: f64) -> Result<()> {
    if !ln_t.is_finite() {
        return Err(domain(format!("ln t = {ln_t} must be finite")));
    }
    Ok(())
}

/// `e_1(a,b)(t) = t^{b/a-1} exp(-t^{1/a}) / (a Γ(b))`; requires `c = 1`.
pub fn density_c1(params: &SemigroupParams, t: f64) -> Result<DensityValue> {
    let ln_t = check_t(t)?;
    density_c1_ln(params, ln_t)
}

pub(crate) fn density_c1_ln(params: &SemigroupParams, ln_t: f64) -> Result<DensityValue> {
    if params.c != 1.0 {
        return Err(domain(format!("closed form e_1 needs c = 1, got {}", params.c)));
    }
    check_ln_t(ln_t)?;
    Ok(DensityValue::from_log(
        ln_t,
        ln_e1(params.a, params.b, ln_t),
        CLOSED_FORM_REL_ERR,
        Method::ClosedFormC1,
    ))
}

pub(crate) fn ln_e1(a: f64, b: f64, ln_t: f64) -> f64 {
    (b / a - 1.0) * ln_t - (ln_t / a).exp() - a.ln() - ln_gamma_unchecked(b)
}

/// `e_2(a,b)(t) = 2 t^{b/a-1} K₀(2 t^{1/(2a)}) / (a Γ(b)²)`; requires `c = 2`.
pub fn density_c2(params: &SemigroupParams, t: f64) -> Result<DensityValue> {
    let ln_t = check_t(t)?;
    density_c2_ln(params, ln_t)
}

pub(crate) fn density_c2_ln(params: &SemigroupParams, ln_t: f64) -> Result<DensityValue> {
    if params.c != 2.0 {
        return Err(domain(format!("closed form e_2 needs c = 2, got {}", params.c)));
    }
    check_ln_t(ln_t)?;
    let (a, b) = (params.a, params.b);
    let x = 2.0 * (ln_t / (2.0 * a)).exp();
    let lk = if x > 0.0 && x.is_finite() {
        ln_bessel_k0(x)?
    } else {
        return Err(Error::Overflow(format!("K0 argument out of range at ln t = {ln_t}")));
    };
    let ln_value = std::f64::consts::LN_2 + (b / a - 1.0) * ln_t - a.ln() - 2.0 * ln_gamma_unchecked(b) + lk;
    Ok(DensityValue::from_log(
        ln_t,
        ln_value,
        CLOSED_FORM_REL_ERR,
        Method::ClosedFormC2,
    ))
}

/// Options for the [`density`] dispatcher.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityOptions {
    /// Relative accuracy demanded from the numerical routes.
    pub rel_tol: f64,
    /// Use the Talbot contour once `ln(1/t)/a` reaches this value.
    pub hankel_tau: f64,
}

impl Default for DensityOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            hankel_tau: 1.0,
        }
    }
}

/// Route chosen by the dispatcher for a given `ln t`.
pub fn dispatch_method(params: &SemigroupParams, ln_t: f64, opts: &DensityOptions) -> Method {
    let (a, b, c) = (params.a, params.b, params.c);
    if c == 1.0 {
        Method::ClosedFormC1
    } else if c == 2.0 {
        Method::ClosedFormC2
    } else if ln_t / (a * c) >= b.max(2.0).ln() {
        Method::ShiftedInversion
    } else if -ln_t / a >= opts.hankel_tau {
        Method::HankelInversion
    } else {
        Method::Inversion
    }
}

/// Evaluate `e_c(a,b)(t)` by the most suitable route.
pub fn density(params: &SemigroupParams, t: f64) -> Result<DensityValue> {
    let ln_t = check_t(t)?;
    density_ln(params, ln_t, &DensityOptions::default())
}

/// Dispatcher taking `ln t`, so that `t` itself may lie outside the `f64` range.
pub fn density_ln(params: &SemigroupParams, ln_t: f64, opts: &DensityOptions) -> Result<DensityValue> {
    check_ln_t(ln_t)?;
    let v = match dispatch_method(params, ln_t, opts) {
        Method::ClosedFormC1 => return density_c1_ln(params, ln_t),
        Method::ClosedFormC2 => return density_c2_ln(params, ln_t),
        Method::ShiftedInversion => shifted::evaluate(params, ln_t, opts.rel_tol)?,
        Method::HankelInversion => hankel::evaluate(params, ln_t, &HankelPlan::new(params, ln_t, opts.rel_tol)?)?,
        Method::Inversion => {
            let plan = InversionPlan::saddle_ln(params, ln_t, opts.rel_tol)?;
            line::evaluate(params, ln_t, &plan)?
        }
    };
    if !(v.est_rel_err <= opts.rel_tol + log_rounding(v.ln_value, ln_t)) {
        return Err(Error::Accuracy {
            estimate: v.est_rel_err,
            tolerance: opts.rel_tol,
            context: format!("{} at ln t = {ln_t} for {:?}", v.method, params),
        });
    }
    Ok(v)
}

/// Relative error of `e^{ln_value}` caused by rounding `ln_value` itself.
///
/// Far in the tails `|ln e_c|` is huge and no quadrature can do better;
/// the dispatcher's tolerance is widened by this amount.
pub fn log_rounding(ln_value: f64, ln_t: f64) -> f64 {
    4.0 * f64::EPSILON * (ln_value.abs() + ln_t.abs())
}

/// Turn a raw quadrature sum into a [`DensityValue`], clamping negative noise
/// that lies inside the error bar and rejecting anything larger.
pub(crate) fn finish(ln_t: f64, ln_scale: f64, sum: f64, err: f64, method: Method) -> Result<DensityValue> {
    if !sum.is_finite() || !err.is_finite() {
        return Err(Error::Accuracy {
            estimate: f64::INFINITY,
            tolerance: 0.0,
            context: format!("{method}: non-finite quadrature at ln t = {ln_t}"),
        });
    }
    if sum <= 0.0 {
        if -sum <= err {
            let abs = (ln_scale + err.ln()).exp();
            return Ok(DensityValue {
                t: ln_t.exp(),
                ln_t,
                value: 0.0,
                ln_value: f64::NEG_INFINITY,
                est_abs_err: abs,
                est_rel_err: f64::INFINITY,
                method,
            });
        }
        return Err(Error::Accuracy {
            estimate: err,
            tolerance: -sum,
            context: format!("{method}: negative density {sum:e} outside error bar at ln t = {ln_t}"),
        });
    }
    let ln_value = ln_scale + sum.ln();
    Ok(DensityValue::from_log(
        ln_t,
        ln_value,
        err / sum + log_rounding(ln_value, ln_t),
        method,
    ))
}
