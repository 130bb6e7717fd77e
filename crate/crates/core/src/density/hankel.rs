//! Inversion for small `t` along a Talbot-shaped contour that wraps the
//! poles of `Γ`.
//!
//! With `p = b - iaz` and `τ = ln(1/t)/a` the inversion integral becomes the
//! Bromwich integral
//!
//! ```text
//! e_c(t) = t^{b/a-1} / (a Γ(b)^c) · (1/2πi) ∫ e^{τp} Γ(p)^c dp.
//! ```
//!
//! For `τ > 0` the line may be bent into `τp = ν(θ cot θ + iθ)`,
//! `θ ∈ (-π, π)`, whose left arms run to `Re p = -∞` where `e^{τp}` kills
//! the integrand. The trapezoid rule in `θ` then converges geometrically.

use num_complex::Complex64;

use super::{check_t, finish, DensityValue, Method, SemigroupParams};
use crate::error::{Error, Result};
use crate::specfun::{inverse_digamma, lgamma, ln_gamma_unchecked};

/// Contour scale and refinement budget for [`density_hankel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HankelPlan {
    nu: f64,
    min_nodes: usize,
    max_nodes: usize,
    target_rel_tol: f64,
}

impl HankelPlan {
    /// Default plan: the contour vertex sits at the real saddle point, but
    /// the contour keeps a distance of about ½ from the poles at `-1, -2, …`
    /// while their residues `∝ e^{-τk}` are still visible in double precision.
    pub fn new(params: &SemigroupParams, ln_t: f64, target_rel_tol: f64) -> Result<Self> {
        let tau = -ln_t / params.a();
        if !(tau > 0.0) {
            return Err(Error::Regime(format!("Talbot contour needs t < 1, got ln t = {ln_t}")));
        }
        let beta = inverse_digamma(ln_t / (params.a() * params.c()));
        let nu = (tau * beta).max(tau.min(40.0) / std::f64::consts::TAU);
        Self::with_scale(nu, target_rel_tol)
    }

    /// Plan with an explicit contour scale `ν > 0`.
    pub fn with_scale(nu: f64, target_rel_tol: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::PlanInvalid(format!("contour scale {nu} must be positive")));
        }
        if !(target_rel_tol > 0.0) {
            return Err(Error::PlanInvalid(format!(
                "target_rel_tol = {target_rel_tol} must be positive"
            )));
        }
        Ok(Self {
            nu,
            min_nodes: 32,
            max_nodes: 8192,
            target_rel_tol,
        })
    }

    pub fn scale(&self) -> f64 {
        self.nu
    }

    pub fn target_rel_tol(&self) -> f64 {
        self.target_rel_tol
    }
}

/// `cot θ - θ / sin²θ`, accurate near `θ = 0`.
fn cot_minus(theta: f64) -> f64 {
    let x = 2.0 * theta;
    let s = theta.sin();
    let num = if x < 1.0 {
        // ½(sin x - x) by its Taylor series.
        let x2 = x * x;
        let mut term = -x * x2 / 6.0;
        let mut acc = term;
        let mut k = 3.0;
        while term.abs() > 1e-18 * acc.abs() {
            term *= -x2 / ((k + 1.0) * (k + 2.0));
            acc += term;
            k += 2.0;
        }
        0.5 * acc
    } else {
        0.5 * (x.sin() - x)
    };
    num / (s * s)
}

/// Integrand `Im[e^q Γ(q/τ)^c q'(θ)]` divided by `ν e^{ν} Γ(ν/τ)^c`.
fn node(theta: f64, nu: f64, tau: f64, c: f64, l0: f64) -> f64 {
    if theta == 0.0 {
        return 1.0;
    }
    let (s, co) = theta.sin_cos();
    let q = Complex64::new(nu * theta * co / s, nu * theta);
    // Beyond this the factor e^q has underflowed against the vertex value.
    if q.re - nu < -800.0 {
        return 0.0;
    }
    let dq = Complex64::new(cot_minus(theta), 1.0);
    let l = q + c * lgamma(q / tau) - l0;
    (l.exp() * dq).im
}

pub(crate) fn evaluate(params: &SemigroupParams, ln_t: f64, plan: &HankelPlan) -> Result<DensityValue> {
    let (a, b, c) = (params.a(), params.b(), params.c());
    let tau = -ln_t / a;
    if !(tau > 0.0) {
        return Err(Error::Regime(format!("Talbot contour needs t < 1, got ln t = {ln_t}")));
    }
    let nu = plan.nu;
    let l0 = nu + c * ln_gamma_unchecked(nu / tau);

    // Trapezoid in θ on [0, π]; the integrand vanishes at θ = π.
    let mut n = plan.min_nodes;
    let mut sum = 0.5
        + (1..n)
            .map(|k| node(std::f64::consts::PI * k as f64 / n as f64, nu, tau, c, l0))
            .sum::<f64>();
    let mut prev = sum / n as f64;
    let mut prev_diff = f64::INFINITY;
    loop {
        let odd: f64 = (0..n)
            .map(|k| {
                node(
                    std::f64::consts::PI * (2 * k + 1) as f64 / (2 * n) as f64,
                    nu,
                    tau,
                    c,
                    l0,
                )
            })
            .sum();
        sum += odd;
        n *= 2;
        let cur = sum / n as f64;
        // Two successive differences guard against accidental agreement.
        let diff = (cur - prev).abs();
        let err =
            diff.max(prev_diff.min(1.0)) + 16.0 * f64::EPSILON * (n as f64).sqrt() * cur.abs().max(0.5 / n as f64);
        if err <= plan.target_rel_tol * cur.abs() || 2 * n > plan.max_nodes {
            // e_c = t^{b/a-1}/(aΓ(b)^c) · (1/(πτ)) ∫_0^π Im[...] dθ
            //     = t^{b/a-1}/(aΓ(b)^c τ) · ν e^{l0} · (sum / n).
            let ln_scale = (b / a - 1.0) * ln_t - a.ln() - c * params.ln_gamma_b() - tau.ln() + nu.ln() + l0;
            return finish(ln_t, ln_scale, cur, err, Method::HankelInversion);
        }
        prev = cur;
        prev_diff = diff;
    }
}

/// Talbot-contour evaluation for `t < 1`; the result carries a relative
/// error estimate from successive node doubling.
pub fn density_hankel(params: &SemigroupParams, t: f64, plan: &HankelPlan) -> Result<DensityValue> {
    let ln_t = check_t(t)?;
    let v = evaluate(params, ln_t, plan)?;
    if !(v.est_rel_err <= plan.target_rel_tol) {
        return Err(Error::Accuracy {
            estimate: v.est_rel_err,
            tolerance: plan.target_rel_tol,
            context: format!("hankel-inversion at t = {t}"),
        });
    }
    Ok(v)
}
