//! Inversion along horizontal lines `H_δ = {x + iδ}` and its saddle-shifted
//! reparametrisation.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use super::{check_t, finish, DensityValue, Method, SemigroupParams};
use crate::error::{Error, Result};
use crate::specfun::{inverse_digamma, lgamma, ln_gamma_unchecked, HALF_LN_2PI};

/// Discretisation of the inversion integral along `H_δ`.
///
/// The trapezoid rule runs over `x ∈ [0, truncation_x]` with `node_count`
/// intervals; conjugate symmetry of the integrand covers `x < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionPlan {
    contour_delta: f64,
    truncation_x: f64,
    node_count: usize,
    target_abs_tol: f64,
}

/// Margin, in nepers, between the truncation tail and the tolerance.
const LN_TEN: f64 = std::f64::consts::LN_10;
/// Hard cap on the number of trapezoid intervals.
pub(crate) const MAX_NODES: usize = 1 << 20;

impl InversionPlan {
    /// Plan for the line `Im z = contour_delta` at the point `t`.
    ///
    /// The step resolves both the oscillation of `t^{ix}` and the nearest
    /// pole of `Γ(b + aδ - iax)`; the truncation point puts the analytic
    /// tail bound below `target_abs_tol / 10`.
    pub fn new(params: &SemigroupParams, t: f64, contour_delta: f64, target_abs_tol: f64) -> Result<Self> {
        let ln_t = check_t(t)?;
        if !(target_abs_tol > 0.0) {
            return Err(Error::PlanInvalid(format!(
                "target_abs_tol = {target_abs_tol} must be positive"
            )));
        }
        Self::build(params, ln_t, contour_delta, target_abs_tol.ln())
    }

    /// Plan through the real saddle point of `t^{-z} Γ(b - iaz)^c`, where
    /// cancellation in the integral is weakest.
    pub fn saddle(params: &SemigroupParams, t: f64, target_abs_tol: f64) -> Result<Self> {
        let ln_t = check_t(t)?;
        if !(target_abs_tol > 0.0) {
            return Err(Error::PlanInvalid(format!(
                "target_abs_tol = {target_abs_tol} must be positive"
            )));
        }
        let delta = saddle_delta(params, ln_t);
        Self::build(params, ln_t, delta, target_abs_tol.ln())
    }

    /// Saddle plan with a tolerance relative to the integrand peak.
    pub(crate) fn saddle_ln(params: &SemigroupParams, ln_t: f64, rel_tol: f64) -> Result<Self> {
        let delta = saddle_delta(params, ln_t);
        let beta = params.b() + params.a() * delta;
        let ln_peak = line_ln_prefactor(params, ln_t, delta) + params.c() * ln_gamma_unchecked(beta);
        Self::build(params, ln_t, delta, ln_peak + rel_tol.ln())
    }

    /// Plan for the saddle-shifted representation: `δ = (t^{1/(ac)} - b)/a`.
    pub fn shifted(params: &SemigroupParams, t: f64, target_abs_tol: f64) -> Result<Self> {
        let ln_t = check_t(t)?;
        if !(target_abs_tol > 0.0) {
            return Err(Error::PlanInvalid(format!(
                "target_abs_tol = {target_abs_tol} must be positive"
            )));
        }
        let s = shifted_s(params, ln_t)?;
        let ln_rel = target_abs_tol.ln() - shifted_ln_prefactor(params, ln_t, s);
        Self::build_shifted(params, ln_t, ln_rel, target_abs_tol)
    }

    pub fn contour_delta(&self) -> f64 {
        self.contour_delta
    }

    pub fn truncation_x(&self) -> f64 {
        self.truncation_x
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn target_abs_tol(&self) -> f64 {
        self.target_abs_tol
    }

    /// Trapezoid step `truncation_x / node_count`.
    pub fn step(&self) -> f64 {
        self.truncation_x / self.node_count as f64
    }

    #[cfg(test)]
    pub(crate) fn raw(contour_delta: f64, truncation_x: f64, node_count: usize, target_abs_tol: f64) -> Self {
        Self {
            contour_delta,
            truncation_x,
            node_count,
            target_abs_tol,
        }
    }

    fn validate(&self, params: &SemigroupParams) -> Result<()> {
        let (a, b) = (params.a(), params.b());
        if !(self.contour_delta > -b / a) || !self.contour_delta.is_finite() {
            return Err(Error::PlanInvalid(format!(
                "contour_delta = {} must exceed -b/a = {}",
                self.contour_delta,
                -b / a
            )));
        }
        if !(self.truncation_x > 0.0) || !self.truncation_x.is_finite() || self.node_count == 0 {
            return Err(Error::PlanInvalid("empty truncation range".into()));
        }
        Ok(())
    }

    fn build(params: &SemigroupParams, ln_t: f64, delta: f64, ln_tol: f64) -> Result<Self> {
        let (a, b, c) = (params.a(), params.b(), params.c());
        if !(delta > -b / a) || !delta.is_finite() {
            return Err(Error::PlanInvalid(format!(
                "contour_delta = {delta} must exceed -b/a = {}",
                -b / a
            )));
        }
        let beta = b + a * delta;
        let ln_pref = line_ln_prefactor(params, ln_t, delta);
        let ln_tail = |x: f64| ln_pref + line_ln_envelope(a, beta, c, x) - (c * a * (a * x / beta).atan()).ln();
        // Truncate no earlier than seventeen digits below the integrand peak.
        let ln_peak = ln_pref + c * ln_gamma_unchecked(beta);
        let x = solve_tail(ln_tail, (ln_tol - LN_TEN).min(ln_peak - 40.0), 1.0 / a);
        // The halved rule (step 2h) must also resolve the pole at distance β/a,
        // or the refinement difference overstates the error.
        let mut h = (beta / (12.0 * a)).min(0.05);
        if ln_t != 0.0 {
            h = h.min(PI / (8.0 * ln_t.abs()));
        }
        let n = even_ceil(x / h);
        if n > MAX_NODES as f64 {
            return Err(Error::PlanInvalid(format!(
                "line Im z = {delta} needs {n} nodes at ln t = {ln_t}; choose a contour nearer the saddle"
            )));
        }
        Ok(Self {
            contour_delta: delta,
            truncation_x: x,
            node_count: n as usize,
            target_abs_tol: ln_tol.exp(),
        })
    }

    /// `ln_rel_tol` is measured against the prefactor in front of the
    /// u-integral, which can be far outside the `f64` range.
    pub(crate) fn build_shifted(
        params: &SemigroupParams,
        ln_t: f64,
        ln_rel_tol: f64,
        target_abs_tol: f64,
    ) -> Result<Self> {
        let (a, b, c) = (params.a(), params.b(), params.c());
        let s = shifted_s(params, ln_t)?;
        let cs = c * s;
        // Both halves of the real line, hence the factor 2.
        let ln_tail = |u: f64| LN_2 + cs * re_f(u) - 0.25 * c * (u * u).ln_1p() + c / (12.0 * s) - (cs * u.atan()).ln();
        let ln_peak = 0.5 * (std::f64::consts::TAU / cs).ln();
        let u = solve_tail(ln_tail, (ln_rel_tol - LN_TEN).min(ln_peak - 40.0), 1.0 / cs.sqrt());
        let h = (0.25 / cs.sqrt()).min(0.07);
        let n = even_ceil(u / h).max(8.0);
        if n > MAX_NODES as f64 {
            return Err(Error::PlanInvalid(format!(
                "shifted contour needs {n} nodes at ln t = {ln_t}"
            )));
        }
        Ok(Self {
            contour_delta: (s - b) / a,
            truncation_x: s * u / a,
            node_count: n as usize,
            target_abs_tol,
        })
    }
}

fn saddle_delta(params: &SemigroupParams, ln_t: f64) -> f64 {
    let beta = inverse_digamma(ln_t / (params.a() * params.c()));
    (beta - params.b()) / params.a()
}

/// Round up to an even count so the halved rule shares the endpoints.
fn even_ceil(x: f64) -> f64 {
    2.0 * (0.5 * x).ceil()
}

/// Smallest point (up to bisection accuracy) where the decreasing tail bound
/// falls below `target`.
fn solve_tail(ln_tail: impl Fn(f64) -> f64, target: f64, start: f64) -> f64 {
    let ok = |x: f64| ln_tail(x) <= target;
    let (mut lo, mut hi) = if ok(start) {
        let mut lo = start / 2.0;
        while ok(lo) && lo > 1e-300 {
            lo /= 2.0;
        }
        (lo, 2.0 * lo)
    } else {
        let mut hi = 2.0 * start;
        while !ok(hi) && hi < 1e300 {
            hi *= 2.0;
        }
        (hi / 2.0, hi)
    };
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `ln` of `t^{-δ-1} / (π Γ(b)^c)`, the factor in front of `∫_0^∞`.
fn line_ln_prefactor(params: &SemigroupParams, ln_t: f64, delta: f64) -> f64 {
    -(delta + 1.0) * ln_t - PI.ln() - params.c() * params.ln_gamma_b()
}

/// Upper bound for `ln |Γ(β - iax)|^c` from Stirling's formula and Binet's
/// bound `|μ(z)| ≤ 1/(12 Re z)`; decreasing in `x ≥ 0` with slope at most
/// `-ca·atan(ax/β)`.
fn line_ln_envelope(a: f64, beta: f64, c: f64, x: f64) -> f64 {
    let ax = a * x;
    c * (HALF_LN_2PI + 0.5 * (beta - 0.5) * beta.mul_add(beta, ax * ax).ln() - ax * (ax / beta).atan() - beta
        + 1.0 / (12.0 * beta))
}

/// Evaluate the trapezoid sum of a line plan.
pub(crate) fn evaluate(params: &SemigroupParams, ln_t: f64, plan: &InversionPlan) -> Result<DensityValue> {
    plan.validate(params)?;
    let (a, b, c) = (params.a(), params.b(), params.c());
    let delta = plan.contour_delta;
    let beta = b + a * delta;
    let h = plan.step();
    let n = plan.node_count;
    let lg_beta = ln_gamma_unchecked(beta);

    let mut fine = 0.0;
    let mut coarse = 0.0;
    let mut noise = 0.0;
    let mut prev_phase = 0.0;
    for k in 0..=n {
        let x = k as f64 * h;
        let lg = lgamma(Complex64::new(beta, -a * x));
        let re = c * (lg.re - lg_beta);
        let phase = c * lg.im + x * ln_t;
        if k > 0 && (phase - prev_phase).abs() > PI {
            return Err(Error::Branch(format!(
                "integrand phase jumps by {} between x = {} and {x}; step too coarse",
                (phase - prev_phase).abs(),
                x - h
            )));
        }
        prev_phase = phase;
        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
        let m = w * re.exp();
        let v = m * phase.cos();
        noise += m * (1.0 + re.abs() + phase.abs());
        fine += v;
        if k % 2 == 0 {
            coarse += v;
        }
    }
    let coarse = 2.0 * coarse;
    let ln_scale = line_ln_prefactor(params, ln_t, delta) + c * lg_beta + h.ln();
    let x_end = plan.truncation_x;
    let ln_tail = line_ln_envelope(a, beta, c, x_end) - c * lg_beta - (c * a * (a * x_end / beta).atan()).ln() - h.ln();
    let err = (fine - coarse).abs() + ln_tail.exp() + 2.0 * f64::EPSILON * noise;
    finish(ln_t, ln_scale, fine, err, Method::Inversion)
}

/// Trapezoid evaluation of the inversion integral along a caller-chosen line.
///
/// Fails with an accuracy error when the estimate exceeds the plan's
/// `target_abs_tol`.
pub fn density_inversion(params: &SemigroupParams, t: f64, plan: &InversionPlan) -> Result<DensityValue> {
    let ln_t = check_t(t)?;
    let v = evaluate(params, ln_t, plan)?;
    check_abs(&v, plan)?;
    Ok(v)
}

fn check_abs(v: &DensityValue, plan: &InversionPlan) -> Result<()> {
    if !(v.est_abs_err <= plan.target_abs_tol) {
        return Err(Error::Accuracy {
            estimate: v.est_abs_err,
            tolerance: plan.target_abs_tol,
            context: format!("{} at t = {}", v.method, v.t),
        });
    }
    Ok(())
}

// ---- saddle-shifted representation ----

/// `s = t^{1/(ac)}`, the real part of the saddle-point contour.
pub(crate) fn shifted_s(params: &SemigroupParams, ln_t: f64) -> Result<f64> {
    let s = (ln_t / (params.a() * params.c())).exp();
    if !s.is_finite() {
        return Err(Error::Overflow(format!("t^(1/(ac)) overflows at ln t = {ln_t}")));
    }
    if s < params.b() {
        return Err(Error::Regime(format!(
            "shifted representation needs t^(1/(ac)) = {s} >= b = {}",
            params.b()
        )));
    }
    Ok(s)
}

/// `ln` of `(2π)^{c/2-1} t^{A-1/(2a)} e^{-cs} / (a Γ(b)^c)` with
/// `A = (1/c + b - a)/a`.
pub(crate) fn shifted_ln_prefactor(params: &SemigroupParams, ln_t: f64, s: f64) -> f64 {
    let (a, b, c) = (params.a(), params.b(), params.c());
    let big_a = (1.0 / c + b - a) / a;
    (0.5 * c - 1.0) * std::f64::consts::TAU.ln() + (big_a - 0.5 / a) * ln_t - a.ln() - c * params.ln_gamma_b() - c * s
}

/// `f(u) = iu + (1 - iu) Log(1 - iu)`.
pub(crate) fn f_shift(u: f64) -> Complex64 {
    if u.abs() < 0.25 {
        // Σ_{n≥2} (iu)^n / (n(n-1)), free of the cancellation at small u.
        let iu = Complex64::new(0.0, u);
        let mut pow = iu * iu;
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 2..40 {
            let term = pow / (n * (n - 1)) as f64;
            acc += term;
            if term.norm() <= 1e-18 * acc.norm() {
                break;
            }
            pow *= iu;
        }
        acc
    } else {
        let w = Complex64::new(1.0, -u);
        Complex64::new(0.0, u) + w * w.ln()
    }
}

/// `Re f(u) = ½ ln(1 + u²) - u·atan u`, concave with `Re f' = -atan u`.
fn re_f(u: f64) -> f64 {
    0.5 * (u * u).ln_1p() - u * u.atan()
}

/// Evaluate the shifted representation with the nodes of `plan`.
pub(crate) fn evaluate_shifted(params: &SemigroupParams, ln_t: f64, plan: &InversionPlan) -> Result<DensityValue> {
    let (a, b, c) = (params.a(), params.b(), params.c());
    let s = shifted_s(params, ln_t)?;
    let expect = (s - b) / a;
    if (plan.contour_delta - expect).abs() > 1e-9 * expect.abs().max(1.0) {
        return Err(Error::PlanInvalid(format!(
            "shifted evaluation needs contour_delta = {expect}, plan has {}",
            plan.contour_delta
        )));
    }
    plan.validate(params)?;
    let cs = c * s;
    let u_end = a * plan.truncation_x / s;
    let n = plan.node_count;
    let h = u_end / n as f64;

    let mut fine = 0.0;
    let mut coarse = 0.0;
    let mut noise = 0.0;
    for k in 0..=n {
        let u = k as f64 * h;
        let w1 = Complex64::new(1.0, -u);
        let mu = binet_mu_shift(s, w1);
        let l = cs * f_shift(u) - 0.5 * c * w1.ln() + c * mu;
        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
        let m = w * l.re.exp();
        let v = m * l.im.cos();
        noise += m * (1.0 + l.re.abs() + l.im.abs());
        fine += v;
        if k % 2 == 0 {
            coarse += v;
        }
    }
    let coarse = 2.0 * coarse;
    let ln_scale = shifted_ln_prefactor(params, ln_t, s) + LN_2 + h.ln();
    let ln_tail =
        cs * re_f(u_end) - 0.25 * c * (u_end * u_end).ln_1p() + c / (12.0 * s) - (cs * u_end.atan()).ln() - h.ln();
    let err = (fine - coarse).abs() + ln_tail.exp() + 2.0 * f64::EPSILON * noise;
    finish(ln_t, ln_scale, fine, err, Method::ShiftedInversion)
}

#[inline]
fn binet_mu_shift(s: f64, w1: Complex64) -> Complex64 {
    crate::specfun::binet_mu_unchecked(w1 * s)
}

/// Saddle-shifted evaluation for large `t`; see [`InversionPlan::shifted`].
pub fn density_shifted(params: &SemigroupParams, t: f64, plan: &InversionPlan) -> Result<DensityValue> {
    let ln_t = check_t(t)?;
    let v = evaluate_shifted(params, ln_t, plan)?;
    check_abs(&v, plan)?;
    Ok(v)
}
