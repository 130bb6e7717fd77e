//! The Stieltjes moments `s_n(a,b)^c = [Γ(an+b)/Γ(b)]^c`, the determinacy
//! classifier and the numerical evidence behind it.

use serde::{Deserialize, Serialize};

use crate::asympt::{ln_origin_leading, ln_tail_leading, TailExponent};
use crate::density::{density_ln, DensityOptions, SemigroupParams};
use crate::error::{domain, Error, Result};
use crate::quad::{integrate_adaptive_vec, try_integrate_adaptive, QuadOptions, QuadResult};
use crate::specfun::{gamma, ln_gamma_unchecked};

fn gamma_unchecked(x: f64) -> f64 {
    gamma(x).unwrap_or(f64::INFINITY)
}

/// `ln s_n(a,b)^c = c (ln Γ(an+b) - ln Γ(b))`; finite for any `n` used in
/// practice.
pub fn ln_moment(params: &SemigroupParams, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let (a, b, c) = (params.a(), params.b(), params.c());
    c * (ln_gamma_unchecked(a * n as f64 + b) - ln_gamma_unchecked(b))
}

/// `s_n(a,b)^c`.
pub fn moment(params: &SemigroupParams, n: u64) -> Result<f64> {
    let (a, b, c) = (params.a(), params.b(), params.c());
    let x = a * n as f64 + b;
    let v = if x <= 170.0 {
        // Linear-domain ratio: exact for integer arguments and c = 1.
        let r = gamma_unchecked(x) / gamma_unchecked(b);
        if c == 1.0 {
            r
        } else {
            r.powf(c)
        }
    } else {
        ln_moment(params, n).exp()
    };
    if !v.is_finite() {
        return Err(Error::Overflow(format!(
            "moment {n} of {params:?} overflows; use ln_moment"
        )));
    }
    Ok(v)
}

/// `s_0, …, s_N` with their logarithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSequence {
    pub params: SemigroupParams,
    pub values: Vec<f64>,
    pub log_values: Vec<f64>,
}

impl MomentSequence {
    /// Moments `0..=n_max`; fails if any of them overflows.
    pub fn new(params: &SemigroupParams, n_max: u64) -> Result<Self> {
        let log_values: Vec<f64> = (0..=n_max).map(|n| ln_moment(params, n)).collect();
        let values = (0..=n_max).map(|n| moment(params, n)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params: *params,
            values,
            log_values,
        })
    }

    /// See [`is_log_convex`].
    pub fn is_log_convex(&self) -> bool {
        is_log_convex(&self.log_values)
    }
}

/// `ln s_{n-1} + ln s_{n+1} ≥ 2 ln s_n` for every interior `n`, up to
/// rounding.
pub fn is_log_convex(log_values: &[f64]) -> bool {
    log_values.windows(3).all(|w| {
        let slack = 8.0 * f64::EPSILON * (w[0].abs() + w[2].abs() + 2.0 * w[1].abs());
        w[0] + w[2] - 2.0 * w[1] >= -slack
    })
}

/// `ac - 2` computed with a single rounding, so its sign and zero test are
/// exact for the given inputs.
fn ac_minus_two(params: &SemigroupParams) -> f64 {
    params.a().mul_add(params.c(), -2.0)
}

/// Outcome of [`classify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeterminacyVerdict {
    /// The moment problem on `[0, ∞)` is determinate: `ac ≤ 2`.
    pub determinate: bool,
    /// `ac = 2` exactly.
    pub boundary: bool,
    /// Carleman partial sums at `N = 10, 100, 1000, 10000`.
    pub carleman_partial_sums: Vec<f64>,
    /// Truncated Krein integral over `[1, 10⁴]`, when in the asymptotic regime.
    pub krein_integral_estimate: Option<f64>,
}

/// Determinacy is decided by `ac ≤ 2` alone and does not depend on `b`;
/// the numerical diagnostics are attached as evidence.
pub fn classify(params: &SemigroupParams) -> DeterminacyVerdict {
    let d = ac_minus_two(params);
    let carleman = carleman_diagnostic(params, 10_000).expect("N = 10^4 is valid");
    let carleman_partial_sums = [10, 100, 1000, 10_000]
        .iter()
        .map(|&n| carleman.partial_sums[n - 1])
        .collect();
    DeterminacyVerdict {
        determinate: d <= 0.0,
        boundary: d == 0.0,
        carleman_partial_sums,
        krein_integral_estimate: krein_diagnostic(params, 1.0, 1e4).ok().map(|k| k.estimate),
    }
}

/// Partial sums of `Σ s_n^{-c/(2n)}` with the fitted power-law decay of the
/// terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlemanDiagnostic {
    /// `partial_sums[k]` sums the terms `n = 1..=k+1`.
    pub partial_sums: Vec<f64>,
    /// Least-squares slope of `ln term_n` against `ln n` over `[N/10, N]`;
    /// close to `-ac/2`. The series diverges iff the slope is `≥ -1`.
    pub fitted_exponent: f64,
}

/// Evidence for (non-)divergence of the Carleman series; `N ≥ 10`.
pub fn carleman_diagnostic(params: &SemigroupParams, n_max: usize) -> Result<CarlemanDiagnostic> {
    if n_max < 10 {
        return Err(domain(format!("Carleman diagnostic needs N >= 10, got {n_max}")));
    }
    let (a, b, c) = (params.a(), params.b(), params.c());
    let lgb = ln_gamma_unchecked(b);
    // s_n(a,b), not its c-th power, is raised to -c/(2n).
    let ln_term = |n: usize| -c / (2.0 * n as f64) * (ln_gamma_unchecked(a * n as f64 + b) - lgb);
    let mut acc = 0.0;
    let partial_sums = (1..=n_max)
        .map(|n| {
            acc += ln_term(n).exp();
            acc
        })
        .collect();
    let lo = (n_max / 10).max(1) as f64;
    let pts: Vec<(f64, f64)> = (0..=40)
        .map(|k| {
            let n = (lo * (n_max as f64 / lo).powf(k as f64 / 40.0)).round() as usize;
            ((n as f64).ln(), ln_term(n))
        })
        .collect();
    Ok(CarlemanDiagnostic {
        partial_sums,
        fitted_exponent: crate::asympt::ls_slope(&pts),
    })
}

/// Truncated Krein integral `∫_K^T ln e_c(t²) / (1 + t²) dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KreinDiagnostic {
    pub estimate: f64,
    /// Growth exponent `2/(ac)` of `-ln e_c(t²)`.
    pub exponent: f64,
    /// Ratio of the integral over `[RT, R²T]` to that over `[T, RT]`,
    /// `R = 10⁴`: about 1 or more when the integral diverges, geometrically
    /// small when it converges.
    pub tail_ratio: f64,
    /// Numerical verdict `tail_ratio < 0.9`: the full integral is finite.
    pub bounded: bool,
}

/// Krein integral with `ln e_c(t²)` replaced by its tail asymptotic, which
/// keeps the integrand finite where the density itself underflows.
///
/// Requires `1 ≤ K < T` and `T^{2/(ac)} ≥ max(b, 2)` so that the upper part
/// of the range lies in the asymptotic regime.
pub fn krein_diagnostic(params: &SemigroupParams, k: f64, t: f64) -> Result<KreinDiagnostic> {
    if !(k >= 1.0) || !(t > k) || !t.is_finite() {
        return Err(domain(format!(
            "Krein diagnostic needs 1 <= K < T, got K = {k}, T = {t}"
        )));
    }
    let (a, b, c) = (params.a(), params.b(), params.c());
    let exponent = 2.0 / (a * c);
    if t.powf(exponent) < b.max(2.0) {
        return Err(Error::Regime(format!(
            "T = {t} too small: T^(2/(ac)) = {} < max(b, 2)",
            t.powf(exponent)
        )));
    }
    // Substitute t = e^v: dt/(1+t²) = dv / (2 cosh v).
    let integral = |lo: f64, hi: f64| {
        try_integrate_adaptive(
            |v| Ok(ln_tail_leading(params, 2.0 * v, TailExponent::Stated) / (2.0 * v.cosh())),
            lo,
            hi,
            &QuadOptions::new(1e-12, 1e-12).max_intervals(5000),
        )
        .map(|r| r.value)
    };
    let estimate = integral(k.ln(), t.ln())?;
    let (v, step) = (t.ln(), 1e4f64.ln());
    let tail_ratio = integral(v + step, v + 2.0 * step)? / integral(v, v + step)?;
    Ok(KreinDiagnostic {
        estimate,
        exponent,
        tail_ratio,
        bounded: tail_ratio < 0.9,
    })
}

/// `∫_0^∞ tⁿ e_c(t) dt / s_n^c` for `n = 0..=n_max`, each ideally 1.
///
/// Integrates in `u = ln t` with the dispatcher density. The range is cut
/// where the leading asymptotics put the neglected mass below `1e-15`
/// of every moment.
pub fn moment_quadrature(params: &SemigroupParams, n_max: usize, rel_tol: f64) -> Result<Vec<QuadResult>> {
    let ln_s: Vec<f64> = (0..=n_max).map(|n| ln_moment(params, n as u64)).collect();
    let floor = ln_s.iter().cloned().fold(f64::INFINITY, f64::min) + (1e-15f64).ln();
    let (u_lo, u_hi) = log_range(params, n_max as f64, 0, floor)?;

    let opts = DensityOptions::default();
    let quad = QuadOptions::new(1e-15, rel_tol).max_intervals(4000);
    integrate_adaptive_vec(
        |u, out: &mut [f64]| {
            let d = density_ln(params, u, &opts)?;
            for (n, o) in out.iter_mut().enumerate() {
                *o = ((n as f64 + 1.0) * u + d.ln_value - ln_s[n]).exp();
            }
            Ok(())
        },
        n_max + 1,
        u_lo,
        u_hi,
        &quad,
    )
}

/// Range `[u_lo, u_hi]` of `u = ln t` outside which `t^{k+1} |u|^m e_c(t)`
/// carries mass below `e^{floor}`, for every `0 ≤ k ≤ k_max`.
///
/// Uses the leading asymptotics at both ends; the `e^{floor}` margin
/// absorbs their O(1) relative error.
pub(crate) fn log_range(params: &SemigroupParams, k_max: f64, m: u32, floor: f64) -> Result<(f64, f64)> {
    let (a, b, c) = (params.a(), params.b(), params.c());
    let poly = |u: f64| m as f64 * u.abs().max(1.0).ln();
    // Left: ln(t e_c) ≈ (b/a) u + (c-1) ln|u| + const, worst at k = 0; the
    // mass beyond u is about that value divided by b/a.
    let alpha = b / a;
    let left = |u: f64| u + ln_origin_leading(params, u) + poly(u) - alpha.ln();
    let mut u_lo = -1.0;
    while left(u_lo) > floor || left(u_lo * 1.1) > left(u_lo) {
        u_lo *= 1.5;
        if u_lo < -1e6 {
            return Err(Error::Regime("integrand does not decay at the origin".into()));
        }
    }
    // Right: double-exponential decay, worst at k = k_max.
    let right = |u: f64| (k_max + 1.0) * u + ln_tail_leading(params, u, TailExponent::Stated) + poly(u);
    let mut u_hi = (a * c).max(1.0);
    while right(u_hi) > floor || right(u_hi + 1.0) > right(u_hi) {
        u_hi *= 1.5;
        if u_hi > 1e6 {
            return Err(Error::Regime("integrand does not decay at infinity".into()));
        }
    }
    Ok((u_lo, u_hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p(a: f64, b: f64, c: f64) -> SemigroupParams {
        SemigroupParams::new(a, b, c).unwrap()
    }

    #[test]
    fn moment_examples() {
        assert_eq!(moment(&p(1.0, 1.0, 1.0), 5).unwrap(), 120.0);
        assert_eq!(moment(&p(2.0, 3.0, 1.0), 2).unwrap(), 360.0);
        for prm in [p(0.3, 7.0, 2.5), p(4.0, 0.1, 0.2)] {
            assert_eq!(moment(&prm, 0).unwrap(), 1.0);
        }
        assert_relative_eq!(
            moment(&p(0.5, 0.5, 1.5), 3).unwrap(),
            (crate::specfun::gamma(2.0).unwrap() / crate::specfun::gamma(0.5).unwrap()).powf(1.5),
            max_relative = 1e-13
        );
    }

    #[test]
    fn overflow_only_in_linear_domain() {
        let prm = p(2.0, 1.0, 3.0);
        assert!(matches!(moment(&prm, 1_000_000), Err(Error::Overflow(_))));
        let l = ln_moment(&prm, 1_000_000);
        assert!(l.is_finite() && l > 1e7);
        assert!(MomentSequence::new(&prm, 1000).is_err());
    }

    #[test]
    fn sequence_shape() {
        let s = MomentSequence::new(&p(1.0, 1.0, 1.0), 5).unwrap();
        assert_eq!(s.values, vec![1.0, 1.0, 2.0, 6.0, 24.0, 120.0]);
        assert!(s.is_log_convex());
    }

    #[test]
    fn classify_examples() {
        let v = classify(&p(1.0, 0.7, 2.0));
        assert!(v.determinate && v.boundary);
        let v = classify(&p(3.0, 0.2, 1.0));
        assert!(!v.determinate && !v.boundary);
        let v = classify(&p(0.5, 5.0, 3.0));
        assert!(v.determinate && !v.boundary);
        // Inexact products near the boundary are classified by their exact value.
        assert!(classify(&p(0.1, 1.0, 20.0)).determinate == (0.1f64.mul_add(20.0, -2.0) <= 0.0));
        assert_eq!(v.carleman_partial_sums.len(), 4);
    }

    #[test]
    fn classification_ignores_b() {
        for (a, c) in [(1.0, 2.0), (3.0, 1.0), (0.5, 3.0), (2.0, 2.0)] {
            let first = classify(&p(a, 0.1, c));
            for b in [0.5, 1.0, 7.0] {
                let v = classify(&p(a, b, c));
                assert_eq!((v.determinate, v.boundary), (first.determinate, first.boundary));
            }
        }
    }

    #[test]
    fn carleman_examples() {
        let d = carleman_diagnostic(&p(1.0, 1.0, 2.0), 10_000).unwrap();
        assert!((d.fitted_exponent + 1.0).abs() <= 0.1, "{}", d.fitted_exponent);

        // Terms behave like sqrt(e/n), so the partial sums grow like 2 sqrt(eN).
        let d = carleman_diagnostic(&p(1.0, 1.0, 1.0), 10_000).unwrap();
        let n = 10_000.0f64;
        let growth = d.partial_sums[9999] / (2.0 * (std::f64::consts::E * n).sqrt());
        assert!((growth - 1.0).abs() < 0.05, "{growth}");
        assert!((d.fitted_exponent + 0.5).abs() < 0.05);

        let d = carleman_diagnostic(&p(4.0, 1.0, 1.0), 10_000).unwrap();
        assert!((d.fitted_exponent + 2.0).abs() <= 0.1);
        let tail = d.partial_sums[9999] - d.partial_sums[999];
        assert!(tail < 1e-3 * d.partial_sums[9999]);

        assert!(carleman_diagnostic(&p(1.0, 1.0, 1.0), 9).is_err());
    }

    #[test]
    fn krein_examples() {
        let k = |a, b, c, t| krein_diagnostic(&p(a, b, c), 1.0, t).unwrap();
        let (lo, hi) = (k(3.0, 1.0, 1.0, 1e4), k(3.0, 1.0, 1.0, 1e6));
        assert!(lo.bounded && lo.exponent < 1.0);
        assert!((hi.estimate - lo.estimate).abs() < 0.05 * lo.estimate.abs());

        let (lo, hi) = (k(1.0, 1.0, 1.0, 1e2), k(1.0, 1.0, 1.0, 1e3));
        assert!(!lo.bounded);
        assert_relative_eq!(hi.estimate - lo.estimate, -900.0, max_relative = 0.01);

        let (lo, hi) = (k(1.0, 1.0, 2.0, 1e2), k(1.0, 1.0, 2.0, 1e4));
        assert!(!lo.bounded && lo.exponent == 1.0);
        // ∫ -2t/(1+t²) dt = -ln(1+t²)
        assert_relative_eq!(hi.estimate - lo.estimate, -4.0 * 10f64.ln(), max_relative = 0.02);

        assert!(matches!(
            krein_diagnostic(&p(1.0, 1.0, 1.0), 0.5, 10.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            krein_diagnostic(&p(10.0, 1.0, 10.0), 1.0, 2.0),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn diagnostics_agree_with_classifier() {
        for a in [0.5, 1.0, 2.0, 3.0] {
            for c in [0.5, 1.0, 2.0, 3.0] {
                let prm = p(a, 1.0, c);
                let v = classify(&prm);
                let carl = carleman_diagnostic(&prm, 10_000).unwrap();
                assert!((carl.fitted_exponent + a * c / 2.0).abs() <= 0.15);
                if !v.boundary {
                    assert_eq!(carl.fitted_exponent < -1.0, !v.determinate);
                }
                let krein = krein_diagnostic(&prm, 1.0, 1e4).unwrap();
                assert_eq!(krein.bounded, !v.determinate);
            }
        }
    }

    #[test]
    fn moments_by_quadrature() {
        for prm in [p(1.0, 1.0, 1.5), p(0.5, 3.0, 0.5), p(2.0, 0.5, 3.0)] {
            for (n, r) in moment_quadrature(&prm, 4, 1e-9).unwrap().iter().enumerate() {
                assert!((r.value - 1.0).abs() <= 1e-7, "{prm:?} n = {n}: {}", r.value);
            }
        }
    }

    #[test]
    fn third_moment_of_c3_via_inversion() {
        // ∫ t e_3(t) dt = (1!)^3 for a = b = 1.
        let r = moment_quadrature(&p(1.0, 1.0, 3.0), 1, 1e-9).unwrap();
        assert!((r[1].value - 1.0).abs() <= 1e-6);
    }

    proptest! {
        #[test]
        fn log_convex(a in 0.05f64..5.0, b in 0.05f64..10.0, c in 0.05f64..5.0) {
            let prm = p(a, b, c);
            let logs: Vec<f64> = (0..400).map(|n| ln_moment(&prm, n)).collect();
            prop_assert!(is_log_convex(&logs));
            let s = MomentSequence::new(&prm, 8).unwrap();
            prop_assert!(s.is_log_convex());
            prop_assert_eq!(s.values[0], 1.0);
        }
    }
}
