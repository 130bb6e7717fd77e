//! Leading-order asymptotics of `e_c(a,b)(t)` at `t → ∞` and `t → 0`, and an
//! empirical check of their error orders.
//!
//! As `t → ∞`
//!
//! ```text
//! e_c(t) = (2π)^{(c-1)/2} / (a √c Γ(b)^c) · exp(-c t^{1/(ac)}) / t^{1-(b-1/2+1/(2c))/a} · [1 + O(t^{-1/(ac)})]
//! ```
//!
//! and as `t → 0`, with `Λ = ln(1/t)`,
//!
//! ```text
//! e_c(t) = t^{b/a-1} Λ^{c-1} / ([aΓ(b)]^c Γ(c)) + O(t^{b/a-1} Λ^{c-2}).
//! ```
//!
//! The sign of `1/(2c)` in the tail exponent is the one for which `c = 1`
//! collapses onto the closed form `e_1`; the opposite sign is available as
//! [`TailExponent::Alternative`] for comparison.

use serde::{Deserialize, Serialize};

use crate::density::{density_ln, DensityOptions, SemigroupParams};
use crate::error::{domain, Error, Result};
use crate::specfun::ln_gamma_unchecked;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Tail,
    Origin,
}

/// A leading-order approximation with the order of its relative error.
///
/// For [`Regime::Tail`] the relative error is `O(t^{claimed_order})` with
/// `claimed_order = -1/(ac)`; for [`Regime::Origin`] it is
/// `O(Λ^{claimed_order})` with `claimed_order = -1`, one power of
/// `Λ = ln(1/t)` below the leading term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxValue {
    pub t: f64,
    pub leading_term: f64,
    pub ln_leading: f64,
    pub claimed_order: f64,
    pub regime: Regime,
}

/// Which sign of `1/(2c)` to use in the power of `t` of the tail formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailExponent {
    /// `1 - (b - 1/2 + 1/(2c))/a`; consistent with `e_1` and the saddle point.
    #[default]
    Stated,
    /// `1 - (b - 1/2 - 1/(2c))/a`.
    Alternative,
}

/// Leading tail term as `t → ∞`; requires `t > 1`.
pub fn tail_asymptotic(params: &SemigroupParams, t: f64) -> Result<ApproxValue> {
    tail_asymptotic_with(params, t, TailExponent::Stated)
}

pub fn tail_asymptotic_with(params: &SemigroupParams, t: f64, exponent: TailExponent) -> Result<ApproxValue> {
    if !(t > 1.0) || !t.is_finite() {
        return Err(domain(format!("tail asymptotic needs t > 1, got {t}")));
    }
    let ln_leading = ln_tail_leading(params, t.ln(), exponent);
    Ok(ApproxValue {
        t,
        leading_term: ln_leading.exp(),
        ln_leading,
        claimed_order: -1.0 / (params.a() * params.c()),
        regime: Regime::Tail,
    })
}

/// Logarithm of the tail leading term at `ln t`, without a regime check;
/// finite where the term itself under- or overflows.
pub fn ln_tail_leading(params: &SemigroupParams, ln_t: f64, exponent: TailExponent) -> f64 {
    let (a, b, c) = (params.a(), params.b(), params.c());
    let half_inv_c = match exponent {
        TailExponent::Stated => 0.5 / c,
        TailExponent::Alternative => -0.5 / c,
    };
    let power = 1.0 - (b - 0.5 + half_inv_c) / a;
    0.5 * (c - 1.0) * std::f64::consts::TAU.ln()
        - a.ln()
        - 0.5 * c.ln()
        - c * ln_gamma_unchecked(b)
        - c * (ln_t / (a * c)).exp()
        - power * ln_t
}

/// Leading term as `t → 0`; requires `0 < t < 1`.
pub fn origin_asymptotic(params: &SemigroupParams, t: f64) -> Result<ApproxValue> {
    if !(t > 0.0 && t < 1.0) {
        return Err(domain(format!("origin asymptotic needs 0 < t < 1, got {t}")));
    }
    let ln_leading = ln_origin_leading(params, t.ln());
    Ok(ApproxValue {
        t,
        leading_term: ln_leading.exp(),
        ln_leading,
        claimed_order: -1.0,
        regime: Regime::Origin,
    })
}

/// Logarithm of the origin leading term at `ln t < 0`, without a regime
/// check.
pub fn ln_origin_leading(params: &SemigroupParams, ln_t: f64) -> f64 {
    let (a, b, c) = (params.a(), params.b(), params.c());
    (b / a - 1.0) * ln_t + (c - 1.0) * (-ln_t).ln() - c * (a.ln() + ln_gamma_unchecked(b)) - ln_gamma_unchecked(c)
}

/// Behaviour of `e_c(a,b)(t)` as `t → 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitBehavior {
    /// `b/a > 1`, or `b = a` and `c < 1`.
    ToZero,
    /// `b/a < 1`: a power singularity.
    ToInfinity,
    /// `b = a` and `c > 1`: growth like `(ln 1/t)^{c-1}`.
    ToInfinityLogarithmically,
    /// `b = a` and `c = 1`: `e_1(t) → 1/Γ(a + 1)`.
    Finite(f64),
}

pub fn limit_behavior(params: &SemigroupParams) -> LimitBehavior {
    let (a, b, c) = (params.a(), params.b(), params.c());
    if b > a {
        LimitBehavior::ToZero
    } else if b < a {
        LimitBehavior::ToInfinity
    } else if c < 1.0 {
        LimitBehavior::ToZero
    } else if c > 1.0 {
        LimitBehavior::ToInfinityLogarithmically
    } else {
        LimitBehavior::Finite((-ln_gamma_unchecked(a + 1.0)).exp())
    }
}

/// Result of [`verify_order`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderFit {
    pub regime: Regime,
    /// Least-squares slope of `ln |rel. error|` against `ln t` (tail) or
    /// `ln Λ` (origin); `NaN` when every error is at rounding level.
    pub slope: f64,
    /// Slope implied by the claimed error order.
    pub expected_slope: f64,
    /// `(t, density / leading - 1)` per grid point.
    pub rel_errors: Vec<(f64, f64)>,
    /// Every relative error is below `1e-12`: the formula is exact.
    pub exact_collapse: bool,
}

/// Fit the observed error order of an asymptotic formula on `t_grid`.
///
/// The grid needs at least four points spanning two decades, all inside
/// the regime (`t > 1` for the tail, `t < 1` at the origin).
pub fn verify_order(params: &SemigroupParams, regime: Regime, t_grid: &[f64]) -> Result<OrderFit> {
    verify_order_with(params, regime, t_grid, TailExponent::Stated)
}

pub fn verify_order_with(
    params: &SemigroupParams,
    regime: Regime,
    t_grid: &[f64],
    exponent: TailExponent,
) -> Result<OrderFit> {
    if t_grid.len() < 4 {
        return Err(Error::InsufficientGrid(format!(
            "need at least 4 points, got {}",
            t_grid.len()
        )));
    }
    let inside = |t: f64| match regime {
        Regime::Tail => t > 1.0 && t.is_finite(),
        Regime::Origin => t > 0.0 && t < 1.0,
    };
    if let Some(&t) = t_grid.iter().find(|&&t| !inside(t)) {
        return Err(Error::InsufficientGrid(format!(
            "t = {t} lies outside the {regime:?} regime"
        )));
    }
    let (lo, hi) = t_grid
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &t| (lo.min(t), hi.max(t)));
    if (hi / lo).log10() < 2.0 {
        return Err(Error::InsufficientGrid(format!(
            "grid spans only {:.2} decades",
            (hi / lo).log10()
        )));
    }

    let opts = DensityOptions::default();
    let mut rel_errors = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let ln_t = t.ln();
        let lead = match regime {
            Regime::Tail => ln_tail_leading(params, ln_t, exponent),
            Regime::Origin => ln_origin_leading(params, ln_t),
        };
        let d = density_ln(params, ln_t, &opts)?;
        rel_errors.push((t, (d.ln_value - lead).exp_m1()));
    }
    let exact_collapse = rel_errors.iter().all(|&(_, e)| e.abs() < 1e-12);
    let pts: Vec<(f64, f64)> = rel_errors
        .iter()
        .filter(|&&(_, e)| e != 0.0)
        .map(|&(t, e)| {
            let x = match regime {
                Regime::Tail => t.ln(),
                Regime::Origin => (-t.ln()).ln(),
            };
            (x, e.abs().ln())
        })
        .collect();
    let slope = if exact_collapse || pts.len() < 2 {
        f64::NAN
    } else {
        ls_slope(&pts)
    };
    let expected_slope = match regime {
        Regime::Tail => -1.0 / (params.a() * params.c()),
        Regime::Origin => -1.0,
    };
    Ok(OrderFit {
        regime,
        slope,
        expected_slope,
        rel_errors,
        exact_collapse,
    })
}

/// Unweighted least-squares slope.
pub(crate) fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{density, density_c1};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p(a: f64, b: f64, c: f64) -> SemigroupParams {
        SemigroupParams::new(a, b, c).unwrap()
    }

    fn decades(lo: i32, hi: i32) -> Vec<f64> {
        (lo..=hi).map(|k| 10f64.powi(k)).collect()
    }

    #[test]
    fn tail_examples() {
        let v = tail_asymptotic(&p(1.0, 1.0, 1.0), 5.0).unwrap();
        assert_relative_eq!(v.leading_term, (-5.0f64).exp(), max_relative = 1e-14);
        assert_eq!(v.regime, Regime::Tail);
        assert_eq!(v.claimed_order, -1.0);

        for c in [0.5, 1.5, 2.0, 3.0] {
            for t in [2.0, 30.0, 400.0] {
                let v = tail_asymptotic(&p(1.0, 1.0, c), t).unwrap();
                let reference = (2.0 * std::f64::consts::PI).powf(0.5 * (c - 1.0)) / c.sqrt()
                    * (-c * t.powf(1.0 / c)).exp()
                    / t.powf((c - 1.0) / (2.0 * c));
                assert_relative_eq!(v.leading_term, reference, max_relative = 1e-12);
            }
        }

        let prm = p(1.0, 1.0, 2.0);
        let ratio = (density(&prm, 1e6).unwrap().ln_value - tail_asymptotic(&prm, 1e6).unwrap().ln_leading).exp();
        assert!((ratio - 1.0).abs() <= 5e-2, "{ratio}");

        assert!(matches!(tail_asymptotic(&prm, 1.0), Err(Error::Domain(_))));
        assert!(matches!(tail_asymptotic(&prm, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn origin_examples() {
        let v = origin_asymptotic(&p(1.0, 1.0, 1.0), 0.1).unwrap();
        assert_relative_eq!(v.leading_term, 1.0, max_relative = 1e-15);
        let v = origin_asymptotic(&p(2.0, 1.0, 1.0), 0.01).unwrap();
        assert_relative_eq!(v.leading_term, 5.0, max_relative = 1e-14);
        for t in [1e-3, 1e-6, 1e-9] {
            let v = origin_asymptotic(&p(1.0, 1.0, 2.0), t).unwrap();
            assert_relative_eq!(v.leading_term, -f64::ln(t), max_relative = 1e-14);
            // 2K0(2√t) = ln(1/t) - 2γ + o(1)
            let d = density(&p(1.0, 1.0, 2.0), t).unwrap().value;
            assert!((d - v.leading_term + 2.0 * crate::specfun::EULER_GAMMA).abs() < 1e-2);
        }
        for t in [0.0, 1.0, 2.0, -1.0] {
            assert!(matches!(origin_asymptotic(&p(1.0, 1.0, 2.0), t), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn limits_at_zero() {
        assert_eq!(limit_behavior(&p(1.0, 2.0, 0.7)), LimitBehavior::ToZero);
        assert_eq!(limit_behavior(&p(2.0, 1.0, 3.0)), LimitBehavior::ToInfinity);
        assert_eq!(
            limit_behavior(&p(1.0, 1.0, 3.0)),
            LimitBehavior::ToInfinityLogarithmically
        );
        assert_eq!(limit_behavior(&p(1.0, 1.0, 0.5)), LimitBehavior::ToZero);
        assert_eq!(limit_behavior(&p(2.0, 2.0, 1.0)), LimitBehavior::Finite(0.5));
    }

    #[test]
    fn limits_agree_with_the_density() {
        for (a, b, c) in [(1.0, 2.0, 0.7), (2.0, 1.0, 3.0), (1.0, 1.0, 3.0), (1.0, 1.0, 0.5)] {
            let prm = p(a, b, c);
            let near = density(&prm, 1e-12).unwrap().value;
            let far = density(&prm, 1e-4).unwrap().value;
            match limit_behavior(&prm) {
                LimitBehavior::ToZero => assert!(near < far),
                _ => assert!(near > far),
            }
        }
    }

    #[test]
    fn tail_order_c2() {
        let fit = verify_order(&p(1.0, 1.0, 2.0), Regime::Tail, &decades(2, 6)).unwrap();
        assert!((fit.slope + 0.5).abs() <= 0.3, "{fit:?}");
        assert!(!fit.exact_collapse);
    }

    #[test]
    fn tail_order_c1_is_exact() {
        let fit = verify_order(&p(1.0, 1.0, 1.0), Regime::Tail, &[2.0, 10.0, 100.0, 400.0]).unwrap();
        assert!(fit.exact_collapse);
        assert!(fit.slope.is_nan());
    }

    #[test]
    fn origin_order_c2() {
        let grid: Vec<f64> = (2..=8).map(|k| 10f64.powi(-k)).collect();
        let fit = verify_order(&p(1.0, 1.0, 2.0), Regime::Origin, &grid).unwrap();
        assert!((fit.slope + 1.0).abs() <= 0.3, "{fit:?}");
    }

    #[test]
    fn grid_checks() {
        let prm = p(1.0, 1.0, 2.0);
        assert!(matches!(
            verify_order(&prm, Regime::Tail, &[10.0, 100.0, 1000.0]),
            Err(Error::InsufficientGrid(_))
        ));
        assert!(matches!(
            verify_order(&prm, Regime::Tail, &[10.0, 20.0, 40.0, 80.0]),
            Err(Error::InsufficientGrid(_))
        ));
        assert!(matches!(
            verify_order(&prm, Regime::Tail, &[0.5, 10.0, 100.0, 1000.0]),
            Err(Error::InsufficientGrid(_))
        ));
        assert!(matches!(
            verify_order(&prm, Regime::Origin, &[0.5, 1e-2, 1e-3, 2.0]),
            Err(Error::InsufficientGrid(_))
        ));
    }

    #[test]
    fn alternative_exponent_does_not_converge() {
        // With the opposite sign of 1/(2c) the ratio drifts like t^{1/(ac)}.
        let prm = p(1.0, 1.0, 2.0);
        let alt = verify_order_with(&prm, Regime::Tail, &decades(2, 6), TailExponent::Alternative).unwrap();
        let last = alt.rel_errors.last().unwrap().1;
        assert!(last.abs() > 1.0, "{alt:?}");
        assert!(alt.slope > 0.0);
    }

    #[test]
    fn tail_ratio_tends_to_one() {
        for (a, b) in [(0.5, 0.5), (1.0, 1.0), (2.0, 3.0)] {
            for c in [1.5, 2.0, 3.0] {
                let prm = p(a, b, c);
                let errs: Vec<f64> = decades(2, 6)
                    .into_iter()
                    .map(|t| {
                        (density(&prm, t).unwrap().ln_value - tail_asymptotic(&prm, t).unwrap().ln_leading)
                            .exp_m1()
                            .abs()
                    })
                    .collect();
                assert!(errs.last().unwrap() < errs.first().unwrap(), "({a},{b},{c}) {errs:?}");
                for w in errs.windows(2) {
                    assert!(w[1] <= w[0] * 1.01 + 1e-9, "({a},{b},{c}) {errs:?}");
                }
            }
        }
    }

    #[test]
    fn origin_ratio_tends_to_one() {
        for (a, b) in [(0.5, 0.5), (1.0, 1.0), (2.0, 3.0)] {
            for c in [0.5, 1.5, 2.0, 3.0] {
                let prm = p(a, b, c);
                let errs: Vec<f64> = (2..=8)
                    .map(|k| {
                        let t = 10f64.powi(-k);
                        (density(&prm, t).unwrap().ln_value - origin_asymptotic(&prm, t).unwrap().ln_leading)
                            .exp_m1()
                            .abs()
                    })
                    .collect();
                assert!(errs.last().unwrap() < errs.first().unwrap(), "({a},{b},{c}) {errs:?}");
                let pts: Vec<(f64, f64)> = (2..=8)
                    .zip(&errs)
                    .map(|(k, e)| ((k as f64 * 10f64.ln()).ln(), e.ln()))
                    .collect();
                assert!(ls_slope(&pts) < 0.0, "({a},{b},{c}) {errs:?}");
            }
        }
    }

    proptest! {
        #[test]
        fn c1_tail_collapses(a in 0.2f64..5.0, b in 0.2f64..6.0, t in 1.001f64..500.0) {
            let prm = p(a, b, 1.0);
            let lead = tail_asymptotic(&prm, t).unwrap();
            let exact = density_c1(&prm, t).unwrap();
            let tol = 8.0 * f64::EPSILON * (1.0 + lead.ln_leading.abs());
            prop_assert!((lead.ln_leading - exact.ln_value).abs() <= tol);
        }
    }
}
