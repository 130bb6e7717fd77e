//! The holomorphic branch of `log Γ` on the cut plane `ℂ \ (-∞, 0]`.
//!
//! The branch is normalised by `log Γ(1) = 0`. Its imaginary part is
//! continuous along every path that avoids the cut, so it is never reduced
//! modulo `2π`. Two independent evaluation routes are provided: the
//! Weierstrass product series and the Stirling series with Binet remainder,
//! combined with the upward recurrence (and the reflection formula in the
//! left half-plane).

use num_complex::Complex64;

use super::polygamma::hurwitz_zeta_unchecked;
use super::EULER_GAMMA;
use crate::error::{domain, Error, Result};

/// Complex numbers as used throughout the crate.
pub type ComplexValue = Complex64;

/// `½ ln(2π)`.
pub(crate) const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `B_{2k} / (2k (2k-1))` for `k = 1..=10`.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// Largest modulus for which `(z - ½) Log z` stays comfortably finite.
const MAX_MODULUS: f64 = 1.0e300;

/// How `log_gamma` evaluates the branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogGammaMethod {
    /// Truncated Weierstrass product series with a Hurwitz-zeta tail.
    WeierstrassSeries,
    /// Stirling series with Binet remainder after shifting `Re z` upward.
    StirlingBinet,
}

/// Evaluation policy for [`log_gamma`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPolicy {
    pub method: LogGammaMethod,
    /// Minimum `Re z` at which the Stirling series is applied directly.
    pub recurrence_threshold: f64,
    /// Stirling terms (at most 10), or the minimum number of explicit
    /// Weierstrass factors.
    pub terms: usize,
}

impl Default for BranchPolicy {
    fn default() -> Self {
        Self {
            method: LogGammaMethod::StirlingBinet,
            recurrence_threshold: 9.0,
            terms: STIRLING.len(),
        }
    }
}

impl BranchPolicy {
    /// The Weierstrass cross-check route with at least `terms` factors.
    pub fn weierstrass(terms: usize) -> Self {
        Self {
            method: LogGammaMethod::WeierstrassSeries,
            recurrence_threshold: 9.0,
            terms,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.recurrence_threshold >= 8.0) || !self.recurrence_threshold.is_finite() {
            return Err(domain(format!(
                "recurrence threshold {} must be at least 8",
                self.recurrence_threshold
            )));
        }
        match self.method {
            LogGammaMethod::StirlingBinet if !(1..=STIRLING.len()).contains(&self.terms) => {
                Err(domain(format!("Stirling terms must lie in 1..=10, got {}", self.terms)))
            }
            LogGammaMethod::WeierstrassSeries if self.terms == 0 => {
                Err(domain("Weierstrass series needs at least one factor"))
            }
            _ => Ok(()),
        }
    }
}

fn check_argument(z: Complex64) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(domain(format!("non-finite argument {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(domain(format!("argument {} lies on the cut (-inf, 0]", z.re)));
    }
    if z.norm() > MAX_MODULUS {
        return Err(Error::Overflow(format!("|z| = {:e} beyond Stirling range", z.norm())));
    }
    Ok(())
}

/// `log Γ(z)` on the holomorphic branch with `log Γ(1) = 0`.
pub fn log_gamma(z: Complex64, policy: &BranchPolicy) -> Result<Complex64> {
    policy.validate()?;
    check_argument(z)?;
    let value = match policy.method {
        LogGammaMethod::StirlingBinet => stirling_branch(z, policy.recurrence_threshold, policy.terms),
        LogGammaMethod::WeierstrassSeries => weierstrass_branch(z, policy.terms),
    };
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow(format!("log Gamma({z}) is not finite")))
    }
}

/// `Γ(z)^c := exp(c log Γ(z))` with the same branch.
pub fn gamma_power_c(z: Complex64, c: f64) -> Result<Complex64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(domain(format!("exponent c = {c} must be positive")));
    }
    let lg = log_gamma(z, &BranchPolicy::default())?;
    let w = lg * c;
    if w.re > f64::MAX.ln() {
        return Err(Error::Overflow(format!("Gamma({z})^{c} exceeds the exponent range")));
    }
    Ok(w.exp())
}

/// Default-policy `log Γ` without argument checks; callers guarantee `z ∈ 𝒜`.
#[inline]
pub(crate) fn lgamma(z: Complex64) -> Complex64 {
    stirling_branch(z, 9.0, STIRLING.len())
}

/// Leading Stirling part `(z - ½) Log z - z + ½ ln 2π`.
#[inline]
fn stirling_leading(z: Complex64) -> Complex64 {
    (z - 0.5) * z.ln() - z + HALF_LN_2PI
}

/// The Stirling correction sum, i.e. Binet's `μ(z)` for large `|z|`.
#[inline]
fn stirling_tail(z: Complex64, terms: usize) -> Complex64 {
    let r = z.inv();
    let r2 = r * r;
    let mut acc = Complex64::new(0.0, 0.0);
    for &coef in STIRLING[..terms].iter().rev() {
        acc = acc * r2 + coef;
    }
    acc * r
}

fn stirling_branch(z: Complex64, threshold: f64, terms: usize) -> Complex64 {
    if z.im == 0.0 && (z.re == 1.0 || z.re == 2.0) {
        return Complex64::new(0.0, 0.0);
    }
    if z.re < 0.0 {
        // Reflection: log Γ(z) = ln π - log Γ(1 - z) - L(z) in the upper
        // half-plane, where L(z) = -iπz + Log(1 - e^{2πiz}) - ln 2 + iπ/2 is
        // a holomorphic log sin(πz). Lower half-plane by conjugation.
        let (w, flip) = if z.im < 0.0 { (z.conj(), true) } else { (z, false) };
        let e = (Complex64::i() * std::f64::consts::TAU * w).exp();
        let log_sin = Complex64::new(-std::f64::consts::LN_2, std::f64::consts::FRAC_PI_2)
            - Complex64::i() * std::f64::consts::PI * w
            + ln_1p(-e);
        let v = std::f64::consts::PI.ln() - stirling_branch(1.0 - w, threshold, terms) - log_sin;
        return if flip { v.conj() } else { v };
    }
    if z.re >= threshold {
        return stirling_leading(z) + stirling_tail(z, terms);
    }
    let m = (threshold - z.re).ceil() as usize;
    let mut shift = Complex64::new(0.0, 0.0);
    for j in 0..m {
        shift += (z + j as f64).ln();
    }
    let zm = z + m as f64;
    stirling_leading(zm) + stirling_tail(zm, terms) - shift
}

/// Accurate principal `Log(1 + w)` for small `w`.
#[inline]
pub(crate) fn ln_1p(w: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * w.re + w.norm_sqr()).ln_1p();
    let im = w.im.atan2(1.0 + w.re);
    Complex64::new(re, im)
}

fn weierstrass_branch(z: Complex64, min_terms: usize) -> Complex64 {
    // -log Γ(z) = γz + Log z + Σ_{k≤n} (Log(1 + z/k) - z/k) + R_n(z) with
    // R_n(z) = Σ_{m≥2} (-1)^{m+1} z^m ζ(m, n+1) / m for |z| < n + 1.
    let n = min_terms.max((4.0 * z.norm()).ceil() as usize).max(8);
    let mut acc = EULER_GAMMA * z + z.ln();
    for k in (1..=n).rev() {
        let w = z / k as f64;
        acc += ln_1p(w) - w;
    }
    let q = (n + 1) as f64;
    let mut power = z;
    let mut tail = Complex64::new(0.0, 0.0);
    for m in 2..200 {
        power *= z;
        let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
        let term = power * (sign * hurwitz_zeta_unchecked(m as f64, q) / m as f64);
        tail += term;
        // Remaining terms are bounded geometrically by |z|/(n+1) <= 1/4.
        if term.norm() <= 1e-18 * (acc.norm() + tail.norm()).max(1e-300) {
            break;
        }
    }
    -(acc + tail)
}

/// Binet's function `μ(z) = log Γ(z) - [(z - ½) Log z - z + ½ ln 2π]`, `Re z > 0`.
pub fn binet_mu(z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) || !z.im.is_finite() || !z.re.is_finite() {
        return Err(domain(format!("Binet's function needs Re z > 0, got {z}")));
    }
    Ok(binet_mu_unchecked(z))
}

#[inline]
pub(crate) fn binet_mu_unchecked(z: Complex64) -> Complex64 {
    if z.norm() >= 9.0 {
        stirling_tail(z, STIRLING.len())
    } else {
        lgamma(z) - stirling_leading(z)
    }
}

/// `ln Γ(x)` for real `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    const THRESHOLD: f64 = 9.0;
    if let Some(f) = small_factorial(x) {
        return f.ln();
    }
    let (y, shift) = if x >= THRESHOLD {
        (x, 0.0)
    } else {
        let m = (THRESHOLD - x).ceil() as usize;
        let mut prod = 1.0;
        for j in 0..m {
            prod *= x + j as f64;
        }
        (x + m as f64, prod.ln())
    };
    let r = 1.0 / y;
    let r2 = r * r;
    let mut acc = 0.0;
    for &coef in STIRLING.iter().rev() {
        acc = acc * r2 + coef;
    }
    (y - 0.5) * y.ln() - y + HALF_LN_2PI + acc * r - shift
}

/// `(x - 1)!` for integers `1 ≤ x ≤ 30`, exact up to one rounding.
fn small_factorial(x: f64) -> Option<f64> {
    if x.fract() != 0.0 || !(1.0..=30.0).contains(&x) {
        return None;
    }
    Some((2..x as u32).fold(1.0, |acc, k| acc * k as f64))
}

/// `Γ(x)` for real `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    if let Some(f) = small_factorial(x) {
        return Ok(f);
    }
    let v = ln_gamma(x)?.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("Gamma({x}) overflows")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn anchors() {
        let p = BranchPolicy::default();
        let one = log_gamma(c(1.0, 0.0), &p).unwrap();
        assert_eq!(one, c(0.0, 0.0));
        let half = log_gamma(c(0.5, 0.0), &p).unwrap();
        assert_relative_eq!(half.re, 0.572_364_942_924_700_1, max_relative = 1e-14);
        assert_eq!(half.im, 0.0);
    }

    #[test]
    fn modulus_on_line_one_minus_i() {
        // |Γ(1+iy)|² = πy / sinh(πy)
        let v = log_gamma(c(1.0, -1.0), &BranchPolicy::default()).unwrap();
        let expected = (std::f64::consts::PI / std::f64::consts::PI.sinh()).sqrt();
        assert_relative_eq!(v.exp().norm(), expected, max_relative = 1e-13);
        assert_relative_eq!(expected, 0.521_564_4, max_relative = 1e-6);
    }

    #[test]
    fn gamma_power_examples() {
        assert_relative_eq!(gamma_power_c(c(3.0, 0.0), 2.0).unwrap().re, 4.0, max_relative = 1e-13);
        let g = gamma_power_c(c(1.0, -1.0), 1.0).unwrap();
        // conjugate of Γ(1+i) from the Weierstrass route
        let w = log_gamma(c(1.0, 1.0), &BranchPolicy::weierstrass(2000))
            .unwrap()
            .exp()
            .conj();
        assert_relative_eq!(g.re, w.re, max_relative = 1e-12);
        assert_relative_eq!(g.im, w.im, max_relative = 1e-12);
        assert_relative_eq!(g.re, 0.498_015_668_118_356, max_relative = 1e-9);
        assert_relative_eq!(g.im, 0.154_949_828_301_811, max_relative = 1e-9);
        let pi2 = gamma_power_c(c(0.5, 0.0), 4.0).unwrap();
        assert_relative_eq!(pi2.re, std::f64::consts::PI.powi(2), max_relative = 1e-13);
    }

    #[test]
    fn integer_powers_match_repeated_products() {
        for &x in &[0.3, 1.7, 4.2, 11.5] {
            let g = gamma(x).unwrap();
            for k in 1..=4 {
                let v = gamma_power_c(c(x, 0.0), k as f64).unwrap();
                assert_relative_eq!(v.re, g.powi(k), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn rejects_cut_and_bad_policy() {
        let p = BranchPolicy::default();
        assert!(matches!(log_gamma(c(0.0, 0.0), &p), Err(Error::Domain(_))));
        assert!(matches!(log_gamma(c(-2.5, 0.0), &p), Err(Error::Domain(_))));
        assert!(matches!(log_gamma(c(f64::NAN, 1.0), &p), Err(Error::Domain(_))));
        assert!(matches!(log_gamma(c(1e301, 1.0), &p), Err(Error::Overflow(_))));
        let bad = BranchPolicy {
            recurrence_threshold: 5.0,
            ..p
        };
        assert!(log_gamma(c(1.0, 1.0), &bad).is_err());
        assert!(matches!(gamma_power_c(c(200.0, 0.0), 4.0), Err(Error::Overflow(_))));
    }

    #[test]
    fn real_gamma_values() {
        assert_relative_eq!(gamma(5.0).unwrap(), 24.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(0.5).unwrap(), std::f64::consts::PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(ln_gamma(101.0).unwrap(), 363.739_375_555_563_47, max_relative = 1e-14);
        assert!(gamma(200.0).is_err());
        assert!(ln_gamma(-1.0).is_err());
    }

    #[test]
    fn branch_is_continuous_along_vertical_line() {
        let p = BranchPolicy::default();
        let mut prev = log_gamma(c(1.0, 50.0), &p).unwrap().im;
        for k in 1..=10_000 {
            let x = -50.0 + 0.01 * k as f64;
            let v = log_gamma(c(1.0, -x), &p).unwrap().im;
            assert!((v - prev).abs() < std::f64::consts::PI, "jump at x = {x}");
            prev = v;
        }
    }

    #[test]
    fn reflection_agrees_with_recurrence_and_weierstrass() {
        let w = BranchPolicy::weierstrass(64);
        for &(re, im) in &[(-0.3, 0.2), (-3.7, 1.5), (-12.2, -0.4), (-0.9, -7.0), (-25.5, 3.0)] {
            let z = c(re, im);
            let a = lgamma(z);
            // recurrence only: shift far enough that the reflection is not used
            let m = (9.0 - re).ceil() as usize;
            let mut s = c(0.0, 0.0);
            for j in 0..m {
                s += (z + j as f64).ln();
            }
            let b = lgamma(z + m as f64) - s;
            assert!((a - b).norm() < 1e-11 * (1.0 + b.norm()), "{z}: {a} vs {b}");
            let ws = log_gamma(z, &w).unwrap();
            assert!((a - ws).norm() < 1e-10 * (1.0 + b.norm()), "{z}: {a} vs {ws}");
        }
    }

    #[test]
    fn methods_agree_on_grid() {
        let s = BranchPolicy::default();
        let w = BranchPolicy::weierstrass(64);
        let mut max_err: f64 = 0.0;
        // 40 x 25 = 1000 points covering Re z in [0.1, 20], |Im z| <= 50
        for i in 0..40 {
            let re = 0.1 + 19.9 * i as f64 / 39.0;
            for j in 0..25 {
                let im = -50.0 + 100.0 * j as f64 / 24.0;
                let z = c(re, im);
                let a = log_gamma(z, &s).unwrap();
                let b = log_gamma(z, &w).unwrap();
                max_err = max_err.max((a - b).norm() / a.norm().max(1.0));
            }
        }
        assert!(max_err < 1e-10, "max relative disagreement {max_err:e}");
    }

    #[test]
    fn binet_small_remainder() {
        let mu = binet_mu(c(9.5, 0.0)).unwrap().re;
        let direct = ln_gamma(9.5).unwrap() - ((9.0) * 9.5f64.ln() - 9.5 + HALF_LN_2PI);
        assert_relative_eq!(mu, direct, max_relative = 1e-11);
        assert!(binet_mu(c(0.0, 1.0)).is_err());
    }

    proptest! {
        #[test]
        fn binet_bound(re in 0.05f64..40.0, im in -200.0f64..200.0) {
            let mu = binet_mu(c(re, im)).unwrap();
            prop_assert!(mu.norm() <= 1.0 / (12.0 * re) * (1.0 + 1e-9) + 1e-14);
        }

        #[test]
        fn conjugate_symmetry(re in -30.0f64..60.0, im in 0.01f64..80.0) {
            let z = c(re, im);
            let a = lgamma(z.conj());
            let b = lgamma(z).conj();
            prop_assert!((a - b).norm() <= 1e-13 * (1.0 + a.norm()));
        }

        #[test]
        fn recurrence_identity(re in 0.05f64..30.0, im in -40.0f64..40.0) {
            let z = c(re, im);
            let lhs = lgamma(z + 1.0);
            let rhs = lgamma(z) + z.ln();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        }
    }
}
