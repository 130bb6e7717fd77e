//! The semigroup on the additive group: `x = ln(1/t)` turns `τ_c(a,b)` into
//! probability densities on ℝ,
//!
//! ```text
//! g_c(a,b)(x) = e^{-x} e_c(a,b)(e^{-x}),
//! ```
//!
//! with `g_1(a,1)` the Gumbel density of scale `a`. The moments of `g_c` are
//! polynomials in `c` whose coefficients follow from the cumulants
//! `σ_0 = -aΨ(b)`, `σ_n = a^{n+1} n! ζ(n+1, b)`.

use serde::{Deserialize, Serialize};

use crate::asympt::{ln_origin_leading, ln_tail_leading, TailExponent};
use crate::density::{density_ln, DensityOptions, SemigroupParams};
use crate::error::{domain, Error, Result};
use crate::moments::log_range;
use crate::quad::{try_integrate_adaptive, QuadOptions, QuadResult};
use crate::specfun::{digamma_unchecked, hurwitz_zeta_unchecked, ln_gamma_unchecked};

/// `ln g_c(a,b)(x)`; finite for every finite `x`.
pub fn ln_gumbel_density(params: &SemigroupParams, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain(format!("x = {x} must be finite")));
    }
    Ok(density_ln(params, -x, &DensityOptions::default())?.ln_value - x)
}

/// `g_c(a,b)(x)`; underflows to zero far in either tail.
pub fn gumbel_density(params: &SemigroupParams, x: f64) -> Result<f64> {
    Ok(ln_gumbel_density(params, x)?.exp())
}

/// Tails are entered at `|x| ≥ 5 max(a, ac)`.
pub fn tail_threshold(params: &SemigroupParams) -> f64 {
    5.0 * params.a().max(params.a() * params.c())
}

/// A leading-term tail approximation of `g_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GumbelTail {
    pub x: f64,
    pub leading_term: f64,
    pub ln_leading: f64,
}

/// Leading term as `x → -∞`:
/// `(2π)^{(c-1)/2} / (a√c Γ(b)^c) · exp(-c e^{-x/(ac)}) / exp(x (b - 1/2 + 1/(2c))/a)`.
pub fn gumbel_tail_left(params: &SemigroupParams, x: f64) -> Result<GumbelTail> {
    let x0 = tail_threshold(params);
    if !(x <= -x0) || !x.is_finite() {
        return Err(Error::Regime(format!("left tail needs x <= {}, got {x}", -x0)));
    }
    let ln_leading = ln_tail_leading(params, -x, TailExponent::Stated) - x;
    Ok(GumbelTail {
        x,
        leading_term: ln_leading.exp(),
        ln_leading,
    })
}

/// Leading term as `x → +∞`: `e^{-bx/a} x^{c-1} / ([aΓ(b)]^c Γ(c))`.
pub fn gumbel_tail_right(params: &SemigroupParams, x: f64) -> Result<GumbelTail> {
    let x0 = tail_threshold(params);
    if !(x >= x0) || !x.is_finite() {
        return Err(Error::Regime(format!("right tail needs x >= {x0}, got {x}")));
    }
    let ln_leading = ln_origin_leading(params, -x) - x;
    Ok(GumbelTail {
        x,
        leading_term: ln_leading.exp(),
        ln_leading,
    })
}

/// Cumulants `σ_0, …, σ_N` of `G_1(a,b)`; those of `G_c` are `c σ_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantSet {
    pub a: f64,
    pub b: f64,
    pub sigma: Vec<f64>,
}

pub fn cumulants(a: f64, b: f64, n: usize) -> Result<CumulantSet> {
    for (name, v) in [("a", a), ("b", b)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(domain(format!("{name} = {v} must be positive and finite")));
        }
    }
    let sigma = (0..=n)
        .map(|k| {
            if k == 0 {
                -a * digamma_unchecked(b)
            } else {
                let kf = k as f64;
                ((kf + 1.0) * a.ln() + ln_gamma_unchecked(kf + 1.0)).exp() * hurwitz_zeta_unchecked(kf + 1.0, b)
            }
        })
        .collect();
    Ok(CumulantSet { a, b, sigma })
}

/// Default cap on the order of [`moment_polynomials`]; the coefficients
/// grow factorially.
pub const DEFAULT_POLY_ORDER: usize = 30;

/// Coefficients `a_{n,k}`, `1 ≤ k ≤ n ≤ N`, of `s_n(c) = Σ_k a_{n,k} c^k`,
/// the moments of `g_c(a,b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentPolynomial {
    /// `rows[n-1][k-1] = a_{n,k}`.
    rows: Vec<Vec<f64>>,
}

impl MomentPolynomial {
    pub fn order(&self) -> usize {
        self.rows.len()
    }

    /// `a_{n,k}` for `1 ≤ k ≤ n ≤ N`.
    pub fn coefficient(&self, n: usize, k: usize) -> f64 {
        assert!(
            1 <= k && k <= n && n <= self.rows.len(),
            "a_{{{n},{k}}} outside the table"
        );
        self.rows[n - 1][k - 1]
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.rows[n - 1]
    }

    /// `s_n(c) = Σ_k a_{n,k} c^k`, with `s_0 = 1`.
    pub fn evaluate(&self, n: usize, c: f64) -> f64 {
        if n == 0 {
            return 1.0;
        }
        self.rows[n - 1].iter().rev().fold(0.0, |acc, &coef| (acc + coef) * c)
    }
}

/// Build the table from `a_{n,1} = σ_{n-1}` and
/// `a_{n+1,k+1} = Σ_{j=k}^{n} a_{j,k} C(n,j) σ_{n-j}`.
pub fn moment_polynomials(cumulants: &CumulantSet, n: usize) -> Result<MomentPolynomial> {
    if cumulants.sigma.len() < n {
        return Err(Error::InsufficientCumulants {
            needed: n,
            have: cumulants.sigma.len(),
        });
    }
    let sigma = &cumulants.sigma;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for m in 1..=n {
        let mut row = vec![0.0; m];
        row[0] = sigma[m - 1];
        // Row m = n' + 1 with n' = m - 1.
        let np = m - 1;
        for k in 1..m {
            let mut sum = Kahan::default();
            for j in k..=np {
                sum.add(rows[j - 1][k - 1] * binomial(np, j) * sigma[np - j]);
            }
            row[k] = sum.total();
        }
        rows.push(row);
    }
    Ok(MomentPolynomial { rows })
}

/// Binomial coefficient `C(n, k)` as a float, exact while it fits in 53 bits.
pub fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

#[derive(Default)]
struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum
    }
}

/// `∫ xⁿ g_c(a,b)(x) dx` by adaptive quadrature; `n ≤ 8`.
///
/// Fails when the estimated error exceeds `1e-5·|value| + 1e-8`.
pub fn gumbel_moment_quadrature(params: &SemigroupParams, n: u32) -> Result<QuadResult> {
    if n > 8 {
        return Err(domain(format!("quadrature moments are limited to n <= 8, got {n}")));
    }
    let (u_lo, u_hi) = log_range(params, 0.0, n, (1e-16f64).ln())?;
    let opts = DensityOptions::default();
    // In u = -x the measure g_c(x) dx is t e_c(t) du.
    let r = try_integrate_adaptive(
        |u| {
            let d = density_ln(params, u, &opts)?;
            Ok((-u).powi(n as i32) * (u + d.ln_value).exp())
        },
        u_lo,
        u_hi,
        &QuadOptions::new(1e-11, 1e-9).max_intervals(4000),
    )?;
    let tol = 1e-5 * r.value.abs() + 1e-8;
    if r.abs_err > tol {
        return Err(Error::Accuracy {
            estimate: r.abs_err,
            tolerance: tol,
            context: format!("Gumbel moment {n} of {params:?}"),
        });
    }
    Ok(r)
}

/// Upper bounds for `s_{2n}^{1/(2n)}` of `g_1(a,b)` and their growth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamburgerBound {
    /// `bounds[n-1]` bounds `s_{2n}^{1/(2n)}`.
    pub bounds: Vec<f64>,
    /// `ratios[n-1] = bounds[n-1] / n`.
    pub ratios: Vec<f64>,
    /// Mean ratio over the upper half of the range.
    pub fitted_k: f64,
}

impl HamburgerBound {
    /// Largest ratio for `n ∈ [lo, hi]`.
    pub fn max_ratio(&self, lo: usize, hi: usize) -> f64 {
        self.ratios[lo - 1..hi]
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `s_{2n}^{1/(2n)} < a Γ(b)^{-1/(2n)} [((2n)!/b^{2n+1})^{1/(2n)} + Γ(2n+b)^{1/(2n)}]`
/// for `n = 1..=N`, evaluated in the log domain; `N ≥ 2`.
pub fn hamburger_carleman_bound(a: f64, b: f64, n_max: usize) -> Result<HamburgerBound> {
    if n_max < 2 {
        return Err(domain(format!("Hamburger bound needs N >= 2, got {n_max}")));
    }
    for (name, v) in [("a", a), ("b", b)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(domain(format!("{name} = {v} must be positive and finite")));
        }
    }
    let lgb = ln_gamma_unchecked(b);
    let bounds: Vec<f64> = (1..=n_max)
        .map(|n| {
            let m = 2.0 * n as f64;
            let first = (ln_gamma_unchecked(m + 1.0) - (m + 1.0) * b.ln()) / m;
            let second = ln_gamma_unchecked(m + b) / m;
            let hi = first.max(second);
            let lse = hi + ((first - hi).exp() + (second - hi).exp()).ln();
            (a.ln() - lgb / m + lse).exp()
        })
        .collect();
    let ratios: Vec<f64> = bounds.iter().enumerate().map(|(i, v)| v / (i + 1) as f64).collect();
    let upper = &ratios[n_max / 2..];
    let fitted_k = upper.iter().sum::<f64>() / upper.len() as f64;
    Ok(HamburgerBound {
        bounds,
        ratios,
        fitted_k,
    })
}
