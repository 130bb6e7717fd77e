//! Macdonald function `K₀` on the positive axis.

use super::EULER_GAMMA;
use crate::error::{domain, Result};

/// Below this argument the power series is used, above it Steed's
/// continued fraction.
const SPLIT: f64 = 2.0;

/// `K₀(x)` for `x > 0`. Underflows to zero for `x` beyond about 700; use
/// [`bessel_k0_scaled`] or [`ln_bessel_k0`] there.
pub fn bessel_k0(x: f64) -> Result<f64> {
    check(x)?;
    Ok(if x <= SPLIT {
        k0_series(x)
    } else {
        k0_cf2(x) * (-x).exp()
    })
}

/// `eˣ K₀(x)` for `x > 0`.
pub fn bessel_k0_scaled(x: f64) -> Result<f64> {
    check(x)?;
    Ok(if x <= SPLIT { k0_series(x) * x.exp() } else { k0_cf2(x) })
}

/// `ln K₀(x)`, finite for every positive finite `x`.
pub fn ln_bessel_k0(x: f64) -> Result<f64> {
    check(x)?;
    Ok(if x <= SPLIT {
        k0_series(x).ln()
    } else {
        k0_cf2(x).ln() - x
    })
}

fn check(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("K0 needs a positive finite argument, got {x}")));
    }
    Ok(())
}

/// `K₀(x) = -(ln(x/2) + γ) I₀(x) + Σ_{k≥1} H_k (x²/4)^k / (k!)²`.
fn k0_series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut harmonic = 0.0;
    let mut rest = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= y / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        rest += harmonic * term;
        if term < 1e-18 * i0 {
            break;
        }
    }
    -((0.5 * x).ln() + EULER_GAMMA) * i0 + rest
}

/// Steed's continued fraction (Temme's CF2) for `eˣ K₀(x)`, `x ≳ 2`.
fn k0_cf2(x: f64) -> f64 {
    let a1 = 0.25; // ¼ - ν² with ν = 0
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    (std::f64::consts::PI / (2.0 * x)).sqrt() / s
}
