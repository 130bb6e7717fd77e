//! Digamma, polygamma and the Hurwitz zeta function on the positive axis.

use crate::error::{domain, Result};

/// `B_{2k}` for `k = 1..=12`.
const BERNOULLI: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174_611.0 / 330.0,
    854_513.0 / 138.0,
    -236_364_091.0 / 2730.0,
];

/// Digamma `Ψ(x) = Γ'(x)/Γ(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("digamma needs x > 0, got {x}")));
    }
    Ok(digamma_unchecked(x))
}

pub(crate) fn digamma_unchecked(mut x: f64) -> f64 {
    let mut shift = 0.0;
    while x < 10.0 {
        shift += 1.0 / x;
        x += 1.0;
    }
    let r2 = 1.0 / (x * x);
    let mut acc = 0.0;
    for k in (1..=7).rev() {
        acc = acc * r2 + BERNOULLI[k - 1] / (2 * k) as f64;
    }
    x.ln() - 0.5 / x - acc * r2 - shift
}

/// Polygamma `Ψ^{(n)}(x)` for `x > 0`; `n = 0` is the digamma function.
///
/// Evaluated by upward recurrence and the asymptotic expansion, independently
/// of [`hurwitz_zeta`].
pub fn polygamma(n: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("polygamma needs x > 0, got {x}")));
    }
    if n == 0 {
        return Ok(digamma_unchecked(x));
    }
    let nf = n as f64;
    // ψ^{(n)}(x) = ψ^{(n)}(x+m) - (-1)^n n! Σ_{j<m} (x+j)^{-n-1}
    let start = 12.0f64.max(1.5 * nf);
    let mut y = x;
    let mut shift = 0.0;
    while y < start {
        shift += y.powf(-nf - 1.0);
        y += 1.0;
    }
    let ln_fact_n = (1..=n).map(|k| (k as f64).ln()).sum::<f64>();
    // asymptotic: (n-1)!/y^n + n!/(2 y^{n+1}) + Σ B_{2k} (2k+n-1)!/((2k)! y^{2k+n})
    let base = (ln_fact_n - nf.ln() - nf * y.ln()).exp();
    let mut series = base + base * nf / (2.0 * y);
    // ratio = (2k+n-1)! / ((2k)! (n-1)!)
    let mut ratio = 1.0;
    let mut ypow = 1.0;
    for k in 1..=BERNOULLI.len() {
        let kk = 2 * k;
        ratio *= ((kk + n as usize - 1) * (kk + n as usize - 2)) as f64 / (kk * (kk - 1)) as f64;
        ypow /= y * y;
        let term = BERNOULLI[k - 1] * ratio * base * ypow;
        series += term;
        if term.abs() < 1e-17 * series.abs() {
            break;
        }
    }
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let fact_n = ln_fact_n.exp();
    Ok(sign * series + sign * fact_n * shift)
}

/// Hurwitz zeta `ζ(s, q) = Σ_{k≥0} (q + k)^{-s}` for `s > 1`, `q > 0`.
pub fn hurwitz_zeta(s: f64, q: f64) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(domain(format!("hurwitz_zeta needs s > 1, got {s}")));
    }
    if !(q > 0.0) || !q.is_finite() {
        return Err(domain(format!("hurwitz_zeta needs q > 0, got {q}")));
    }
    Ok(hurwitz_zeta_unchecked(s, q))
}

/// Euler–Maclaurin summation with the cut-over point pushed past `s` so the
/// correction terms decrease geometrically.
pub(crate) fn hurwitz_zeta_unchecked(s: f64, q: f64) -> f64 {
    let cut = 10.0f64.max(1.5 * s);
    let mut head = 0.0;
    let mut a = q;
    while a < cut {
        head += a.powf(-s);
        a += 1.0;
    }
    let a_s = a.powf(-s);
    let mut sum = head + a * a_s / (s - 1.0) + 0.5 * a_s;
    // B_{2j}/(2j)! · s(s+1)...(s+2j-2) · a^{-s-2j+1}
    let mut rising = s; // s(s+1)...(s+2j-2)
    let mut fact = 2.0; // (2j)!
    let mut apow = a_s / a; // a^{-s-1}
    for j in 1..=BERNOULLI.len() {
        let term = BERNOULLI[j - 1] / fact * rising * apow;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        let jj = 2 * j;
        rising *= (s + (jj - 1) as f64) * (s + jj as f64);
        fact *= ((jj + 1) * (jj + 2)) as f64;
        apow /= a * a;
    }
    sum
}

/// Solve `Ψ(x) = y` for `x > 0` (Ψ is increasing on the positive axis).
pub(crate) fn inverse_digamma(y: f64) -> f64 {
    // Initial guess from Ψ(x) ≈ ln(x - ½) for large x and -1/x - γ near 0.
    let mut x = if y >= -2.22 {
        y.exp() + 0.5
    } else {
        -1.0 / (y + super::EULER_GAMMA)
    };
    for _ in 0..60 {
        let f = digamma_unchecked(x) - y;
        let d = polygamma(1, x).unwrap_or(f64::INFINITY);
        let mut next = x - f / d;
        if next <= 0.0 {
            next = x / 2.0;
        }
        if (next - x).abs() <= 1e-15 * x {
            return next;
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::EULER_GAMMA;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const ZETA3: f64 = 1.202_056_903_159_594_3;

    #[test]
    fn digamma_examples() {
        assert_relative_eq!(digamma(1.0).unwrap(), -EULER_GAMMA, max_relative = 1e-14);
        assert_relative_eq!(digamma(2.0).unwrap(), 1.0 - EULER_GAMMA, max_relative = 1e-14);
        assert_relative_eq!(
            digamma(0.5).unwrap(),
            -EULER_GAMMA - 2.0 * 2f64.ln(),
            max_relative = 1e-14
        );
        assert!(digamma(0.0).is_err());
        assert!(digamma(-1.5).is_err());
    }

    #[test]
    fn polygamma_examples() {
        assert_relative_eq!(polygamma(1, 1.0).unwrap(), PI * PI / 6.0, max_relative = 1e-14);
        assert_relative_eq!(polygamma(2, 1.0).unwrap(), -2.0 * ZETA3, max_relative = 1e-13);
        assert_relative_eq!(polygamma(3, 0.5).unwrap(), PI.powi(4), max_relative = 1e-13);
        assert_relative_eq!(polygamma(0, 3.0).unwrap(), 1.5 - EULER_GAMMA, max_relative = 1e-14);
        assert!(polygamma(1, 0.0).is_err());
    }

    #[test]
    fn zeta_examples() {
        assert_relative_eq!(hurwitz_zeta(2.0, 1.0).unwrap(), PI * PI / 6.0, max_relative = 1e-14);
        assert_relative_eq!(hurwitz_zeta(3.0, 2.0).unwrap(), ZETA3 - 1.0, max_relative = 1e-14);
        assert_relative_eq!(hurwitz_zeta(2.0, 0.5).unwrap(), PI * PI / 2.0, max_relative = 1e-14);
        assert!(hurwitz_zeta(1.0, 1.0).is_err());
        assert!(hurwitz_zeta(2.0, 0.0).is_err());
        // large s is dominated by the first term
        assert_relative_eq!(
            hurwitz_zeta(60.0, 1.0).unwrap(),
            1.0 + 2f64.powi(-60),
            max_relative = 1e-15
        );
    }

    #[test]
    fn zeta_against_direct_summation() {
        // Direct summation with an integral tail estimate is the oracle.
        for &(s, q) in &[(2.0, 0.5), (2.5, 3.3), (4.0, 0.1), (7.0, 1.0), (1.5, 2.0)] {
            let n = 2_000_000usize;
            let mut direct = 0.0;
            for k in (0..n).rev() {
                direct += (q + k as f64).powf(-s);
            }
            let a = q + n as f64;
            direct += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
            assert_relative_eq!(hurwitz_zeta(s, q).unwrap(), direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn polygamma_matches_zeta() {
        let mut fact = 1.0;
        for n in 1..=6u32 {
            fact *= n as f64;
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            for &b in &[0.5, 1.0, 2.0, 7.3] {
                let lhs = polygamma(n, b).unwrap();
                let rhs = sign * fact * hurwitz_zeta(n as f64 + 1.0, b).unwrap();
                assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn inverse_digamma_round_trip() {
        for &x in &[1e-6, 0.01, 0.3, 1.4616, 2.0, 17.0, 1e4, 1e8] {
            let y = digamma_unchecked(x);
            assert_relative_eq!(inverse_digamma(y), x, max_relative = 1e-11);
        }
    }
}
