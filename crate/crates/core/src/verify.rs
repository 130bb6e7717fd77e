//! The cross-module acceptance suite, shared by the integration tests and
//! the `verify` subcommand. Every check carries pinned tolerances and a
//! runtime budget.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asympt::{ln_tail_leading, origin_asymptotic, tail_asymptotic, verify_order, Regime, TailExponent};
use crate::density::{
    density_c1, density_c2, density_inversion, density_ln, DensityOptions, InversionPlan, Method, SemigroupParams,
};
use crate::error::Result;
use crate::gumbel::{binomial, cumulants, gumbel_moment_quadrature, hamburger_carleman_bound, moment_polynomials};
use crate::moments::{carleman_diagnostic, classify, krein_diagnostic, moment, moment_quadrature};
use crate::semigroup::{convolution_check, moment_std_err, sample_gumbel_root, sample_tau_integer_c, SampleMean};
use crate::specfun::EULER_GAMMA;

/// Outcome of one acceptance check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the check's figure of merit.
    pub metric: f64,
    pub tolerance: f64,
    pub detail: String,
    pub seconds: f64,
    pub time_budget: f64,
}

impl CheckReport {
    /// One line: `[PASS] 1 closed-form oracles: metric 3.1e-14 <= 1e-8 (0.4 s / 30 s)`.
    pub fn line(&self) -> String {
        format!(
            "[{}] {} {}: metric {:.3e} vs tolerance {:.1e} ({:.1} s of {:.0} s) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.metric,
            self.tolerance,
            self.seconds,
            self.time_budget,
            self.detail
        )
    }
}

/// Identifiers and names of the checks, in order.
pub const CHECKS: [(u8, &str); 9] = [
    (1, "closed-form oracles"),
    (2, "moment reproduction"),
    (3, "semigroup law"),
    (4, "tail asymptotics"),
    (5, "origin asymptotics"),
    (6, "determinacy classifier"),
    (7, "Gumbel cumulants and moment polynomials"),
    (8, "Hamburger bound"),
    (9, "Monte Carlo cross-check"),
];

/// Seed used by the Monte Carlo check.
pub const MC_SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    metric: f64,
    tolerance: f64,
    detail: String,
}

/// Run check `id` (1 to 9).
pub fn run_check(id: u8) -> CheckReport {
    let (name, budget, f): (&str, f64, fn() -> Result<Outcome>) = match id {
        1 => (CHECKS[0].1, 30.0, closed_form_oracles),
        2 => (CHECKS[1].1, 120.0, moment_reproduction),
        3 => (CHECKS[2].1, 120.0, semigroup_law),
        4 => (CHECKS[3].1, 60.0, tail_asymptotics),
        5 => (CHECKS[4].1, 60.0, origin_asymptotics),
        6 => (CHECKS[5].1, 60.0, determinacy),
        7 => (CHECKS[6].1, 60.0, gumbel_polynomials),
        8 => (CHECKS[7].1, 60.0, hamburger),
        9 => (CHECKS[8].1, 60.0, monte_carlo),
        _ => panic!("no check {id}"),
    };
    let start = Instant::now();
    let out = f();
    let seconds = start.elapsed().as_secs_f64();
    let (passed, metric, tolerance, detail) = match out {
        Ok(o) => (o.passed && seconds < budget, o.metric, o.tolerance, o.detail),
        Err(e) => (false, f64::NAN, f64::NAN, format!("error: {e}")),
    };
    CheckReport {
        id,
        name: name.to_string(),
        passed,
        metric,
        tolerance,
        detail,
        seconds,
        time_budget: budget,
    }
}

/// Checks that fail on the shipped configuration, with the reason.
pub const KNOWN_FAILURES: [(u8, &str); 2] = [
    (
        5,
        "the leading term misses the constant -2γ of 2K0(2√t) = ln(1/t) - 2γ + o(1); the ratio is 0.937 at 1e-8 and needs t < 1e-10 for 5%",
    ),
    (
        9,
        "with the pinned seed the worst of 24 statistics, E[T³] at (1,1,3), lies 4.4 SE out; its summands are too heavy-tailed for the normal 4 SE rule",
    ),
];

/// Run all checks in order.
pub fn run_all() -> Vec<CheckReport> {
    CHECKS.iter().map(|&(id, _)| run_check(id)).collect()
}

fn p(a: f64, b: f64, c: f64) -> SemigroupParams {
    SemigroupParams::new(a, b, c).expect("fixed grid parameters are valid")
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect()
}

fn fold_max(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| if x > m || x.is_nan() { x } else { m })
}

/// Line inversion against `e_1` and the `K₀` formula, absolute error.
fn closed_form_oracles() -> Result<Outcome> {
    const TOL: f64 = 1e-8;
    let ts = log_grid(1e-2, 1e2, 20);
    let pairs = [(1.0, 1.0), (2.0, 1.0), (1.0, 3.0), (0.5, 2.0)];
    let errs = pairs
        .par_iter()
        .flat_map(|&(a, b)| [(a, b, 1.0), (a, b, 2.0)])
        .map(|(a, b, c)| {
            let prm = p(a, b, c);
            let mut worst: f64 = 0.0;
            for &t in &ts {
                let plan = InversionPlan::saddle(&prm, t, 1e-12)?;
                let inv = density_inversion(&prm, t, &plan)?.value;
                let exact = if c == 1.0 {
                    density_c1(&prm, t)?
                } else {
                    density_c2(&prm, t)?
                }
                .value;
                worst = worst.max((inv - exact).abs());
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>>>()?;
    let metric = fold_max(errs);
    Ok(Outcome {
        passed: metric <= TOL,
        metric,
        tolerance: TOL,
        detail: "max |inversion - closed form|, 20 t in [1e-2, 1e2], 4 (a,b), c in {1,2}".into(),
    })
}

/// `∫ tⁿ e_c dt / s_n^c - 1` over the 45-point grid, `n ≤ 4`.
fn moment_reproduction() -> Result<Outcome> {
    const TOL: f64 = 1e-5;
    let mut grid = Vec::new();
    for a in [0.5, 1.0, 2.0] {
        for b in [0.5, 1.0, 3.0] {
            for c in [0.5, 1.0, 1.5, 2.0, 3.0] {
                grid.push(p(a, b, c));
            }
        }
    }
    let errs = grid
        .par_iter()
        .map(|prm| {
            let r = moment_quadrature(prm, 4, 1e-9)?;
            Ok(fold_max(r.iter().map(|q| (q.value - 1.0).abs())))
        })
        .collect::<Result<Vec<_>>>()?;
    let metric = fold_max(errs);
    Ok(Outcome {
        passed: metric <= TOL,
        metric,
        tolerance: TOL,
        detail: "max relative moment error, n = 0..4, 45 parameter triples".into(),
    })
}

/// Convolution residuals; the `(1,1)` pairs must hit the `K₀` route.
fn semigroup_law() -> Result<Outcome> {
    const TOL: f64 = 1e-5;
    let ts = [0.5, 1.0, 2.0, 5.0];
    let mut worst: f64 = 0.0;
    let mut k0_route = true;
    for (a, b) in [(1.0, 1.0), (2.0, 3.0)] {
        for (c, d) in [(1.0, 1.0), (1.0, 2.0), (0.5, 0.5)] {
            let r = convolution_check(&p(a, b, c), &p(a, b, d), &ts)?;
            worst = worst.max(r.max_residual);
            if c == 1.0 && d == 1.0 {
                k0_route &= r.points.iter().all(|pt| pt.direct_method == Method::ClosedFormC2);
            }
        }
    }
    Ok(Outcome {
        passed: worst <= TOL && k0_route,
        metric: worst,
        tolerance: TOL,
        detail: format!("max residual over 6 (a,b,c,d), 4 t each; c = d = 1 uses the K0 formula: {k0_route}"),
    })
}

/// Ratio at `t = 10⁶`, fitted order slope, and the `c = 1` collapse.
fn tail_asymptotics() -> Result<Outcome> {
    let prm = p(1.0, 1.0, 2.0);
    let t = 1e6;
    let lead = tail_asymptotic(&prm, t)?;
    let d = density_ln(&prm, t.ln(), &DensityOptions::default())?;
    let ratio = (d.ln_value - lead.ln_leading).exp();
    let fit = verify_order(&prm, Regime::Tail, &log_grid(1e2, 1e6, 9))?;
    let slope_ok = (fit.slope + 0.5).abs() <= 0.3;
    let mut collapse: f64 = 0.0;
    for prm in [p(1.0, 1.0, 1.0), p(2.0, 0.5, 1.0), p(0.5, 3.0, 1.0)] {
        for t in log_grid(2.0, 1e6, 12) {
            let exact = density_c1(&prm, t)?.ln_value;
            let lead = ln_tail_leading(&prm, t.ln(), TailExponent::Stated);
            collapse = collapse.max((lead - exact).abs() / exact.abs().max(1.0));
        }
    }
    let collapse_ok = collapse <= 1e-14;
    Ok(Outcome {
        passed: (0.95..=1.05).contains(&ratio) && slope_ok && collapse_ok,
        metric: (ratio - 1.0).abs(),
        tolerance: 0.05,
        detail: format!(
            "ratio at t = 1e6: {ratio:.6}; fitted slope {:.3} (want -0.5 +- 0.3); c = 1 collapse error {collapse:.1e}",
            fit.slope
        ),
    })
}

/// Ratio at `t = 10⁻⁸` against the `K₀` formula.
fn origin_asymptotics() -> Result<Outcome> {
    let prm = p(1.0, 1.0, 2.0);
    let t = 1e-8;
    let lead = origin_asymptotic(&prm, t)?;
    let exact = density_c2(&prm, t)?;
    let ratio = (exact.ln_value - lead.ln_leading).exp();
    // The correction is -2γ/ln(1/t), so the ratio creeps to 1 only
    // logarithmically; report where it actually gets there.
    let later: Vec<String> = [1e-10, 1e-12, 1e-20]
        .iter()
        .map(|&t| {
            let r = (density_c2(&prm, t)?.ln_value - origin_asymptotic(&prm, t)?.ln_leading).exp();
            Ok(format!("{r:.4} at {t:e}"))
        })
        .collect::<Result<_>>()?;
    Ok(Outcome {
        passed: (ratio - 1.0).abs() <= 0.05,
        metric: (ratio - 1.0).abs(),
        tolerance: 0.05,
        detail: format!(
            "K0-formula / leading term at t = 1e-8: {ratio:.6}; {}",
            later.join(", ")
        ),
    })
}

/// Verdicts, Carleman exponents and Krein flags on a 16-point `(a, c)` grid.
fn determinacy() -> Result<Outcome> {
    let grid: Vec<(f64, f64)> = [0.5, 1.0, 2.0, 4.0]
        .iter()
        .flat_map(|&a| [0.25, 1.0, 1.5, 2.0].map(|c| (a, c)))
        .collect();
    let mut exp_err: f64 = 0.0;
    let mut verdicts = 0;
    let mut kreins = 0;
    let mut boundary = 0;
    for &(a, c) in &grid {
        let prm = p(a, 1.0, c);
        let v = classify(&prm);
        let indeterminate = a * c > 2.0;
        verdicts += (v.determinate != indeterminate) as usize;
        boundary += v.boundary as usize;
        let carl = carleman_diagnostic(&prm, 10_000)?;
        exp_err = exp_err.max((carl.fitted_exponent + a * c / 2.0).abs());
        kreins += (krein_diagnostic(&prm, 1.0, 1e4)?.bounded == indeterminate) as usize;
    }
    let n = grid.len();
    Ok(Outcome {
        passed: verdicts == n && kreins == n && boundary > 0 && exp_err <= 0.15,
        metric: exp_err,
        tolerance: 0.15,
        detail: format!(
            "verdicts {verdicts}/{n}, Krein flags {kreins}/{n}, boundary points {boundary}; metric is max |Carleman exponent + ac/2|"
        ),
    })
}

/// Quadrature of `s_1(1)`, `s_2(1)` and the closed-form rows of `a_{n,k}`.
fn gumbel_polynomials() -> Result<Outcome> {
    let prm = p(1.0, 1.0, 1.0);
    let s1 = gumbel_moment_quadrature(&prm, 1)?.value;
    let s2 = gumbel_moment_quadrature(&prm, 2)?.value;
    let e1 = EULER_GAMMA;
    let e2 = std::f64::consts::PI.powi(2) / 6.0 + EULER_GAMMA * EULER_GAMMA;
    let quad_err = ((s1 - e1) / e1).abs().max(((s2 - e2) / e2).abs());
    let mut row_err: f64 = 0.0;
    for (a, b) in [(1.0, 1.0), (2.0, 0.5), (0.5, 3.0)] {
        let s = cumulants(a, b, 12)?;
        let t = moment_polynomials(&s, 12)?;
        let rel = |x: f64, y: f64| if x == y { 0.0 } else { ((x - y) / y).abs() };
        for n in 1..=12usize {
            row_err = row_err.max(rel(t.coefficient(n, 1), s.sigma[n - 1]));
            row_err = row_err.max(rel(t.coefficient(n, n), s.sigma[0].powi(n as i32)));
            if n >= 2 {
                let expect = binomial(n, 2) * s.sigma[0].powi(n as i32 - 2) * s.sigma[1];
                row_err = row_err.max(rel(t.coefficient(n, n - 1), expect));
            }
        }
    }
    Ok(Outcome {
        passed: quad_err <= 1e-4 && row_err <= 1e-12,
        metric: quad_err,
        tolerance: 1e-4,
        detail: format!(
            "quadrature s_1 = {s1:.10}, s_2 = {s2:.10}; row identities max rel. error {row_err:.1e} (<= 1e-12)"
        ),
    })
}

/// `max_{50 ≤ n ≤ 500} bound/n` against its value at `n = 500`.
fn hamburger() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for (a, b) in [(1.0, 1.0), (2.0, 0.5)] {
        let h = hamburger_carleman_bound(a, b, 500)?;
        worst = worst.max(h.max_ratio(50, 500) / h.ratios[499]);
    }
    Ok(Outcome {
        passed: worst <= 1.2,
        metric: worst,
        tolerance: 1.2,
        detail: "max over n in [50, 500] of bound/n divided by its value at n = 500".into(),
    })
}

/// Seeded `10⁶`-sample moments and Gumbel-root means, in standard errors.
fn monte_carlo() -> Result<Outcome> {
    const N: usize = 1_000_000;
    const Z: f64 = 4.0;
    let mut worst: f64 = 0.0;
    for (i, (a, b)) in [(1.0, 1.0), (0.5, 2.0)].into_iter().enumerate() {
        let sigma = cumulants(a, b, 1)?.sigma;
        for c in 1..=3u32 {
            let seed = MC_SEED + 10 * i as u64 + c as u64;
            let prm = p(a, b, c as f64);
            let tau = sample_tau_integer_c(a, b, c, N, seed)?;
            for k in 1..=3u32 {
                let mean = SampleMean::of(&tau.values, |v| v.powi(k as i32)).mean;
                let se = moment_std_err(&prm, k, N)?;
                worst = worst.max((mean - moment(&prm, k as u64)?).abs() / se);
            }
            let roots = sample_gumbel_root(a, b, c, N, seed)?;
            let mean = SampleMean::of(&roots.values, |x| x).mean;
            let se = (c as f64 * sigma[1] / N as f64).sqrt();
            worst = worst.max((mean - c as f64 * sigma[0]).abs() / se);
        }
    }
    Ok(Outcome {
        passed: worst <= Z,
        metric: worst,
        tolerance: Z,
        detail: format!("max |sample - exact| / SE over (a,b) in {{(1,1),(0.5,2)}}, c = 1..3, moments 1..3 and the root mean; seed {MC_SEED}"),
    })
}
