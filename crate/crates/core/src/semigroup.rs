//! Numerical checks of the product-convolution law `τ_c ⋄ τ_d = τ_{c+d}`
//! and exact samplers for integer `c`.
//!
//! # Sampling scheme
//!
//! `τ_1(a,b)` is the law of `S^a` with `S ~ Gamma(b, 1)`; integer `c` is a
//! product of `c` independent such draws. Draws are produced in chunks of
//! [`CHUNK`] samples. Factor `j` of chunk `k` reads ChaCha20 stream
//! `(j << 40) | k` seeded from the 64-bit seed, so a batch is identical for
//! any number of worker threads, and the first factor of a `c`-fold batch is
//! the `c = 1` batch of the same seed.
//!
//! Everything is accumulated as `ln T = a Σ_j ln S_j`. For `b < 1` the
//! boost `S = G(1 + b) U^{1/b}` is applied in the log domain, so tiny shape
//! parameters do not underflow before the Gumbel-root transform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{density_ln, DensityOptions, Method, SemigroupParams};
use crate::error::{domain, Error, Result};
use crate::moments::log_range;
use crate::quad::{try_integrate_adaptive, QuadOptions};

/// Samples per RNG stream.
pub const CHUNK: usize = 1 << 16;

/// Identifies the generator and stream layout in output metadata.
pub const GENERATOR_ID: &str =
    "ChaCha20Rng(rand_chacha 0.3) seed_from_u64, stream (factor << 40) | chunk, 65536 samples per chunk";

/// One point of [`convolution_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionPoint {
    pub t: f64,
    /// `∫ e_c(t/x) e_d(x) dx/x`.
    pub convolution: f64,
    pub quad_err: f64,
    /// `e_{c+d}(t)` from the density dispatcher.
    pub direct: f64,
    pub direct_method: Method,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionCheck {
    pub c: f64,
    pub d: f64,
    pub points: Vec<ConvolutionPoint>,
    pub max_residual: f64,
}

/// Evaluate `∫ e_c(t e^{-u}) e_d(e^u) du` by adaptive quadrature and compare
/// with `e_{c+d}(t)` on every `t` of the grid.
pub fn convolution_check(
    params_c: &SemigroupParams,
    params_d: &SemigroupParams,
    t_grid: &[f64],
) -> Result<ConvolutionCheck> {
    if params_c.a() != params_d.a() || params_c.b() != params_d.b() {
        return Err(domain("convolution needs the same (a, b) on both factors"));
    }
    if t_grid.is_empty() {
        return Err(domain("empty t grid"));
    }
    let sum = params_c.with_c(params_c.c() + params_d.c())?;
    let opts = DensityOptions::default();
    let floor = -40.0;
    let (lo_c, hi_c) = log_range(params_c, 0.0, 0, floor)?;
    let (lo_d, hi_d) = log_range(params_d, 0.0, 0, floor)?;
    let points = t_grid
        .par_iter()
        .map(|&t| {
            if !(t > 0.0) || !t.is_finite() {
                return Err(domain(format!("t = {t} must be positive and finite")));
            }
            let v = t.ln();
            let lo = lo_d.max(v - hi_c);
            let hi = hi_d.min(v - lo_c);
            let r = if lo < hi {
                try_integrate_adaptive(
                    |u| {
                        let x = density_ln(params_c, v - u, &opts)?.ln_value;
                        let y = density_ln(params_d, u, &opts)?.ln_value;
                        Ok((x + y).exp())
                    },
                    lo,
                    hi,
                    &QuadOptions::new(1e-13, 1e-11).max_intervals(4000),
                )?
            } else {
                Default::default()
            };
            let direct = density_ln(&sum, v, &opts)?;
            Ok(ConvolutionPoint {
                t,
                convolution: r.value,
                quad_err: r.abs_err,
                direct: direct.value,
                direct_method: direct.method,
                residual: (r.value - direct.value).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_residual = points.iter().map(|p| p.residual).fold(0.0, f64::max);
    Ok(ConvolutionCheck {
        c: params_c.c(),
        d: params_d.c(),
        points,
        max_residual,
    })
}

/// A seeded batch of draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub params: SemigroupParams,
    pub seed: u64,
    pub generator: String,
    /// `τ_c(a,b)` draws (positive) or, for [`sample_gumbel_root`], draws of
    /// `g_c(a,b)` on ℝ.
    pub values: Vec<f64>,
}

/// Draws of `ln T`, `T ~ τ_c(a,b)`, for integer `c ≥ 1`.
fn ln_tau_draws(a: f64, b: f64, c: u32, n: usize, seed: u64) -> Result<Vec<f64>> {
    if c == 0 {
        return Err(domain("c must be a positive integer"));
    }
    if n == 0 {
        return Err(domain("sample size must be at least 1"));
    }
    // Gamma(1 + b) for b < 1, boosted below.
    let boost = b < 1.0;
    let gamma = Gamma::new(if boost { 1.0 + b } else { b }, 1.0).map_err(|e| domain(e.to_string()))?;
    let mut out = vec![0.0; n];
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(k, chunk)| {
        for j in 0..c as u64 {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream((j << 40) | k as u64);
            for slot in chunk.iter_mut() {
                let g: f64 = gamma.sample(&mut rng);
                let mut ln_s = g.ln();
                if boost {
                    // U in (0, 1]
                    let u: f64 = 1.0 - rng.gen::<f64>();
                    ln_s += u.ln() / b;
                }
                *slot += a * ln_s;
            }
        }
    });
    Ok(out)
}

fn check_ab(a: f64, b: f64) -> Result<()> {
    SemigroupParams::new(a, b, 1.0).map(|_| ())
}

/// Exact sampler for `τ_1(a,b)`: `T = S^a`, `S ~ Gamma(b, 1)`.
pub fn sample_tau_c1(a: f64, b: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    sample_tau_integer_c(a, b, 1, n, seed)
}

/// Exact sampler for `τ_c(a,b)`, `c ∈ ℕ`: product of `c` independent
/// `τ_1(a,b)` draws.
///
/// Fails if a draw leaves the f64 range, which can only happen for extreme
/// parameters; [`sample_gumbel_root`] has no such limitation.
pub fn sample_tau_integer_c(a: f64, b: f64, c: u32, n: usize, seed: u64) -> Result<SampleBatch> {
    check_ab(a, b)?;
    let ln_t = ln_tau_draws(a, b, c, n, seed)?;
    let values: Vec<f64> = ln_t.iter().map(|l| l.exp()).collect();
    if let Some(i) = values.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::Overflow(format!(
            "draw {i} has ln T = {} outside the f64 range",
            ln_t[i]
        )));
    }
    Ok(SampleBatch {
        params: SemigroupParams::new(a, b, c as f64)?,
        seed,
        generator: GENERATOR_ID.to_string(),
        values,
    })
}

/// Draws `x = -ln T` of `g_c(a,b)`, from the same streams as
/// [`sample_tau_integer_c`].
pub fn sample_gumbel_root(a: f64, b: f64, c: u32, n: usize, seed: u64) -> Result<SampleBatch> {
    check_ab(a, b)?;
    let values = ln_tau_draws(a, b, c, n, seed)?.into_iter().map(|l| -l).collect();
    Ok(SampleBatch {
        params: SemigroupParams::new(a, b, c as f64)?,
        seed,
        generator: GENERATOR_ID.to_string(),
        values,
    })
}

/// Sample mean of `f(value)` with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleMean {
    pub mean: f64,
    pub std_err: f64,
}

impl SampleMean {
    pub fn of(values: &[f64], f: impl Fn(f64) -> f64 + Sync) -> Self {
        let n = values.len() as f64;
        let mean = values.par_iter().map(|&v| f(v)).sum::<f64>() / n;
        let ss = values.par_iter().map(|&v| (f(v) - mean).powi(2)).sum::<f64>();
        Self {
            mean,
            std_err: (ss / (n - 1.0).max(1.0) / n).sqrt(),
        }
    }

    /// `|mean - exact|` in units of `std_err`.
    pub fn z_score(&self, exact: f64) -> f64 {
        (self.mean - exact).abs() / self.std_err
    }
}

/// Standard error of the sample mean of `T^k` from the exact moments:
/// `√((s_{2k} - s_k²)/n)`.
pub fn moment_std_err(params: &SemigroupParams, k: u32, n: usize) -> Result<f64> {
    let sk = crate::moments::moment(params, k as u64)?;
    let s2k = crate::moments::moment(params, 2 * k as u64)?;
    Ok(((s2k - sk * sk) / n as f64).sqrt())
}
