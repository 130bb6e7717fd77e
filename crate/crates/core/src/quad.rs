//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals, for scalar
//! and vector-valued integrands.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances for [`integrate_adaptive`]. A component converges once its
/// error estimate is below `max(abs_tol, rel_tol · |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl QuadOptions {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            max_intervals: 2000,
        }
    }

    pub fn max_intervals(mut self, n: usize) -> Self {
        self.max_intervals = n;
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err: f64,
}

struct Segment {
    lo: f64,
    hi: f64,
    value: Vec<f64>,
    err: Vec<f64>,
}

fn rescale(diff: f64, resasc: f64, resabs: f64) -> f64 {
    let mut err = diff.abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && floor > err {
        err = floor;
    }
    err
}

fn kronrod<F>(f: &mut F, dim: usize, lo: f64, hi: f64, buf: &mut [Vec<f64>; 15]) -> Result<Segment>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    for (j, &x) in XGK.iter().enumerate() {
        f(centre - half * x, &mut buf[j])?;
        if j < 7 {
            f(centre + half * x, &mut buf[14 - j])?;
        }
    }
    let mut value = vec![0.0; dim];
    let mut err = vec![0.0; dim];
    for d in 0..dim {
        let fc = buf[7][d];
        let mut k = WGK[7] * fc;
        let mut g = WG[3] * fc;
        let mut abs = (WGK[7] * fc).abs();
        for j in 0..7 {
            let (a, b) = (buf[j][d], buf[14 - j][d]);
            k += WGK[j] * (a + b);
            abs += WGK[j] * (a.abs() + b.abs());
            if j % 2 == 1 {
                g += WG[j / 2] * (a + b);
            }
        }
        let mean = 0.5 * k;
        let mut asc = WGK[7] * (fc - mean).abs();
        for j in 0..7 {
            asc += WGK[j] * ((buf[j][d] - mean).abs() + (buf[14 - j][d] - mean).abs());
        }
        for v in [k, g, abs, asc] {
            if !v.is_finite() {
                return Err(Error::Accuracy {
                    estimate: f64::INFINITY,
                    tolerance: 0.0,
                    context: format!("non-finite integrand on [{lo}, {hi}]"),
                });
            }
        }
        value[d] = k * half;
        err[d] = rescale((k - g) * half, asc * half.abs(), abs * half.abs());
    }
    Ok(Segment { lo, hi, value, err })
}

/// Integrate a vector-valued integrand over `[lo, hi]`. The integrand writes
/// `dim` components into the provided slice and may fail.
pub fn integrate_adaptive_vec<F>(mut f: F, dim: usize, lo: f64, hi: f64, opts: &QuadOptions) -> Result<Vec<QuadResult>>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    let mut buf: [Vec<f64>; 15] = std::array::from_fn(|_| vec![0.0; dim]);
    let mut segments = vec![kronrod(&mut f, dim, lo, hi, &mut buf)?];
    loop {
        let mut total = vec![0.0; dim];
        let mut total_err = vec![0.0; dim];
        for s in &segments {
            for d in 0..dim {
                total[d] += s.value[d];
                total_err[d] += s.err[d];
            }
        }
        let tol: Vec<f64> = total.iter().map(|v| opts.abs_tol.max(opts.rel_tol * v.abs())).collect();
        let done = (0..dim).all(|d| total_err[d] <= tol[d]);
        if done || segments.len() >= opts.max_intervals {
            if !done {
                let (d, ratio) =
                    (0..dim)
                        .map(|d| (d, total_err[d] / tol[d]))
                        .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
                return Err(Error::Accuracy {
                    estimate: total_err[d],
                    tolerance: tol[d],
                    context: format!("adaptive quadrature on [{lo}, {hi}] stalled (component {d}, ratio {ratio:.2e})"),
                });
            }
            return Ok((0..dim)
                .map(|d| QuadResult {
                    value: total[d],
                    abs_err: total_err[d],
                })
                .collect());
        }
        // bisect the segment contributing most to the normalised error
        let worst = segments
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let score: f64 = (0..dim).map(|d| s.err[d] / tol[d]).sum();
                (i, score)
            })
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc })
            .0;
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.lo + s.hi);
        segments.push(kronrod(&mut f, dim, s.lo, mid, &mut buf)?);
        segments.push(kronrod(&mut f, dim, mid, s.hi, &mut buf)?);
    }
}

/// Scalar convenience wrapper around [`integrate_adaptive_vec`].
pub fn integrate_adaptive<F>(mut f: F, lo: f64, hi: f64, opts: &QuadOptions) -> Result<QuadResult>
where
    F: FnMut(f64) -> f64,
{
    let r = integrate_adaptive_vec(
        |x, out: &mut [f64]| {
            out[0] = f(x);
            Ok(())
        },
        1,
        lo,
        hi,
        opts,
    )?;
    Ok(r[0])
}

/// Fallible scalar variant.
pub fn try_integrate_adaptive<F>(mut f: F, lo: f64, hi: f64, opts: &QuadOptions) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let r = integrate_adaptive_vec(
        |x, out: &mut [f64]| {
            out[0] = f(x)?;
            Ok(())
        },
        1,
        lo,
        hi,
        opts,
    )?;
    Ok(r[0])
}
