//! `gammasg`: tables, diagnostics and the acceptance suite from the command
//! line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 numerical failure. `GAMMASG_THREADS` caps the worker threads.

// `!(x > 0.0)` is how NaN is rejected alongside out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gammasg::asympt::{ln_origin_leading, ln_tail_leading, TailExponent};
use gammasg::density::{density_ln, DensityOptions, SemigroupParams};
use gammasg::gumbel::{cumulants, ln_gumbel_density, moment_polynomials, DEFAULT_POLY_ORDER};
use gammasg::moments::{carleman_diagnostic, classify, krein_diagnostic, ln_moment, moment};
use gammasg::semigroup::{sample_gumbel_root, sample_tau_integer_c, GENERATOR_ID};
use gammasg::verify::{run_check, CheckReport, CHECKS};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use output::{write_json, write_table, Cell, Format, Table};

#[derive(Parser)]
#[command(
    name = "gammasg",
    version,
    about = "Gamma-power moment sequences, their convolution semigroup densities and Gumbel roots"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Table of e_c(a,b)(t): t, value, ln_value, est_abs_err, method.
    Density {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Relative accuracy demanded from the density routes.
        #[arg(long, default_value_t = 1e-10)]
        rel_tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Moments n, s_n^c, ln s_n^c for n = 0..=n-max.
    Moments {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 10)]
        n_max: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Determinacy verdict with Carleman and Krein diagnostics (always JSON).
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        /// Carleman series length.
        #[arg(long, default_value_t = 10_000)]
        carleman_n: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Density against its leading asymptotic term: t, regime, density,
    /// leading_term, ratio. Tail formula for t > 1, origin formula below.
    Asympt {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Gumbel-root densities g_c(a,b)(x), cumulants or moment-polynomial
    /// coefficients. The grid flags give the x range for the density table.
    Gumbel {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = GumbelTable::Density)]
        table: GumbelTable,
        #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
        x_min: f64,
        #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
        x_max: f64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Highest cumulant index or polynomial order.
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run the acceptance suite; exits 1 if any check fails.
    Verify {
        /// Run a single check (1 to 9).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=9))]
        check: Option<u8>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Seeded draws of τ_c(a,b) (or of g_c(a,b) with --gumbel) for integer c.
    Sample {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, default_value_t = 1)]
        c: u32,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit x = -ln T instead of T.
        #[arg(long)]
        gumbel: bool,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, allow_hyphen_values = true)]
    c: f64,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 0.1)]
    t_min: f64,
    #[arg(long, default_value_t = 10.0)]
    t_max: f64,
    /// Number of grid points, 1 to 10^7.
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(long, value_enum, default_value_t = Spacing::Log)]
    spacing: Spacing,
}

#[derive(Args)]
struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; stdout if absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Spacing {
    Linear,
    Log,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GumbelTable {
    Density,
    Cumulants,
    Coefficients,
}

/// Failures mapped to exit codes.
enum Failure {
    Usage(String),
    Numerical(String),
    Verification,
}

impl From<gammasg::Error> for Failure {
    fn from(e: gammasg::Error) -> Self {
        match e {
            gammasg::Error::Domain(_) | gammasg::Error::InsufficientGrid(_) | gammasg::Error::PlanInvalid(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Numerical(format!("{e:#}"))
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Numerical(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("GAMMASG_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("GAMMASG_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn sink(out: &OutArgs) -> Result<Box<dyn Write>, Failure> {
    Ok(match &out.output {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn meta(command: &str, params: Option<&SemigroupParams>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    if let Some(p) = params {
        m.insert("a".into(), json!(p.a()));
        m.insert("b".into(), json!(p.b()));
        m.insert("c".into(), json!(p.c()));
    }
    m
}

fn grid(g: &GridArgs) -> Result<Vec<f64>, Failure> {
    if !(1..=10_000_000).contains(&g.count) {
        return Err(Failure::Usage(format!("--count must be in [1, 10^7], got {}", g.count)));
    }
    if !(g.t_min > 0.0) || !(g.t_max >= g.t_min) || !g.t_max.is_finite() {
        return Err(Failure::Usage(format!(
            "need 0 < t-min <= t-max < inf, got [{}, {}]",
            g.t_min, g.t_max
        )));
    }
    Ok(spaced(g.t_min, g.t_max, g.count, g.spacing))
}

fn spaced(lo: f64, hi: f64, n: usize, spacing: Spacing) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|k| {
            let f = k as f64 / (n - 1) as f64;
            match spacing {
                Spacing::Linear => lo + (hi - lo) * f,
                Spacing::Log => lo * (hi / lo).powf(f),
            }
        })
        .collect()
}

fn params(p: &ParamArgs) -> Result<SemigroupParams, Failure> {
    Ok(SemigroupParams::new(p.a, p.b, p.c)?)
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Density {
            params: pa,
            grid: g,
            rel_tol,
            out,
        } => {
            let prm = params(&pa)?;
            if !(rel_tol > 0.0 && rel_tol < 1.0) {
                return Err(Failure::Usage(format!("--rel-tol must be in (0, 1), got {rel_tol}")));
            }
            let opts = DensityOptions {
                rel_tol,
                ..DensityOptions::default()
            };
            let ts = grid(&g)?;
            let vals = ts
                .par_iter()
                .map(|&t| density_ln(&prm, t.ln(), &opts).map(|d| (t, d)))
                .collect::<Result<Vec<_>, _>>()?;
            let mut table = Table::new(vec!["t", "value", "ln_value", "est_abs_err", "method"]);
            for (t, d) in vals {
                table.rows.push(vec![
                    t.into(),
                    d.value.into(),
                    d.ln_value.into(),
                    d.est_abs_err.into(),
                    d.method.as_str().into(),
                ]);
            }
            let mut m = meta("density", Some(&prm));
            m.insert("rel_tol".into(), json!(rel_tol));
            write_table(&mut *sink(&out)?, out.format, &m, &table)?;
        }
        Command::Moments { params: pa, n_max, out } => {
            let prm = params(&pa)?;
            let mut table = Table::new(vec!["n", "value", "ln_value"]);
            for n in 0..=n_max {
                let v = moment(&prm, n).unwrap_or(f64::INFINITY);
                table
                    .rows
                    .push(vec![(n as usize).into(), v.into(), ln_moment(&prm, n).into()]);
            }
            write_table(&mut *sink(&out)?, out.format, &meta("moments", Some(&prm)), &table)?;
        }
        Command::Classify {
            params: pa,
            carleman_n,
            out,
        } => {
            let prm = params(&pa)?;
            let verdict = classify(&prm);
            let carleman = carleman_diagnostic(&prm, carleman_n)?;
            let krein = krein_diagnostic(&prm, 1.0, 1e4).ok();
            let body = json!({
                "determinate": verdict.determinate,
                "boundary": verdict.boundary,
                "ac": prm.a() * prm.c(),
                "carleman": {
                    "n": carleman_n,
                    "partial_sum": carleman.partial_sums.last(),
                    "partial_sums_at_powers_of_ten": verdict.carleman_partial_sums,
                    "fitted_exponent": carleman.fitted_exponent,
                },
                "krein": krein,
            });
            let mut w = sink(&out)?;
            let mut m = meta("classify", Some(&prm));
            m.insert("carleman_n".into(), json!(carleman_n));
            write_json(&mut *w, &m, body)?;
        }
        Command::Asympt {
            params: pa,
            grid: g,
            out,
        } => {
            let prm = params(&pa)?;
            let ts = grid(&g)?;
            let opts = DensityOptions::default();
            let rows = ts
                .par_iter()
                .map(|&t| {
                    let u = t.ln();
                    let (regime, lead) = if t > 1.0 {
                        ("tail", ln_tail_leading(&prm, u, TailExponent::Stated))
                    } else {
                        ("origin", ln_origin_leading(&prm, u))
                    };
                    let d = density_ln(&prm, u, &opts)?;
                    Ok(vec![
                        t.into(),
                        regime.into(),
                        d.value.into(),
                        lead.exp().into(),
                        (d.ln_value - lead).exp().into(),
                    ])
                })
                .collect::<Result<Vec<Vec<Cell>>, gammasg::Error>>()?;
            let mut table = Table::new(vec!["t", "regime", "density", "leading_term", "ratio"]);
            table.rows = rows;
            write_table(&mut *sink(&out)?, out.format, &meta("asympt", Some(&prm)), &table)?;
        }
        Command::Gumbel {
            params: pa,
            table: which,
            x_min,
            x_max,
            count,
            n_max,
            out,
        } => {
            let prm = params(&pa)?;
            let mut m = meta("gumbel", Some(&prm));
            let table = match which {
                GumbelTable::Density => {
                    if !(1..=10_000_000).contains(&count)
                        || !(x_max >= x_min)
                        || !x_min.is_finite()
                        || !x_max.is_finite()
                    {
                        return Err(Failure::Usage(
                            "need finite x-min <= x-max and count in [1, 10^7]".into(),
                        ));
                    }
                    let xs = spaced(x_min, x_max, count, Spacing::Linear);
                    let rows = xs
                        .par_iter()
                        .map(|&x| {
                            let l = ln_gumbel_density(&prm, x)?;
                            Ok(vec![x.into(), l.exp().into(), l.into()])
                        })
                        .collect::<Result<Vec<Vec<Cell>>, gammasg::Error>>()?;
                    let mut t = Table::new(vec!["x", "value", "ln_value"]);
                    t.rows = rows;
                    t
                }
                GumbelTable::Cumulants => {
                    let s = cumulants(prm.a(), prm.b(), n_max)?;
                    let mut t = Table::new(vec!["n", "sigma"]);
                    for (n, v) in s.sigma.iter().enumerate() {
                        t.rows.push(vec![n.into(), (*v).into()]);
                    }
                    t
                }
                GumbelTable::Coefficients => {
                    if n_max > DEFAULT_POLY_ORDER {
                        return Err(Failure::Usage(format!(
                            "--n-max is capped at {DEFAULT_POLY_ORDER} for coefficient tables"
                        )));
                    }
                    let poly = moment_polynomials(&cumulants(prm.a(), prm.b(), n_max)?, n_max)?;
                    let mut t = Table::new(vec!["n", "k", "coefficient"]);
                    for n in 1..=n_max {
                        for k in 1..=n {
                            t.rows.push(vec![n.into(), k.into(), poly.coefficient(n, k).into()]);
                        }
                    }
                    m.insert(
                        "s_n_at_c".into(),
                        json!((0..=n_max).map(|n| poly.evaluate(n, prm.c())).collect::<Vec<_>>()),
                    );
                    t
                }
            };
            write_table(&mut *sink(&out)?, out.format, &m, &table)?;
        }
        Command::Verify { check, out } => {
            let ids: Vec<u8> = match check {
                Some(id) => vec![id],
                None => CHECKS.iter().map(|&(id, _)| id).collect(),
            };
            let mut w = sink(&out)?;
            let mut reports: Vec<CheckReport> = Vec::new();
            for id in ids {
                let r = run_check(id);
                if out.format == Format::Csv {
                    writeln!(w, "{}", r.line())?;
                    w.flush()?;
                }
                reports.push(r);
            }
            let all = reports.iter().all(|r| r.passed);
            match out.format {
                Format::Csv => writeln!(
                    w,
                    "{}",
                    if all {
                        "all checks passed"
                    } else {
                        "verification FAILED"
                    }
                )?,
                Format::Json => {
                    let mut m = meta("verify", None);
                    m.insert("passed".into(), json!(all));
                    write_json(&mut *w, &m, output::to_value(&reports)?)?;
                }
            }
            w.flush()?;
            if !all {
                return Err(Failure::Verification);
            }
        }
        Command::Sample {
            a,
            b,
            c,
            n,
            seed,
            gumbel,
            out,
        } => {
            if c == 0 || n == 0 || n > 10_000_000 {
                return Err(Failure::Usage("need integer c >= 1 and 1 <= n <= 10^7".into()));
            }
            let batch = if gumbel {
                sample_gumbel_root(a, b, c, n, seed)?
            } else {
                sample_tau_integer_c(a, b, c, n, seed)?
            };
            let mut m = meta("sample", Some(&batch.params));
            m.insert("seed".into(), json!(seed));
            m.insert("generator".into(), json!(GENERATOR_ID));
            m.insert("variable".into(), json!(if gumbel { "x = -ln T" } else { "T" }));
            let mut table = Table::new(vec!["i", "value"]);
            table.rows = batch
                .values
                .iter()
                .enumerate()
                .map(|(i, &v)| vec![i.into(), v.into()])
                .collect();
            write_table(&mut *sink(&out)?, out.format, &m, &table)?;
        }
    }
    Ok(())
}
