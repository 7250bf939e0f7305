//! Command-line front end: quantization and covering-radius tables,
//! coverage curves, distance CDFs, and a self-validation suite.
//!
//! Every command is deterministic given its flags and seed; reruns produce
//! byte-identical output regardless of worker count.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::coverage::{
    self, coverage_bounds, coverage_dn_delta, full_cover_radius, radius_for_coverage,
    FullCoverKind, RadiusMethod,
};
use crate::designs::{self, dn0_nearest_sq, dn_delta_nearest_sq, Design};
use crate::error::{Error, Result};
use crate::quantization::{self, mc_quantization, qd_normalize};
use crate::sobol::{self, DirectionTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Size of the Sobol comparison design in tables, independent of `d`.
pub const SOBOL_N: usize = 1024;

#[derive(Parser)]
#[command(
    name = "cubecover",
    version,
    about = "Quantization and weak-covering statistics of vertex designs in [-1,1]^d"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalized quantization error Q_d per design, as CSV
    QuantTable(QuantTableArgs),
    /// Normalized covering radii R_{1-gamma} and R_1 per design, as CSV
    CoverTable(CoverTableArgs),
    /// Coverage curve: approximation, Monte Carlo and bounds over (delta, r)
    Curve(CurveArgs),
    /// Empirical CDF of the normalized nearest distance per design
    Cdf(CdfArgs),
    /// Run the invariant suite; exits 2 if any check fails
    Validate(ValidateArgs),
    /// One-off evaluation of quantization, coverage and radius statistics
    Eval(EvalArgs),
}

#[derive(Args)]
struct McArgs {
    /// Monte Carlo sample count
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Base seed for all Monte Carlo streams
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct OutArg {
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DirectionArg {
    /// Joe-Kuo style direction-number file; bundled table when omitted
    #[arg(long)]
    direction_numbers: Option<PathBuf>,
}

#[derive(Args)]
struct QuantTableArgs {
    /// Dimensions, e.g. --d 5 7 10
    #[arg(long, required = true, num_args = 1..)]
    d: Vec<usize>,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    dirs: DirectionArg,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct CoverTableArgs {
    #[arg(long, required = true, num_args = 1..)]
    d: Vec<usize>,
    /// Uncovered volume fraction defining the radius statistic
    #[arg(long, default_value_t = 0.01)]
    gamma: f64,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    dirs: DirectionArg,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    d: usize,
    /// Ball radii, e.g. --r 0.7 0.8 0.9
    #[arg(long, required = true, num_args = 1..)]
    r: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    delta_start: f64,
    #[arg(long, default_value_t = 1.0)]
    delta_stop: f64,
    #[arg(long, default_value_t = 0.05)]
    delta_step: f64,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct CdfArgs {
    #[arg(long)]
    d: usize,
    /// Design selectors: dn-delta, dn0, sobol, custom:<csv path>
    #[arg(long, required = true, num_args = 1..)]
    design: Vec<String>,
    /// delta for the dn-delta selector; optimal delta when omitted
    #[arg(long)]
    delta: Option<f64>,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    dirs: DirectionArg,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 200_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    d: usize,
    /// delta of the design; optimal delta when omitted
    #[arg(long)]
    delta: Option<f64>,
    /// Radii at which to evaluate coverage
    #[arg(long, num_args = 0..)]
    r: Vec<f64>,
    /// Solve for the radius achieving coverage 1-gamma
    #[arg(long)]
    gamma: Option<f64>,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    out: OutArg,
}

/// Parses `std::env::args` and executes; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::DesignCsv(_) | Error::DirectionTable { .. } => EXIT_IO,
        Error::BracketInvalid { .. } => EXIT_VALIDATION,
        _ => EXIT_USAGE,
    }
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::QuantTable(args) => cmd_quant_table(args),
        Command::CoverTable(args) => cmd_cover_table(args),
        Command::Curve(args) => cmd_curve(args),
        Command::Cdf(args) => cmd_cdf(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Eval(args) => cmd_eval(args),
    }
}

fn load_table(path: Option<&Path>) -> Result<DirectionTable> {
    match path {
        Some(p) => sobol::load_direction_numbers(&fs::read_to_string(p)?),
        None => Ok(sobol::bundled_direction_table().clone()),
    }
}

fn write_out(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn check_dims(ds: &[usize]) -> Result<()> {
    for &d in ds {
        if d < 2 {
            return Err(Error::DimensionTooSmall { got: d, min: 2 });
        }
    }
    Ok(())
}

/// Ascending grid `start, start+step, ...` up to `stop` inclusive (with a
/// small tolerance so binary fractions land on the endpoint).
fn f64_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || stop < start {
        return Err(Error::Usage(format!(
            "invalid grid: start {start}, stop {stop}, step {step}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

fn cmd_quant_table(args: QuantTableArgs) -> Result<i32> {
    check_dims(&args.d)?;
    let table = load_table(args.dirs.direction_numbers.as_deref())?;
    let mut csv = String::from("d,design,qd,stderr,method\n");
    for &d in &args.d {
        let qd_star = quantization::qd_optimal(d);
        let _ = writeln!(csv, "{d},dn-delta,{qd_star:.6},{:.6},closed-form", 0.0);
        let _ = writeln!(csv, "{d},dn0,{:.6},{:.6},closed-form", 1.0 / 12.0, 0.0);
        let des = sobol::sobol_design(d, SOBOL_N, &table)?;
        let rep = mc_quantization(&des, args.mc.samples, args.mc.seed)?;
        let qd_stderr = qd_normalize(d, SOBOL_N as u64, rep.stderr);
        let _ = writeln!(csv, "{d},sobol,{:.6},{qd_stderr:.6},monte-carlo", rep.qd);
    }
    write_out(&args.out.out, &csv)?;
    Ok(EXIT_OK)
}

/// delta grid scanned for the per-dimension optimal covering radius.
fn table_delta_grid() -> Vec<f64> {
    f64_grid(0.40, 0.60, 0.005).expect("static grid")
}

fn cmd_cover_table(args: CoverTableArgs) -> Result<i32> {
    check_dims(&args.d)?;
    if !(0.0 < args.gamma && args.gamma < 1.0) {
        return Err(Error::GammaOutOfRange(args.gamma));
    }
    let table = load_table(args.dirs.direction_numbers.as_deref())?;
    let gamma = args.gamma;
    let mut csv = String::from("d,design,delta,gamma,r,R,method\n");
    for &d in &args.d {
        // grid-optimal delta for the even-parity design
        let mut best: Option<(f64, coverage::RadiusSolution)> = None;
        for delta in table_delta_grid() {
            let sol = radius_for_coverage(d, delta, gamma, RadiusMethod::AnalyticApprox)?;
            if best.as_ref().is_none_or(|(_, b)| sol.big_r < b.big_r) {
                best = Some((delta, sol));
            }
        }
        let (delta_opt, sol_opt) = best.expect("nonempty grid");
        let mut row = |design: &str, delta: &str, gamma: f64, sol: &coverage::RadiusSolution, method: &str| {
            let _ = writeln!(
                csv,
                "{d},{design},{delta},{gamma:.6},{:.6},{:.6},{method}",
                sol.r, sol.big_r
            );
        };
        row("dn-delta", &format!("{delta_opt:.3}"), gamma, &sol_opt, "approx");
        let sol_half = radius_for_coverage(d, 0.5, gamma, RadiusMethod::AnalyticApprox)?;
        row("dn-delta", "0.500", gamma, &sol_half, "approx");
        let dn0 = designs::build_dn0(d)?;
        let sol_dn0 = coverage::mc_radius_for_coverage(&dn0, gamma, args.mc.samples, args.mc.seed)?;
        row("dn0", "", gamma, &sol_dn0, "monte-carlo");
        let sob = sobol::sobol_design(d, SOBOL_N, &table)?;
        let sol_sob = coverage::mc_radius_for_coverage(&sob, gamma, args.mc.samples, args.mc.seed)?;
        row("sobol", "", gamma, &sol_sob, "monte-carlo");
        let r1_half = full_cover_radius(FullCoverKind::DnDelta, d, 0.5);
        row("dn-delta", "0.500", 0.0, &r1_half, "closed-form");
        let r1_dn0 = full_cover_radius(FullCoverKind::Dn0, d, 0.0);
        row("dn0", "", 0.0, &r1_dn0, "closed-form");
    }
    write_out(&args.out.out, &csv)?;
    Ok(EXIT_OK)
}

fn cmd_curve(args: CurveArgs) -> Result<i32> {
    check_dims(&[args.d])?;
    let d = args.d;
    let deltas = f64_grid(args.delta_start, args.delta_stop, args.delta_step)?;
    if args.r.is_empty() {
        return Err(Error::Usage("at least one --r is required".into()));
    }
    let mut csv = String::from("d,delta,r,approx,mc,mc_stderr,lower,upper\n");
    for (i, &delta) in deltas.iter().enumerate() {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::DeltaOutOfRange(delta));
        }
        // one distance pass per delta serves every r
        let dists =
            coverage::mc_nearest_distances(d, args.mc.samples, args.mc.seed.wrapping_add(i as u64), |x| {
                dn_delta_nearest_sq(x, delta)
            });
        for &r in &args.r {
            let approx = coverage_dn_delta(d, delta, r)?.value;
            let p = coverage::empirical_cdf(&dists, r);
            let stderr = (p * (1.0 - p) / args.mc.samples as f64).sqrt();
            let (lower, upper) = coverage_bounds(d, delta, r);
            let _ = writeln!(
                csv,
                "{d},{delta:.6},{r:.6},{approx:.17e},{p:.17e},{stderr:.17e},{lower:.17e},{upper:.17e}"
            );
        }
    }
    write_out(&args.out.out, &csv)?;
    Ok(EXIT_OK)
}

/// Shared normalized-radius grid used by the CDF command.
pub fn cdf_r_grid() -> Vec<f64> {
    f64_grid(0.0, 1.25, 0.0125).expect("static grid")
}

fn cmd_cdf(args: CdfArgs) -> Result<i32> {
    check_dims(&[args.d])?;
    let d = args.d;
    let delta = args.delta.unwrap_or_else(|| quantization::optimal_delta(d));
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    let table = load_table(args.dirs.direction_numbers.as_deref())?;
    let big_r_grid = cdf_r_grid();
    let mut csv = String::from("design,R,cdf\n");
    for selector in &args.design {
        let (label, log2_n, curve): (&str, f64, Vec<(f64, f64)>) = match selector.as_str() {
            "dn-delta" => {
                let log2_n = d as f64 - 1.0;
                let grid = raw_grid(&big_r_grid, d, log2_n);
                let c = coverage::distance_cdf_fn(d, log2_n, &grid, args.mc.samples, args.mc.seed, |x| {
                    dn_delta_nearest_sq(x, delta)
                })?;
                ("dn-delta", log2_n, c)
            }
            "dn0" => {
                let log2_n = d as f64;
                let grid = raw_grid(&big_r_grid, d, log2_n);
                let c = coverage::distance_cdf_fn(d, log2_n, &grid, args.mc.samples, args.mc.seed, |x| {
                    dn0_nearest_sq(x)
                })?;
                ("dn0", log2_n, c)
            }
            "sobol" => {
                let des = sobol::sobol_design(d, SOBOL_N, &table)?;
                let log2_n = (SOBOL_N as f64).log2();
                let grid = raw_grid(&big_r_grid, d, log2_n);
                let c = coverage::distance_cdf_curve(&des, &grid, args.mc.samples, args.mc.seed)?;
                ("sobol", log2_n, c)
            }
            other => match other.strip_prefix("custom:") {
                Some(path) => {
                    let des = Design::from_csv(&fs::read_to_string(path)?)?;
                    if des.d != d {
                        return Err(Error::DimensionMismatch {
                            got: des.d,
                            expected: d,
                        });
                    }
                    let log2_n = (des.n as f64).log2();
                    let grid = raw_grid(&big_r_grid, d, log2_n);
                    let c = coverage::distance_cdf_curve(&des, &grid, args.mc.samples, args.mc.seed)?;
                    ("custom", log2_n, c)
                }
                None => {
                    return Err(Error::Usage(format!(
                        "unknown design selector `{other}`; expected dn-delta, dn0, sobol or custom:<csv>"
                    )))
                }
            },
        };
        let _ = log2_n;
        for (&big_r, (_, cdf)) in big_r_grid.iter().zip(curve) {
            let _ = writeln!(csv, "{label},{big_r:.6},{cdf:.17e}");
        }
    }
    write_out(&args.out.out, &csv)?;
    Ok(EXIT_OK)
}

/// Maps the shared normalized grid back to raw radii for one design size.
fn raw_grid(big_r_grid: &[f64], d: usize, log2_n: f64) -> Vec<f64> {
    let scale = 2.0 * (d as f64).sqrt() / (log2_n / d as f64).exp2();
    big_r_grid.iter().map(|&big_r| big_r * scale).collect()
}

fn cmd_validate(args: ValidateArgs) -> Result<i32> {
    let samples = args.samples.max(quantization::MIN_SAMPLES);
    let seed = args.seed;
    let mut report = String::new();
    let mut failures = 0usize;
    let mut check = |name: &str, pass: bool, detail: String| {
        let verdict = if pass { "PASS" } else { "FAIL" };
        let _ = writeln!(report, "{verdict} {name} ({detail})");
        if !pass {
            failures += 1;
        }
    };

    // closed-form quantization vs MC at the optimal delta
    let mut worst_z = 0.0f64;
    for d in 3..=8 {
        let delta = quantization::optimal_delta(d);
        let rep = quantization::mc_quantization_fn("dn-delta", d, 1 << (d - 1), Some(delta), samples, seed, |x| {
            dn_delta_nearest_sq(x, delta)
        })?;
        let z = (rep.theta - quantization::theta_dn_delta(d, delta)).abs() / rep.stderr;
        worst_z = worst_z.max(z);
    }
    check(
        "quantization-closed-vs-mc",
        worst_z <= 4.0,
        format!("max |z| = {worst_z:.3} over d in 3..=8"),
    );

    // the two Q_d routes agree
    let mut worst_rel = 0.0f64;
    for d in 2..=20 {
        for delta in [0.0, 0.3, 0.5, 0.7, 1.0] {
            let via_n = qd_normalize(d, 1u64 << (d - 1), quantization::theta_dn_delta(d, delta));
            let direct = quantization::qd_dn_delta(d, delta);
            worst_rel = worst_rel.max(((via_n - direct) / direct.max(1e-30)).abs());
        }
    }
    check(
        "qd-route-consistency",
        worst_rel < 1e-12,
        format!("max rel diff = {worst_rel:.3e}"),
    );

    // Voronoi cell of Z_1 occupies 2^(1-d) of the cube
    let d = 6;
    let est = crate::mc::fraction_over_cube(d, samples, seed, |x| {
        designs::voronoi_membership(x, d).map_or(false, |m| {
            m.region != designs::VoronoiRegion::OutsideV1
        })
    });
    let expect = (2.0f64).powi(1 - d as i32);
    let z = (est.mean - expect).abs() / est.stderr;
    check(
        "voronoi-cell-volume",
        z <= 4.0,
        format!("d=6 fraction {:.6} vs {expect:.6}, |z| = {z:.3}", est.mean),
    );

    // coverage regimes are continuous at their boundaries
    let mut worst_gap = 0.0f64;
    for (d, delta) in [(3usize, 0.3), (5, 0.5), (12, 0.7)] {
        for r in [delta, 1.0 + delta] {
            let eps = 1e-9;
            let below = coverage_dn_delta(d, delta, r - eps)?.value;
            let above = coverage_dn_delta(d, delta, r + eps)?.value;
            worst_gap = worst_gap.max((below - above).abs());
        }
    }
    check(
        "coverage-regime-continuity",
        worst_gap < 1e-6,
        format!("max boundary gap = {worst_gap:.3e}"),
    );

    // approximation vs MC coverage
    let mut worst_err = 0.0f64;
    let d = 5;
    let dists = coverage::mc_nearest_distances(d, samples, seed, |x| dn_delta_nearest_sq(x, 0.5));
    for r in [0.7, 0.9, 1.1] {
        let approx = coverage_dn_delta(d, 0.5, r)?.value;
        let p = coverage::empirical_cdf(&dists, r);
        let stderr = (p * (1.0 - p) / samples as f64).sqrt();
        let err = ((approx - p).abs() - 3.0 * stderr).max(0.0);
        worst_err = worst_err.max(err);
    }
    check(
        "coverage-approx-vs-mc",
        worst_err <= 0.01,
        format!("d=5 delta=0.5 max excess error = {worst_err:.4}"),
    );

    // bound sandwich on a radius grid, away from the near-zero-coverage
    // corner where approximation noise swamps the ordering
    let mut sandwich_ok = true;
    for i in 0..=40 {
        let r = 10.0f64.sqrt() * (0.25 + 0.95 * i as f64 / 40.0);
        let mid = coverage_dn_delta(10, 0.5, r)?.value;
        let (lower, upper) = coverage_bounds(10, 0.5, r);
        sandwich_ok &= lower <= mid + 1e-6 && mid <= upper + 1e-6;
    }
    check("coverage-bounds-sandwich", sandwich_ok, "d=10 delta=0.5 grid".into());

    // Sobol generator fixed points
    let pts = sobol::sobol_points(1, 3, sobol::bundled_direction_table())?;
    check(
        "sobol-first-points",
        pts == [0.5, 0.75, 0.25],
        format!("{pts:?}"),
    );

    // full-cover radii
    let r1 = full_cover_radius(FullCoverKind::Dn0, 7, 0.0);
    let r1b = full_cover_radius(FullCoverKind::DnDelta, 10, 0.5);
    check(
        "full-cover-radius",
        (r1.big_r - 0.5).abs() < 1e-12 && (r1b.big_r - 0.6259).abs() < 5e-5,
        format!("dn0 R1 = {:.6}, dn-delta d=10 R1 = {:.6}", r1.big_r, r1b.big_r),
    );

    // bit-level determinism of the MC driver
    let a = crate::mc::mean_over_cube(3, samples, seed, |x| x.iter().map(|v| v * v).sum());
    let b = crate::mc::mean_over_cube(3, samples, seed, |x| x.iter().map(|v| v * v).sum());
    check(
        "mc-determinism",
        a.mean.to_bits() == b.mean.to_bits(),
        format!("mean = {:.12}", a.mean),
    );

    let verdict = if failures == 0 {
        "all checks passed".to_string()
    } else {
        format!("{failures} check(s) failed")
    };
    let _ = writeln!(report, "{verdict}");
    write_out(&args.out.out, &report)?;
    Ok(if failures == 0 { EXIT_OK } else { EXIT_VALIDATION })
}

fn cmd_eval(args: EvalArgs) -> Result<i32> {
    check_dims(&[args.d])?;
    let d = args.d;
    let delta = args.delta.unwrap_or_else(|| quantization::optimal_delta(d));
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    let mut csv = String::from("quantity,d,delta,r,gamma,value,stderr,method\n");
    let theta = quantization::theta_dn_delta(d, delta);
    let qd = quantization::qd_dn_delta(d, delta);
    let _ = writeln!(csv, "theta,{d},{delta:.6},,,{theta:.17e},0,closed-form");
    let _ = writeln!(csv, "qd,{d},{delta:.6},,,{qd:.17e},0,closed-form");
    for &r in &args.r {
        let approx = coverage_dn_delta(d, delta, r)?;
        let (lower, upper) = coverage_bounds(d, delta, r);
        let mc = coverage::mc_coverage_dn_delta(d, delta, r, args.mc.samples, args.mc.seed)?;
        let _ = writeln!(csv, "coverage,{d},{delta:.6},{r:.6},,{:.17e},0,approx", approx.value);
        let _ = writeln!(csv, "coverage-lower,{d},{delta:.6},{r:.6},,{lower:.17e},0,approx");
        let _ = writeln!(csv, "coverage-upper,{d},{delta:.6},{r:.6},,{upper:.17e},0,approx");
        let _ = writeln!(
            csv,
            "coverage,{d},{delta:.6},{r:.6},,{:.17e},{:.17e},monte-carlo",
            mc.value, mc.stderr
        );
    }
    if let Some(gamma) = args.gamma {
        let sol = radius_for_coverage(d, delta, gamma, RadiusMethod::AnalyticApprox)?;
        let _ = writeln!(csv, "radius,{d},{delta:.6},,{gamma:.6},{:.17e},0,approx", sol.r);
        let _ = writeln!(
            csv,
            "normalized-radius,{d},{delta:.6},,{gamma:.6},{:.17e},0,approx",
            sol.big_r
        );
        let _ = writeln!(
            csv,
            "thickness,{d},{delta:.6},,{gamma:.6},{:.17e},0,approx",
            sol.thickness
        );
    }
    write_out(&args.out.out, &csv)?;
    Ok(EXIT_OK)
}
