//! Ball-cube intersection fractions, coverage of the cube by the vertex
//! designs, covering radii and thickness.
//!
//! The fraction of `[-1,1]^d` inside a ball is approximated by a normal CDF
//! with a first-order Edgeworth (skewness) correction. Coverage of the whole
//! design reduces to ball-cube fractions over the Voronoi cell of
//! `Z_1 = (delta,...,delta)`, with a one-dimensional integral over the slab
//! sections in the mid-radius regime. Monte Carlo estimators cross-check
//! every closed-form path.

use crate::designs::{dn_delta_nearest_sq, Design};
use crate::error::{Error, Result};
use crate::mc;
use crate::normal;
use crate::quad;

/// Absolute tolerance for the slab-section integrals.
pub const QUAD_TOL: f64 = 1e-8;
/// Coverage tolerance for the radius bisection.
pub const COVERAGE_TOL: f64 = 1e-6;
/// Bracket-width tolerance for the radius bisection.
pub const RADIUS_TOL: f64 = 1e-9;
/// Dimension past which `(1-t)^(d-1)` is evaluated in log space.
const LOG_WEIGHT_DIM: usize = 50;

/// First three central moments of `||U - Z||^2` for uniform `U` on `[-1,1]^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxMoments {
    /// `||Z||^2 + d/3`
    pub mu: f64,
    /// `(4/3)(||Z||^2 + d/15)`
    pub sigma_sq: f64,
    /// `(16/15)(||Z||^2 + d/63)`
    pub mu3: f64,
}

/// `ball_cube_moments(d, ||Z||^2)`: the moments driving the approximation.
pub fn ball_cube_moments(d: usize, z_norm_sq: f64) -> ApproxMoments {
    let df = d as f64;
    ApproxMoments {
        mu: z_norm_sq + df / 3.0,
        sigma_sq: 4.0 / 3.0 * (z_norm_sq + df / 15.0),
        mu3: 16.0 / 15.0 * (z_norm_sq + df / 63.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallCubeMethod {
    EdgeworthApprox,
    MonteCarlo,
    ExactSpecial,
}

/// The fraction of `[-1,1]^d` covered by a ball of radius `r` centred at a
/// point with squared norm `z_norm_sq`.
#[derive(Debug, Clone, Copy)]
pub struct BallCubeFraction {
    pub value: f64,
    pub method: BallCubeMethod,
    pub stderr: f64,
    pub z_norm_sq: f64,
    pub r: f64,
    pub d: usize,
}

/// Edgeworth-corrected normal approximation of the ball-cube fraction.
/// Depends on the centre only through its squared norm. Clamped to `[0,1]`.
pub fn approx_ball_cube_fraction(d: usize, z_norm_sq: f64, r: f64) -> BallCubeFraction {
    // a zero-volume ball covers nothing; the expansion is for r > 0
    if r <= 0.0 {
        return BallCubeFraction {
            value: 0.0,
            method: BallCubeMethod::EdgeworthApprox,
            stderr: 0.0,
            z_norm_sq,
            r,
            d,
        };
    }
    let sqrt3 = 3.0f64.sqrt();
    let df = d as f64;
    let spread = z_norm_sq + df / 15.0;
    let t = sqrt3 * (r * r - z_norm_sq - df / 3.0) / (2.0 * spread.sqrt());
    let correction =
        (z_norm_sq + df / 63.0) / (5.0 * sqrt3 * spread.powf(1.5)) * (1.0 - t * t) * normal::pdf(t);
    let value = (normal::phi(t) + correction).clamp(0.0, 1.0);
    BallCubeFraction {
        value,
        method: BallCubeMethod::EdgeworthApprox,
        stderr: 0.0,
        z_norm_sq,
        r,
        d,
    }
}

/// Monte Carlo estimate of the ball-cube fraction for an explicit centre.
pub fn mc_ball_cube_fraction(
    z: &[f64],
    r: f64,
    samples: u64,
    seed: u64,
) -> Result<BallCubeFraction> {
    check_samples(samples)?;
    let d = z.len();
    let r_sq = r * r;
    let est = mc::fraction_over_cube(d, samples, seed, |x| {
        let s: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
        s <= r_sq
    });
    Ok(BallCubeFraction {
        value: est.mean,
        method: BallCubeMethod::MonteCarlo,
        stderr: est.stderr,
        z_norm_sq: z.iter().map(|v| v * v).sum(),
        r,
        d,
    })
}

/// Exact value in the special geometries where no approximation is needed:
/// empty intersection, ball containing the cube, or `d = 1`.
pub fn exact_special_ball_cube_fraction(z: &[f64], r: f64) -> Option<BallCubeFraction> {
    let d = z.len();
    let z_norm_sq: f64 = z.iter().map(|v| v * v).sum();
    let make = |value: f64| BallCubeFraction {
        value,
        method: BallCubeMethod::ExactSpecial,
        stderr: 0.0,
        z_norm_sq,
        r,
        d,
    };
    if d == 1 {
        let len = (z[0] + r).min(1.0) - (z[0] - r).max(-1.0);
        return Some(make((len / 2.0).clamp(0.0, 1.0)));
    }
    // ball contains the cube: r >= ||Z|| + sqrt(d)
    if r >= z_norm_sq.sqrt() + (d as f64).sqrt() {
        return Some(make(1.0));
    }
    // ball misses the cube: distance from Z to the cube exceeds r
    let dist_sq: f64 = z
        .iter()
        .map(|&v| {
            let excess = (v.abs() - 1.0).max(0.0);
            excess * excess
        })
        .sum();
    if dist_sq > r * r {
        return Some(make(0.0));
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageRegime {
    RLeDelta,
    Mid,
    RGe1PlusDelta,
}

impl CoverageRegime {
    pub fn of(delta: f64, r: f64) -> CoverageRegime {
        if r <= delta {
            CoverageRegime::RLeDelta
        } else if r <= 1.0 + delta {
            CoverageRegime::Mid
        } else {
            CoverageRegime::RGe1PlusDelta
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CoverageRegime::RLeDelta => "r<=delta",
            CoverageRegime::Mid => "mid",
            CoverageRegime::RGe1PlusDelta => "r>=1+delta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageMethod {
    AnalyticApprox,
    MonteCarlo,
    LowerBound,
    UpperBound,
}

impl CoverageMethod {
    pub fn label(self) -> &'static str {
        match self {
            CoverageMethod::AnalyticApprox => "approx",
            CoverageMethod::MonteCarlo => "monte-carlo",
            CoverageMethod::LowerBound => "lower-bound",
            CoverageMethod::UpperBound => "upper-bound",
        }
    }
}

/// Estimate of the covered fraction of the cube for one `(d, delta, r)`.
#[derive(Debug, Clone, Copy)]
pub struct CoverageResult {
    pub value: f64,
    pub regime: Option<CoverageRegime>,
    pub method: CoverageMethod,
    pub stderr: f64,
    pub d: usize,
    pub delta: Option<f64>,
    pub r: f64,
    pub samples: u64,
    pub seed: u64,
}

fn check_samples(samples: u64) -> Result<()> {
    if samples < crate::quantization::MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            got: samples,
            min: crate::quantization::MIN_SAMPLES,
        });
    }
    Ok(())
}

/// Squared norm of the boldface centre `(2 delta - 1, ..., 2 delta - 1)`.
fn main_center_norm_sq(d: usize, delta: f64) -> f64 {
    let c = 2.0 * delta - 1.0;
    d as f64 * c * c
}

/// Slab-section integrand: inner ball-cube fraction in dimension `d-1`
/// weighted by `(1-t)^(d-1)`. As `t -> 1` the weight dominates the growing
/// centre coordinate, so the integrand is evaluated as 0 once the weight
/// underflows.
fn slab_integrand(d: usize, delta: f64, r: f64, t: f64) -> f64 {
    let s = 1.0 - t;
    if s <= 0.0 {
        return 0.0;
    }
    let dm1 = (d - 1) as f64;
    let weight = if d > LOG_WEIGHT_DIM {
        let lw = dm1 * s.ln();
        if lw < -745.0 {
            return 0.0;
        }
        lw.exp()
    } else {
        s.powi(d as i32 - 1)
    };
    if weight == 0.0 {
        return 0.0;
    }
    let rad_sq = r * r - (t + delta) * (t + delta);
    if rad_sq <= 0.0 {
        return 0.0;
    }
    let c = (2.0 * delta - 1.0 - t) / s;
    let inner = approx_ball_cube_fraction(d - 1, dm1 * c * c, 2.0 * rad_sq.sqrt() / s);
    inner.value * weight
}

fn coverage_value_in_regime(d: usize, delta: f64, r: f64, regime: CoverageRegime) -> f64 {
    let main = approx_ball_cube_fraction(d, main_center_norm_sq(d, delta), 2.0 * r).value;
    let value = match regime {
        CoverageRegime::RLeDelta => 0.5 * main,
        CoverageRegime::Mid | CoverageRegime::RGe1PlusDelta => {
            let upper = match regime {
                CoverageRegime::Mid => (r - delta).max(0.0),
                _ => 1.0,
            };
            let integral = quad::integrate(|t| slab_integrand(d, delta, r, t), 0.0, upper, QUAD_TOL);
            0.5 * (main + d as f64 * integral)
        }
    };
    value.clamp(0.0, 1.0)
}

/// Approximate covered fraction `C_d(D_{n,delta}, r)` of the cube by the
/// even-parity vertex design. Requires `d >= 2`.
pub fn coverage_dn_delta(d: usize, delta: f64, r: f64) -> Result<CoverageResult> {
    if d < 2 {
        return Err(Error::DimensionTooSmall { got: d, min: 2 });
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    let regime = CoverageRegime::of(delta, r);
    Ok(CoverageResult {
        value: coverage_value_in_regime(d, delta, r, regime),
        regime: Some(regime),
        method: CoverageMethod::AnalyticApprox,
        stderr: 0.0,
        d,
        delta: Some(delta),
        r,
        samples: 0,
        seed: 0,
    })
}

/// Lower and upper bounds on the covered fraction. The lower bound adds the
/// fraction from the centre `A = (2 delta + 1, 2 delta - 1, ..., 2 delta - 1)`.
///
/// `A` sits a distance `2 delta` outside the face `x_1 = 1`, so its ball
/// clips at most a spherical cap off the cube; the cap volume caps the
/// Edgeworth value, which badly overestimates this deep-tail fraction.
pub fn coverage_bounds(d: usize, delta: f64, r: f64) -> (f64, f64) {
    let c = 2.0 * delta - 1.0;
    let a_norm_sq = (2.0 * delta + 1.0) * (2.0 * delta + 1.0) + (d as f64 - 1.0) * c * c;
    let upper = approx_ball_cube_fraction(d, main_center_norm_sq(d, delta), 2.0 * r).value;
    let c_a = approx_ball_cube_fraction(d, a_norm_sq, 2.0 * r)
        .value
        .min(ball_beyond_face_fraction(d, 2.0 * r, 2.0 * delta));
    let lower = 0.5 * (upper + c_a);
    (lower.min(upper), upper)
}

/// Fraction of the cube `[-1,1]^d` occupied by the spherical cap that a ball
/// of radius `rho`, centred `dist` outside a face, cuts past that face.
fn ball_beyond_face_fraction(d: usize, rho: f64, dist: f64) -> f64 {
    if dist >= rho {
        return 0.0;
    }
    if dist <= 0.0 {
        return 1.0;
    }
    let df = d as f64;
    // cap volume = V_d(rho) * I_x((d+1)/2, 1/2) / 2 with x = 1 - (dist/rho)^2
    let x = 1.0 - (dist / rho) * (dist / rho);
    let half = 0.5 * statrs::function::beta::beta_reg((df + 1.0) / 2.0, 0.5, x);
    let ln_ball_over_cube = 0.5 * df * std::f64::consts::PI.ln()
        - statrs::function::gamma::ln_gamma(df / 2.0 + 1.0)
        + df * (rho.ln() - std::f64::consts::LN_2);
    (ln_ball_over_cube.exp() * half).min(1.0)
}

/// Monte Carlo covered fraction for an arbitrary nearest-distance rule.
pub fn mc_coverage_fn<F>(
    d: usize,
    delta: Option<f64>,
    r: f64,
    samples: u64,
    seed: u64,
    nearest_sq: F,
) -> Result<CoverageResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    check_samples(samples)?;
    let r_sq = r * r;
    let est = mc::fraction_over_cube(d, samples, seed, |x| nearest_sq(x) <= r_sq);
    Ok(CoverageResult {
        value: est.mean,
        regime: delta.map(|dl| CoverageRegime::of(dl, r)),
        method: CoverageMethod::MonteCarlo,
        stderr: est.stderr,
        d,
        delta,
        r,
        samples,
        seed,
    })
}

/// Monte Carlo covered fraction for an explicit design.
pub fn mc_coverage(design: &Design, r: f64, samples: u64, seed: u64) -> Result<CoverageResult> {
    mc_coverage_fn(design.d, design.delta, r, samples, seed, |x| {
        design.nearest_sq_distance(x).expect("dimension fixed")
    })
}

/// Monte Carlo covered fraction for the even-parity vertex design via the
/// closed-form nearest rule; works past the enumeration cap.
pub fn mc_coverage_dn_delta(
    d: usize,
    delta: f64,
    r: f64,
    samples: u64,
    seed: u64,
) -> Result<CoverageResult> {
    mc_coverage_fn(d, Some(delta), r, samples, seed, |x| {
        dn_delta_nearest_sq(x, delta)
    })
}

/// `R = n^(1/d) r / (2 sqrt(d))`.
pub fn normalized_radius(n: u64, d: usize, r: f64) -> f64 {
    normalized_radius_log2((n as f64).log2(), d, r)
}

/// Same, parameterized by `log2(n)` so `n = 2^(d-1)` never overflows.
pub fn normalized_radius_log2(log2_n: f64, d: usize, r: f64) -> f64 {
    (log2_n / d as f64).exp2() * r / (2.0 * (d as f64).sqrt())
}

/// Normalized covering thickness `(sqrt(d) R)^d`. May overflow to infinity
/// in high dimension; see [`ln_thickness`] for the log-space value.
pub fn thickness(d: usize, big_r: f64) -> f64 {
    ln_thickness(d, big_r).exp()
}

/// `ln` of the normalized thickness: `d (ln sqrt(d) + ln R)`.
pub fn ln_thickness(d: usize, big_r: f64) -> f64 {
    let df = d as f64;
    df * (0.5 * df.ln() + big_r.ln())
}

/// Radius achieving a requested coverage, with its normalized statistics.
#[derive(Debug, Clone, Copy)]
pub struct RadiusSolution {
    pub gamma: f64,
    pub r: f64,
    /// `R` per the radius normalization.
    pub big_r: f64,
    pub thickness: f64,
    pub solver_tol: f64,
}

/// Coverage evaluator used by the radius solver.
pub enum RadiusMethod {
    /// Closed-form approximation pipeline.
    AnalyticApprox,
    /// Empirical coverage from one deterministic Monte Carlo pass.
    MonteCarlo { samples: u64, seed: u64 },
}

/// Bisection on `r in [0, 2 sqrt(d)]` against a nondecreasing coverage
/// evaluator, stopping at coverage tolerance [`COVERAGE_TOL`] or bracket
/// width [`RADIUS_TOL`].
pub fn bisect_radius<F>(d: usize, target: f64, coverage: F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let mut lo = 0.0f64;
    let mut hi = 2.0 * (d as f64).sqrt();
    if coverage(lo) > target || coverage(hi) < target {
        return Err(Error::BracketInvalid { lo, hi });
    }
    let mut tol = COVERAGE_TOL;
    while hi - lo > RADIUS_TOL {
        let mid = 0.5 * (lo + hi);
        let c = coverage(mid);
        if (c - target).abs() <= tol {
            return Ok((mid, tol));
        }
        if c < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // the MC evaluator is a step function, so the coverage tolerance may
    // never trigger; report the bracket width instead
    tol = hi - lo;
    Ok((0.5 * (lo + hi), tol))
}

/// Smallest radius with covered fraction `1 - gamma` for the even-parity
/// vertex design, plus normalized radius and thickness (`n = 2^(d-1)`).
pub fn radius_for_coverage(
    d: usize,
    delta: f64,
    gamma: f64,
    method: RadiusMethod,
) -> Result<RadiusSolution> {
    if !(0.0 < gamma && gamma < 1.0) {
        return Err(Error::GammaOutOfRange(gamma));
    }
    let target = 1.0 - gamma;
    let (r, solver_tol) = match method {
        RadiusMethod::AnalyticApprox => bisect_radius(d, target, |r| {
            coverage_value_in_regime(d, delta, r, CoverageRegime::of(delta, r))
        })?,
        RadiusMethod::MonteCarlo { samples, seed } => {
            check_samples(samples)?;
            let dists = mc_nearest_distances(d, samples, seed, |x| dn_delta_nearest_sq(x, delta));
            bisect_radius(d, target, |r| empirical_cdf(&dists, r))?
        }
    };
    Ok(solution_from_radius(d as f64 - 1.0, d, gamma, r, solver_tol))
}

fn solution_from_radius(
    log2_n: f64,
    d: usize,
    gamma: f64,
    r: f64,
    solver_tol: f64,
) -> RadiusSolution {
    let big_r = normalized_radius_log2(log2_n, d, r);
    RadiusSolution {
        gamma,
        r,
        big_r,
        thickness: thickness(d, big_r),
        solver_tol,
    }
}

/// Radius solve against an explicit design, using one deterministic Monte
/// Carlo pass of nearest distances.
pub fn mc_radius_for_coverage(
    design: &Design,
    gamma: f64,
    samples: u64,
    seed: u64,
) -> Result<RadiusSolution> {
    if !(0.0 < gamma && gamma < 1.0) {
        return Err(Error::GammaOutOfRange(gamma));
    }
    check_samples(samples)?;
    let dists = mc_nearest_distances(design.d, samples, seed, |x| {
        design.nearest_sq_distance(x).expect("dimension fixed")
    });
    let (r, solver_tol) = bisect_radius(design.d, 1.0 - gamma, |r| empirical_cdf(&dists, r))?;
    Ok(solution_from_radius(
        (design.n as f64).log2(),
        design.d,
        gamma,
        r,
        solver_tol,
    ))
}

/// Sorted nearest distances from one deterministic Monte Carlo pass; the
/// cached input for empirical coverage and quantile queries.
pub fn mc_nearest_distances<F>(d: usize, samples: u64, seed: u64, nearest_sq: F) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut dists: Vec<f64> = mc::map_blocks(samples, seed, |rng, count| {
        let mut x = vec![0.0f64; d];
        let mut block = Vec::with_capacity(count as usize);
        for _ in 0..count {
            mc::sample_cube_point(rng, &mut x);
            block.push(nearest_sq(&x).sqrt());
        }
        block
    })
    .into_iter()
    .flatten()
    .collect();
    dists.sort_unstable_by(f64::total_cmp);
    dists
}

/// Fraction of a sorted sample at or below `r`.
pub fn empirical_cdf(sorted: &[f64], r: f64) -> f64 {
    let k = sorted.partition_point(|&v| v <= r);
    k as f64 / sorted.len() as f64
}

/// Kind selector for the full covering radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FullCoverKind {
    DnDelta,
    Dn0,
}

/// Smallest radius achieving complete coverage.
///
/// For the even-parity design this is the distance from `Z_1` to the
/// farthest vertex of its Voronoi cell:
/// `r_1^2 = max(d delta^2, (1+delta)^2 + (d-1)(1-delta)^2)`.
/// For the full vertex design, `r_1 = sqrt(d)/2`.
pub fn full_cover_radius(kind: FullCoverKind, d: usize, delta: f64) -> RadiusSolution {
    let df = d as f64;
    let (r, log2_n) = match kind {
        FullCoverKind::DnDelta => {
            let corner = df * delta * delta;
            let slab = (1.0 + delta) * (1.0 + delta) + (df - 1.0) * (1.0 - delta) * (1.0 - delta);
            (corner.max(slab).sqrt(), df - 1.0)
        }
        FullCoverKind::Dn0 => (df.sqrt() / 2.0, df),
    };
    solution_from_radius(log2_n, d, 0.0, r, 0.0)
}

/// Empirical CDF of the normalized nearest distance `R`, from one Monte
/// Carlo pass, evaluated at an ascending grid of raw radii.
pub fn distance_cdf_fn<F>(
    d: usize,
    log2_n: f64,
    r_grid: &[f64],
    samples: u64,
    seed: u64,
    nearest_sq: F,
) -> Result<Vec<(f64, f64)>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    check_samples(samples)?;
    debug_assert!(r_grid.windows(2).all(|w| w[0] <= w[1]));
    // bin[i] counts distances in (r_{i-1}, r_i]; the last bin catches the rest
    let bins: Vec<u64> = mc::map_blocks(samples, seed, |rng, count| {
        let mut x = vec![0.0f64; d];
        let mut bins = vec![0u64; r_grid.len() + 1];
        for _ in 0..count {
            mc::sample_cube_point(rng, &mut x);
            let dist = nearest_sq(&x).sqrt();
            let idx = r_grid.partition_point(|&g| g < dist);
            bins[idx] += 1;
        }
        bins
    })
    .into_iter()
    .fold(vec![0u64; r_grid.len() + 1], |mut acc, b| {
        for (a, v) in acc.iter_mut().zip(b) {
            *a += v;
        }
        acc
    });
    let mut cum = 0u64;
    let n = samples as f64;
    Ok(r_grid
        .iter()
        .zip(&bins)
        .map(|(&r, &count)| {
            cum += count;
            (normalized_radius_log2(log2_n, d, r), cum as f64 / n)
        })
        .collect())
}

/// [`distance_cdf_fn`] for an explicit design.
pub fn distance_cdf_curve(
    design: &Design,
    r_grid: &[f64],
    samples: u64,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    distance_cdf_fn(
        design.d,
        (design.n as f64).log2(),
        r_grid,
        samples,
        seed,
        |x| design.nearest_sq_distance(x).expect("dimension fixed"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn moments_closed_forms() {
        let m = ball_cube_moments(1, 0.0);
        assert!((m.mu - 1.0 / 3.0).abs() < 1e-16);
        assert!((m.sigma_sq - 4.0 / 45.0).abs() < 1e-16);
        assert!((m.mu3 - 16.0 / 945.0).abs() < 1e-16);

        let m = ball_cube_moments(1, 1.0);
        assert!((m.mu - 4.0 / 3.0).abs() < 1e-15);
        assert!((m.sigma_sq - 64.0 / 45.0).abs() < 1e-15);
        assert!((m.mu3 - 1024.0 / 945.0).abs() < 1e-15);
    }

    #[test]
    fn moments_match_quadrature() {
        // oracle: 1-D quadrature of the central moments of (u-z)^2 on [-1,1]
        for &z in &[0.0, 0.25, 0.5, 1.0] {
            let m = ball_cube_moments(1, z * z);
            let avg = |f: &dyn Fn(f64) -> f64| quad::integrate(f, -1.0, 1.0, 1e-13) / 2.0;
            let mu = avg(&|u| (u - z) * (u - z));
            let var = avg(&|u| {
                let e = (u - z) * (u - z) - mu;
                e * e
            });
            let mu3 = avg(&|u| {
                let e = (u - z) * (u - z) - mu;
                e * e * e
            });
            assert!((m.mu - mu).abs() < 1e-10, "z={z}");
            assert!((m.sigma_sq - var).abs() < 1e-10, "z={z}");
            assert!((m.mu3 - mu3).abs() < 1e-10, "z={z}");
        }
    }

    #[test]
    fn moments_additive_over_coordinates() {
        let z = [0.3, -0.7, 0.1];
        let z_norm_sq: f64 = z.iter().map(|v| v * v).sum();
        let total = ball_cube_moments(3, z_norm_sq);
        let mut mu = 0.0;
        let mut var = 0.0;
        let mut mu3 = 0.0;
        for zi in z {
            let m = ball_cube_moments(1, zi * zi);
            mu += m.mu;
            var += m.sigma_sq;
            mu3 += m.mu3;
        }
        assert!((total.mu - mu).abs() < 1e-14);
        assert!((total.sigma_sq - var).abs() < 1e-14);
        assert!((total.mu3 - mu3).abs() < 1e-14);
    }

    #[test]
    fn approx_tails_and_center() {
        // r = 0 with a far centre: strongly negative t
        let f = approx_ball_cube_fraction(3, 25.0, 0.0);
        assert!(f.value < 1e-12);

        // t = 0: r^2 = ||Z||^2 + d/3
        let d = 4;
        let z_sq = 0.7;
        let r = (z_sq + d as f64 / 3.0).sqrt();
        let f = approx_ball_cube_fraction(d, z_sq, r);
        let expect = 0.5
            + (z_sq + d as f64 / 63.0)
                / (5.0 * 3.0f64.sqrt() * (2.0 * PI).sqrt() * (z_sq + d as f64 / 15.0).powf(1.5));
        assert!((f.value - expect).abs() < 1e-14);
    }

    #[test]
    fn correction_vanishes_at_t_one() {
        // pick r so that t = +-1; the approximation must reduce to Phi(+-1)
        let d = 6;
        let z_sq = 0.4;
        let spread = (z_sq + d as f64 / 15.0).sqrt();
        for sign in [1.0, -1.0] {
            let r_sq = z_sq + d as f64 / 3.0 + sign * 2.0 * spread / 3.0f64.sqrt();
            let f = approx_ball_cube_fraction(d, z_sq, r_sq.sqrt());
            assert!((f.value - normal::phi(sign)).abs() < 1e-15);
        }
    }

    #[test]
    fn approx_near_mc_at_half_coverage() {
        // d=20, Z=0, r at the distribution median
        let d = 20;
        let r = (d as f64 / 3.0).sqrt();
        let approx = approx_ball_cube_fraction(d, 0.0, r);
        let mc = mc_ball_cube_fraction(&vec![0.0; d], r, 10_000_000, 3).unwrap();
        assert!(
            (approx.value - mc.value).abs() < 0.005,
            "approx {} mc {}",
            approx.value,
            mc.value
        );
    }

    #[test]
    fn mc_ball_cube_examples() {
        // ball contains the cube
        let f = mc_ball_cube_fraction(&[0.2, -0.1], 3.0, 1_000, 0).unwrap();
        assert_eq!(f.value, 1.0);
        assert_eq!(f.stderr, 0.0);

        // 1-D interval
        let f = mc_ball_cube_fraction(&[0.0], 0.5, 200_000, 1).unwrap();
        assert!((f.value - 0.5).abs() < 4.0 * f.stderr);

        // disk fully inside the square: pi r^2 / 4
        let f = mc_ball_cube_fraction(&[0.5, 0.5], 0.2, 1_000_000, 2).unwrap();
        let expect = PI * 0.04 / 4.0;
        assert!((f.value - expect).abs() < 4.0 * f.stderr.max(1e-5));
    }

    #[test]
    fn exact_special_cases() {
        let f = exact_special_ball_cube_fraction(&[0.0], 0.5).unwrap();
        assert_eq!(f.value, 0.5);
        let f = exact_special_ball_cube_fraction(&[0.0, 0.0], 10.0).unwrap();
        assert_eq!(f.value, 1.0);
        let f = exact_special_ball_cube_fraction(&[5.0, 0.0], 1.0).unwrap();
        assert_eq!(f.value, 0.0);
        assert!(exact_special_ball_cube_fraction(&[0.0, 0.0], 1.0).is_none());
    }

    #[test]
    fn coverage_planar_example() {
        // two disjoint balls of radius 0.2 inside the square: 2 pi r^2 / 4
        let exact = 2.0 * PI * 0.04 / 4.0;
        let cov = coverage_dn_delta(2, 0.5, 0.2).unwrap();
        assert_eq!(cov.regime, Some(CoverageRegime::RLeDelta));
        // the Edgeworth approximation is coarse at d=2 but within 0.01
        assert!((cov.value - exact).abs() < 0.01, "{} vs {exact}", cov.value);
        // structural identity: half of the rescaled single-ball fraction
        let half_main = 0.5 * approx_ball_cube_fraction(2, 0.0, 0.4).value;
        assert_eq!(cov.value, half_main);
        // MC agrees with the exact value
        let mc = mc_coverage_dn_delta(2, 0.5, 0.2, 1_000_000, 4).unwrap();
        assert!((mc.value - exact).abs() < 4.0 * mc.stderr);
    }

    #[test]
    fn coverage_trivial_radii() {
        for &(d, delta) in &[(3usize, 0.3), (7, 0.5)] {
            assert_eq!(coverage_dn_delta(d, delta, 0.0).unwrap().value, 0.0);
            let full = coverage_dn_delta(d, delta, 2.0 * (d as f64).sqrt()).unwrap();
            assert!((full.value - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn coverage_full_cover_radius_example() {
        // d=10, delta=0.5: full coverage at r = sqrt(d+8)/2
        let r1 = (18.0f64).sqrt() / 2.0;
        let cov = coverage_dn_delta(10, 0.5, r1).unwrap();
        assert!(cov.value >= 0.999, "{}", cov.value);
        let mc = mc_coverage_dn_delta(10, 0.5, r1, 1_000_000, 5).unwrap();
        assert!((mc.value - 1.0).abs() < 3.0 * mc.stderr.max(2e-6));
    }

    #[test]
    fn coverage_monotone_in_r() {
        for &(d, delta) in &[(3usize, 0.4), (10, 0.5), (20, 0.6)] {
            let mut prev = -1.0;
            let r_max = 1.5 * (d as f64).sqrt();
            for i in 0..=60 {
                let r = r_max * i as f64 / 60.0;
                let v = coverage_dn_delta(d, delta, r).unwrap().value;
                assert!(v >= prev - 1e-6, "d={d} delta={delta} r={r}");
                prev = v;
            }
        }
    }

    #[test]
    fn regime_continuity() {
        for &(d, delta) in &[(3usize, 0.3), (5, 0.5), (12, 0.7)] {
            let at = |r: f64, regime| coverage_value_in_regime(d, delta, r, regime);
            let a = at(delta, CoverageRegime::RLeDelta);
            let b = at(delta, CoverageRegime::Mid);
            assert!((a - b).abs() < 1e-6, "d={d} at r=delta: {a} vs {b}");
            let a = at(1.0 + delta, CoverageRegime::Mid);
            let b = at(1.0 + delta, CoverageRegime::RGe1PlusDelta);
            assert!((a - b).abs() < 1e-6, "d={d} at r=1+delta: {a} vs {b}");
        }
    }

    #[test]
    fn cap_fraction_oracles() {
        // d=1: the cap is the interval (dist, rho], fraction (rho-dist)/2
        assert!((ball_beyond_face_fraction(1, 1.4, 1.3) - 0.05).abs() < 1e-12);
        // d=2: circular segment area rho^2 (acos(q) - q sqrt(1-q^2)), q = dist/rho
        let (rho, dist) = (1.5, 0.9);
        let q: f64 = dist / rho;
        let segment = rho * rho * (q.acos() - q * (1.0 - q * q).sqrt());
        assert!((ball_beyond_face_fraction(2, rho, dist) - segment / 4.0).abs() < 1e-12);
        // degenerate ends
        assert_eq!(ball_beyond_face_fraction(5, 1.0, 1.0), 0.0);
        assert_eq!(ball_beyond_face_fraction(5, 1.0, -0.1), 1.0);
        // the cap bites: a barely-clipping ball has a tiny true fraction
        let (lower, upper) = coverage_bounds(5, 0.65, 0.7);
        assert!(lower <= upper);
        assert!(lower - 0.5 * upper < 3e-4, "cap not applied: {lower} {upper}");
    }

    #[test]
    fn bounds_sandwich() {
        for &(d, delta) in &[(5usize, 0.4), (20, 0.5), (20, 0.55), (50, 0.5)] {
            assert_eq!(coverage_bounds(d, delta, 0.0), (0.0, 0.0));
            let (lo, hi) = coverage_bounds(d, delta, 3.0 * (d as f64).sqrt());
            assert_eq!((lo, hi), (1.0, 1.0));
            // away from r ~ 0, where approximation noise swamps the
            // near-zero exact values and the ordering is meaningless
            for i in 0..=40 {
                let r = (d as f64).sqrt() * (0.25 + 0.95 * i as f64 / 40.0);
                let (lower, upper) = coverage_bounds(d, delta, r);
                let mid = coverage_dn_delta(d, delta, r).unwrap().value;
                assert!(lower <= mid + 1e-6, "d={d} r={r}: {lower} > {mid}");
                assert!(mid <= upper + 1e-6, "d={d} r={r}: {mid} > {upper}");
            }
        }
    }

    #[test]
    fn radius_solver_sanity() {
        // tiny required coverage means tiny radius
        let sol = radius_for_coverage(10, 0.5, 0.999, RadiusMethod::AnalyticApprox).unwrap();
        assert!(sol.r < 0.7, "{sol:?}");
        // monotone in gamma
        let s1 = radius_for_coverage(10, 0.5, 0.5, RadiusMethod::AnalyticApprox).unwrap();
        let s2 = radius_for_coverage(10, 0.5, 0.01, RadiusMethod::AnalyticApprox).unwrap();
        assert!(s1.r < s2.r);
        assert!(matches!(
            radius_for_coverage(10, 0.5, 1.5, RadiusMethod::AnalyticApprox),
            Err(Error::GammaOutOfRange(_))
        ));
    }

    #[test]
    fn radius_solver_mc_close_to_approx() {
        let approx = radius_for_coverage(8, 0.5, 0.05, RadiusMethod::AnalyticApprox).unwrap();
        let mc = radius_for_coverage(
            8,
            0.5,
            0.05,
            RadiusMethod::MonteCarlo {
                samples: 400_000,
                seed: 9,
            },
        )
        .unwrap();
        assert!((approx.r - mc.r).abs() < 0.02, "{} vs {}", approx.r, mc.r);
    }

    #[test]
    fn full_cover_radius_values() {
        for d in [3usize, 7, 12] {
            let sol = full_cover_radius(FullCoverKind::Dn0, d, 0.0);
            assert!((sol.big_r - 0.5).abs() < 1e-15, "d={d}");
        }
        let sol = full_cover_radius(FullCoverKind::DnDelta, 10, 0.5);
        assert!((sol.r - 18.0f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((sol.big_r - 0.6259).abs() < 5e-5);
        // high-dimensional corner-dominated regime
        let sol = full_cover_radius(FullCoverKind::DnDelta, 10_000, 0.7);
        assert!((sol.r / 100.0 - 0.7).abs() < 1e-2);
    }

    #[test]
    fn normalized_radius_examples() {
        for d in [2usize, 5, 11] {
            let r = (d as f64).sqrt() / 2.0;
            assert!((normalized_radius(1u64 << d, d, r) - 0.5).abs() < 1e-14);
        }
        assert!((normalized_radius(512, 10, 18.0f64.sqrt() / 2.0) - 0.6259).abs() < 5e-5);
        assert!((normalized_radius(1, 4, 4.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn thickness_examples() {
        let d = 6;
        let r = 1.0 / (d as f64).sqrt();
        assert!((thickness(d, r) - 1.0).abs() < 1e-12);
        assert!((thickness(2, 0.5) - 0.5).abs() < 1e-14);
        let th = thickness(10, 0.3649);
        // oracle: exp(10 (ln sqrt(10) + ln 0.3649)) = 4.18542
        assert!((th - 4.18542).abs() < 5e-5, "{th}");
        // log-space path agrees
        assert!((ln_thickness(10, 0.3649).exp() - th).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_jump_probe() {
        // coverage as a function of alpha = r / sqrt(d) concentrates at
        // 1/(2 sqrt(3)) for delta = 1/2 in high dimension
        let d = 200;
        let alpha0 = 1.0 / (2.0 * 3.0f64.sqrt());
        let low = coverage_dn_delta(d, 0.5, 0.9 * alpha0 * (d as f64).sqrt())
            .unwrap()
            .value;
        let high = coverage_dn_delta(d, 0.5, 1.1 * alpha0 * (d as f64).sqrt())
            .unwrap()
            .value;
        assert!(low < 0.05, "{low}");
        assert!(high > 0.95, "{high}");
    }

    #[test]
    fn distance_cdf_trivia() {
        let des = crate::designs::build_dn_delta(4, 0.5).unwrap();
        let d_sqrt = 4.0f64.sqrt();
        let grid = [0.0, 0.5, 1.0, 2.0 * d_sqrt];
        let curve = distance_cdf_curve(&des, &grid, 100_000, 6).unwrap();
        assert_eq!(curve[0].1, 0.0);
        assert_eq!(curve[3].1, 1.0);
        // nondecreasing
        assert!(curve.windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn mean_sq_matches_stieltjes_of_cdf() {
        // E rho^2 from raw samples equals the Stieltjes integral of r^2
        // against the empirical distance CDF built from the same draws
        let des = crate::designs::build_dn0(3).unwrap();
        let dists = mc_nearest_distances(3, 50_000, 8, |x| {
            des.nearest_sq_distance(x).expect("dim")
        });
        let direct: f64 = dists.iter().map(|v| v * v).sum::<f64>() / dists.len() as f64;
        let jump = 1.0 / dists.len() as f64;
        let stieltjes: f64 = dists.iter().map(|v| v * v * jump).sum();
        assert!(((direct - stieltjes) / direct).abs() < 1e-12);
    }
}
