//! Mean squared quantization error: closed forms for the vertex designs and
//! a Monte Carlo estimator for arbitrary designs.

use crate::designs::Design;
use crate::error::{Error, Result};
use crate::mc;

/// Minimum sample count accepted by the Monte Carlo estimators.
pub const MIN_SAMPLES: u64 = 1_000;

/// Mean squared quantization error of the even-parity vertex design:
/// `d(delta^2 - delta + 1/3) + 2 delta / (d+1)`.
pub fn theta_dn_delta(d: usize, delta: f64) -> f64 {
    let df = d as f64;
    df * (delta * delta - delta + 1.0 / 3.0) + 2.0 * delta / (df + 1.0)
}

/// Normalized quantization error of the even-parity vertex design:
/// `2^(-2/d) (delta^2 - delta + 1/3 + 2 delta / (d(d+1)))`.
pub fn qd_dn_delta(d: usize, delta: f64) -> f64 {
    let df = d as f64;
    (-2.0 / df).exp2() * (delta * delta - delta + 1.0 / 3.0 + 2.0 * delta / (df * (df + 1.0)))
}

/// The `delta` minimizing both `theta` and `Q_d`: `1/2 - 1/(d(d+1))`.
pub fn optimal_delta(d: usize) -> f64 {
    let df = d as f64;
    0.5 - 1.0 / (df * (df + 1.0))
}

/// `Q_d` at the optimal `delta`:
/// `2^(-2/d) [1/12 + (d^2 + d - 1) / ((d+1)^2 d^2)]`.
pub fn qd_optimal(d: usize) -> f64 {
    let df = d as f64;
    (-2.0 / df).exp2()
        * (1.0 / 12.0 + (df * df + df - 1.0) / ((df + 1.0) * (df + 1.0) * df * df))
}

/// Size- and dimension-normalized quantization error: `n^(2/d) theta / (4d)`.
pub fn qd_normalize(d: usize, n: u64, theta: f64) -> f64 {
    let df = d as f64;
    (2.0 * (n as f64).log2() / df).exp2() * theta / (4.0 * df)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantMethod {
    ClosedForm,
    MonteCarlo,
}

impl QuantMethod {
    pub fn label(self) -> &'static str {
        match self {
            QuantMethod::ClosedForm => "closed-form",
            QuantMethod::MonteCarlo => "monte-carlo",
        }
    }
}

/// Quantization error estimate for one design.
#[derive(Debug, Clone)]
pub struct QuantizationReport {
    pub design: String,
    pub d: usize,
    pub n: u64,
    pub delta: Option<f64>,
    pub theta: f64,
    pub qd: f64,
    pub method: QuantMethod,
    /// Standard error of `theta`; 0 for closed forms.
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl QuantizationReport {
    pub const CSV_HEADER: &'static str = "design,d,n,delta,method,theta,qd,stderr,samples,seed";

    pub fn csv_row(&self) -> String {
        let delta = self
            .delta
            .map(|v| format!("{v:.6}"))
            .unwrap_or_default();
        format!(
            "{},{},{},{},{},{:.17e},{:.17e},{:.17e},{},{}",
            self.design,
            self.d,
            self.n,
            delta,
            self.method.label(),
            self.theta,
            self.qd,
            self.stderr,
            self.samples,
            self.seed
        )
    }
}

fn check_samples(samples: u64) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            got: samples,
            min: MIN_SAMPLES,
        });
    }
    Ok(())
}

/// Monte Carlo estimate of `theta` over a nearest-squared-distance rule.
/// Deterministic per `(seed, samples)` regardless of worker count.
pub fn mc_quantization_fn<F>(
    label: &str,
    d: usize,
    n: u64,
    delta: Option<f64>,
    samples: u64,
    seed: u64,
    nearest_sq: F,
) -> Result<QuantizationReport>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    check_samples(samples)?;
    let est = mc::mean_over_cube(d, samples, seed, nearest_sq);
    Ok(QuantizationReport {
        design: label.to_string(),
        d,
        n,
        delta,
        theta: est.mean,
        qd: qd_normalize(d, n, est.mean),
        method: QuantMethod::MonteCarlo,
        stderr: est.stderr,
        samples,
        seed,
    })
}

/// Monte Carlo estimate of `theta` for an explicit design.
pub fn mc_quantization(design: &Design, samples: u64, seed: u64) -> Result<QuantizationReport> {
    mc_quantization_fn(
        design.kind.label(),
        design.d,
        design.n as u64,
        design.delta,
        samples,
        seed,
        |x| design.nearest_sq_distance(x).expect("dimension fixed"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs;

    #[test]
    fn theta_closed_form_values() {
        assert!((theta_dn_delta(2, 0.5) - 0.5).abs() < 1e-15);
        for d in 1..30 {
            assert!((theta_dn_delta(d, 0.0) - d as f64 / 3.0).abs() < 1e-13);
        }
        // exact rational value at the optimal delta: 1676/1815
        let t = theta_dn_delta(10, optimal_delta(10));
        assert!((t - 1676.0 / 1815.0).abs() < 1e-14);
    }

    #[test]
    fn theta_at_optimal_delta_matches_mc() {
        let d = 10;
        let delta = optimal_delta(d);
        let des = designs::build_dn_delta(d, delta).unwrap();
        let rep = mc_quantization(&des, 1_000_000, 14).unwrap();
        assert!(
            (rep.theta - theta_dn_delta(d, delta)).abs() < 3.0 * rep.stderr,
            "{rep:?}"
        );
    }

    #[test]
    fn qd_closed_form_values() {
        assert!((qd_dn_delta(2, 0.5) - 0.125).abs() < 1e-15);
        // table values at the optimal delta
        assert!((qd_dn_delta(10, optimal_delta(10)) - 0.0804).abs() < 5e-5);
        assert!((qd_dn_delta(15, optimal_delta(15)) - 0.0798).abs() < 5e-5);
        assert!((qd_optimal(5) - 0.0876).abs() < 5e-5);
        assert!((qd_optimal(7) - 0.0827).abs() < 5e-5);
    }

    #[test]
    fn qd_routes_agree() {
        for d in 1..=20 {
            for &delta in &[0.0, 0.3, 0.5, 0.7, 1.0] {
                let via_eq11 = qd_normalize(d, 1u64 << (d - 1), theta_dn_delta(d, delta));
                let direct = qd_dn_delta(d, delta);
                assert!(
                    ((via_eq11 - direct) / direct.max(1e-30)).abs() < 1e-14,
                    "d={d} delta={delta}"
                );
            }
        }
    }

    #[test]
    fn optimal_delta_values() {
        assert!((optimal_delta(10) - 0.4909090909090909).abs() < 1e-15);
        assert_eq!(optimal_delta(1), 0.0);
        assert!((optimal_delta(20) - (0.5 - 1.0 / 420.0)).abs() < 1e-15);
    }

    #[test]
    fn optimal_delta_matches_grid_search() {
        // oracle: grid search of qd_dn_delta over [0,1] step 1e-4
        let d = 20;
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=10_000 {
            let delta = i as f64 * 1e-4;
            let q = qd_dn_delta(d, delta);
            if q < best.0 {
                best = (q, delta);
            }
        }
        assert!((best.1 - optimal_delta(d)).abs() <= 1e-4);
    }

    #[test]
    fn qd_optimal_minimum_at_d15() {
        assert!(qd_optimal(15) < qd_optimal(14));
        assert!(qd_optimal(15) < qd_optimal(16));
    }

    #[test]
    fn qd_crossover_and_tail() {
        for d in 3..=6 {
            assert!(qd_optimal(d) > 1.0 / 12.0, "d={d}");
        }
        for d in 7..=50 {
            assert!(qd_optimal(d) < 1.0 / 12.0, "d={d}");
        }
        for d in 15..100 {
            assert!(qd_optimal(d) < qd_optimal(d + 1));
            assert!(qd_optimal(d + 1) < 1.0 / 12.0);
        }
    }

    #[test]
    fn qd_normalize_sanity() {
        assert!((qd_normalize(2, 2, 0.5) - 0.125).abs() < 1e-15);
        for d in [1usize, 3, 8, 12] {
            let q = qd_normalize(d, 1u64 << d, d as f64 / 3.0);
            assert!((q - 1.0 / 3.0).abs() < 1e-13);
        }
        // the full vertex design value
        assert!((qd_normalize(10, 1024, 10.0 / 12.0) - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn mc_matches_closed_form() {
        let des = designs::build_dn_delta(3, 0.5).unwrap();
        let rep = mc_quantization(&des, 1_000_000, 11).unwrap();
        assert!((rep.theta - 0.5).abs() < 3.0 * rep.stderr, "{rep:?}");
        assert!((rep.qd - qd_normalize(3, 4, rep.theta)).abs() < 1e-15);
    }

    #[test]
    fn mc_dn0_matches_lattice_value() {
        // theta(Dn0) = d/12: per-coordinate integral of (x - 1/2)^2 on [0,1]
        let des = designs::build_dn0(4).unwrap();
        let rep = mc_quantization(&des, 1_000_000, 12).unwrap();
        assert!((rep.theta - 4.0 / 12.0).abs() < 3.0 * rep.stderr, "{rep:?}");
    }

    #[test]
    fn mc_single_point_design() {
        // one-point design {0} in d=2: E||X||^2 = 2/3
        let des = designs::Design::custom(2, vec![0.0, 0.0]).unwrap();
        let rep = mc_quantization(&des, 1_000_000, 13).unwrap();
        assert!((rep.theta - 2.0 / 3.0).abs() < 3.0 * rep.stderr, "{rep:?}");
    }

    #[test]
    fn rejects_tiny_sample_counts() {
        let des = designs::build_dn0(2).unwrap();
        assert!(matches!(
            mc_quantization(&des, 10, 0),
            Err(Error::TooFewSamples { .. })
        ));
    }
}
