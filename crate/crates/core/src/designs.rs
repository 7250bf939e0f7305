//! Construction of the vertex designs and their nearest-point geometry.
//!
//! Two design families are built explicitly: the `2^(d-1)` even-parity sign
//! vertices of `[-delta,delta]^d` (first point `(delta,...,delta)`), and all
//! `2^d` vertices of `[-1/2,1/2]^d`. Both admit a closed-form nearest-vertex
//! rule, so Monte Carlo estimators never need a linear scan over the point
//! list; the scan is kept as an independent check.

use crate::error::{Error, Result};

/// Explicit point lists are only built up to this dimension; past it the
/// `2^(d-1)` enumeration blows up and only the closed-form rules apply.
pub const ENUMERATION_CAP: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignKind {
    /// Even-parity sign vertices of `[-delta,delta]^d`, `n = 2^(d-1)`.
    DnDelta,
    /// All vertices of `[-1/2,1/2]^d`, `n = 2^d`.
    Dn0,
    /// Sobol low-discrepancy points scaled to `[-1,1]^d`.
    Sobol,
    Custom,
}

impl DesignKind {
    pub fn label(self) -> &'static str {
        match self {
            DesignKind::DnDelta => "dn-delta",
            DesignKind::Dn0 => "dn0",
            DesignKind::Sobol => "sobol",
            DesignKind::Custom => "custom",
        }
    }
}

/// An explicit finite point set in `[-1,1]^d`.
#[derive(Debug, Clone)]
pub struct Design {
    pub kind: DesignKind,
    pub d: usize,
    pub n: usize,
    /// Only present for `DnDelta`.
    pub delta: Option<f64>,
    points: Vec<f64>, // row-major, n * d
}

impl Design {
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.d)
    }

    /// Builds a custom design from explicit points, validating the cube bound.
    pub fn custom(d: usize, points: Vec<f64>) -> Result<Design> {
        let n = points.len() / d.max(1);
        Design::with_kind(DesignKind::Custom, d, n, None, points)
    }

    /// Builds a design of a stated kind from explicit points, validating the
    /// cube bound.
    pub fn with_kind(
        kind: DesignKind,
        d: usize,
        n: usize,
        delta: Option<f64>,
        points: Vec<f64>,
    ) -> Result<Design> {
        assert!(d > 0 && points.len() == n * d && n > 0);
        for (i, &v) in points.iter().enumerate() {
            if !(-1.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::OutsideCube {
                    d,
                    index: i % d,
                    value: v,
                });
            }
        }
        Ok(Design {
            kind,
            d,
            n,
            delta,
            points,
        })
    }

    /// Squared distance from `x` to the nearest design point.
    ///
    /// For the vertex families this uses the closed-form nearest-vertex rule;
    /// the result is bit-identical to a linear scan over the point list.
    pub fn nearest_sq_distance(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch {
                got: x.len(),
                expected: self.d,
            });
        }
        Ok(match self.kind {
            DesignKind::DnDelta => dn_delta_nearest_sq(x, self.delta.unwrap()),
            DesignKind::Dn0 => dn0_nearest_sq(x),
            DesignKind::Sobol | DesignKind::Custom => self.nearest_sq_scan(x),
        })
    }

    /// Linear-scan nearest squared distance; the independent reference path.
    pub fn nearest_sq_scan(&self, x: &[f64]) -> f64 {
        self.iter_points()
            .map(|p| {
                let mut s = 0.0;
                for (xi, pi) in x.iter().zip(p) {
                    let t = xi - pi;
                    s += t * t;
                }
                s
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Serializes the point list as CSV: header `x1,...,xd`, one point per
    /// row, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for j in 1..=self.d {
            if j > 1 {
                out.push(',');
            }
            out.push_str(&format!("x{j}"));
        }
        out.push('\n');
        for p in self.iter_points() {
            for (j, v) in p.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{v:.16e}"));
            }
            out.push('\n');
        }
        out
    }

    /// Parses a design from the CSV format produced by [`Design::to_csv`].
    pub fn from_csv(text: &str) -> Result<Design> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::DesignCsv("empty file".into()))?;
        let d = header.split(',').count();
        let mut points = Vec::new();
        for (ln, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::DesignCsv(format!("row {}: {e}", ln + 2)))?;
            if row.len() != d {
                return Err(Error::DesignCsv(format!(
                    "row {}: expected {d} fields, got {}",
                    ln + 2,
                    row.len()
                )));
            }
            points.extend(row);
        }
        if points.is_empty() {
            return Err(Error::DesignCsv("no points".into()));
        }
        Design::custom(d, points)
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&delta) || !delta.is_finite() {
        return Err(Error::DeltaOutOfRange(delta));
    }
    Ok(())
}

fn check_enum_cap(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::DimensionTooSmall { got: d, min: 1 });
    }
    if d > ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            d,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(())
}

/// The `2^(d-1)` vertices of `[-delta,delta]^d` with an even number of
/// negative coordinates. The first listed point is `(delta,...,delta)`.
pub fn build_dn_delta(d: usize, delta: f64) -> Result<Design> {
    check_enum_cap(d)?;
    check_delta(delta)?;
    let n = 1usize << (d - 1);
    let mut points = Vec::with_capacity(n * d);
    for mask in 0u64..(1u64 << d) {
        if mask.count_ones() % 2 != 0 {
            continue;
        }
        for j in 0..d {
            points.push(if mask >> j & 1 == 1 { -delta } else { delta });
        }
    }
    Ok(Design {
        kind: DesignKind::DnDelta,
        d,
        n,
        delta: Some(delta),
        points,
    })
}

/// All `2^d` vertices `(+-1/2, ..., +-1/2)`.
pub fn build_dn0(d: usize) -> Result<Design> {
    check_enum_cap(d)?;
    let n = 1usize << d;
    let mut points = Vec::with_capacity(n * d);
    for mask in 0u64..(1u64 << d) {
        for j in 0..d {
            points.push(if mask >> j & 1 == 1 { -0.5 } else { 0.5 });
        }
    }
    Ok(Design {
        kind: DesignKind::Dn0,
        d,
        n,
        delta: None,
        points,
    })
}

/// Closed-form nearest squared distance to the even-parity vertex design.
///
/// The nearest vertex sign-matches `x` coordinatewise; if that pattern has
/// odd parity, flipping the sign at the coordinate of smallest magnitude is
/// the cheapest repair (extra cost `4*delta*|x_j|`). Coordinates equal to
/// zero count as positive. The sum runs in coordinate order so it is
/// bit-identical to the linear scan's accumulation for the same vertex.
pub fn dn_delta_nearest_sq(x: &[f64], delta: f64) -> f64 {
    let mut negatives = 0usize;
    let mut flip = 0usize;
    let mut flip_abs = f64::INFINITY;
    for (i, &xi) in x.iter().enumerate() {
        if xi < 0.0 {
            negatives += 1;
        }
        let a = xi.abs();
        if a < flip_abs {
            flip_abs = a;
            flip = i;
        }
    }
    let odd = negatives % 2 == 1;
    let mut sum = 0.0;
    for (i, &xi) in x.iter().enumerate() {
        let mut z = if xi < 0.0 { -delta } else { delta };
        if odd && i == flip {
            z = -z;
        }
        let t = xi - z;
        sum += t * t;
    }
    sum
}

/// Closed-form nearest squared distance to the full vertex design on
/// `[-1/2,1/2]^d`: the nearest vertex simply sign-matches `x`.
pub fn dn0_nearest_sq(x: &[f64]) -> f64 {
    let mut sum = 0.0;
    for &xi in x {
        let z = if xi < 0.0 { -0.5 } else { 0.5 };
        let t = xi - z;
        sum += t * t;
    }
    sum
}

/// Location of a point relative to the Voronoi cell of `Z_1 = (delta,...,delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VoronoiRegion {
    /// The cube `[0,1]^d`.
    C0,
    /// The slab adjacent to `C0` across the face `x_j = 0`:
    /// `x_j` in `[-1,0]` and `|x_j| <= x_k <= 1` for all `k != j`.
    /// Index is 1-based.
    U(usize),
    OutsideV1,
}

#[derive(Debug, Clone)]
pub struct VoronoiMembership {
    pub region: VoronoiRegion,
    pub point: Vec<f64>,
}

/// Classifies `x` relative to the cell of `Z_1`. The cell geometry does not
/// depend on `delta`. Boundary ties go to the lowest-index qualifying region,
/// `C0` first.
pub fn voronoi_membership(x: &[f64], d: usize) -> Result<VoronoiMembership> {
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            got: x.len(),
            expected: d,
        });
    }
    for (i, &v) in x.iter().enumerate() {
        if !(-1.0..=1.0).contains(&v) {
            return Err(Error::OutsideCube { d, index: i, value: v });
        }
    }
    if x.iter().all(|&v| v >= 0.0) {
        return Ok(VoronoiMembership {
            region: VoronoiRegion::C0,
            point: x.to_vec(),
        });
    }
    'outer: for j in 0..d {
        if !(-1.0..=0.0).contains(&x[j]) {
            continue;
        }
        let a = x[j].abs();
        for (k, &xk) in x.iter().enumerate() {
            if k != j && !(a..=1.0).contains(&xk) {
                continue 'outer;
            }
        }
        return Ok(VoronoiMembership {
            region: VoronoiRegion::U(j + 1),
            point: x.to_vec(),
        });
    }
    Ok(VoronoiMembership {
        region: VoronoiRegion::OutsideV1,
        point: x.to_vec(),
    })
}
