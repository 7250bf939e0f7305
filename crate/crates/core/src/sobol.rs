//! Sobol low-discrepancy sequences with Joe-Kuo direction numbers, and the
//! comparison design obtained by scaling them onto `[-1,1]^d`.

use std::sync::OnceLock;

use crate::designs::{Design, DesignKind};
use crate::error::{Error, Result};

/// Bits of precision carried by the generator state.
const BITS: u32 = 32;

/// Primitive-polynomial parameters for one Sobol dimension.
#[derive(Debug, Clone)]
struct Direction {
    /// polynomial degree
    s: u32,
    /// interior polynomial coefficients, packed
    a: u32,
    /// initial direction integers `m_1..m_s`, each odd and `m_i < 2^i`
    m: Vec<u32>,
}

/// Direction numbers for dimensions `2..=max_dimension()`; dimension 1 is
/// the van der Corput sequence and needs no parameters.
#[derive(Debug, Clone)]
pub struct DirectionTable {
    rows: Vec<Direction>,
}

impl DirectionTable {
    /// Highest dimension the table supports (first dimension included).
    pub fn max_dimension(&self) -> usize {
        self.rows.len() + 1
    }
}

/// Parses a Joe-Kuo style table: a header line, then one line per
/// dimension of the form `d s a m_1 .. m_s`.
pub fn load_direction_numbers(text: &str) -> Result<DirectionTable> {
    let fail = |line: usize, reason: &str| Error::DirectionTable {
        line,
        reason: reason.to_string(),
    };
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if idx == 0 || raw.trim().is_empty() {
            continue; // header
        }
        let fields: Vec<u64> = raw
            .split_whitespace()
            .map(|f| f.parse::<u64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| fail(line, &format!("non-integer field: {e}")))?;
        if fields.len() < 3 {
            return Err(fail(line, "expected at least d, s and a"));
        }
        let (d, s, a) = (fields[0], fields[1], fields[2]);
        if d as usize != rows.len() + 2 {
            return Err(fail(line, &format!("expected dimension {}, got {d}", rows.len() + 2)));
        }
        if s == 0 || s > 32 {
            return Err(fail(line, &format!("degree {s} out of range")));
        }
        if a >= 1u64 << (s - 1).max(1) {
            return Err(fail(line, &format!("coefficients {a} too large for degree {s}")));
        }
        let m = &fields[3..];
        if m.len() != s as usize {
            return Err(fail(line, &format!("expected {s} direction integers, got {}", m.len())));
        }
        for (i, &mi) in m.iter().enumerate() {
            if mi % 2 == 0 {
                return Err(fail(line, &format!("m_{} = {mi} is even", i + 1)));
            }
            if mi >= 1u64 << (i + 1) {
                return Err(fail(line, &format!("m_{} = {mi} is not below 2^{}", i + 1, i + 1)));
            }
        }
        rows.push(Direction {
            s: s as u32,
            a: a as u32,
            m: m.iter().map(|&v| v as u32).collect(),
        });
    }
    if rows.is_empty() {
        return Err(fail(1, "table has no dimension rows"));
    }
    Ok(DirectionTable { rows })
}

/// The bundled Joe-Kuo table covering dimensions up to 64.
pub fn bundled_direction_table() -> &'static DirectionTable {
    static TABLE: OnceLock<DirectionTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        load_direction_numbers(include_str!("../data/new-joe-kuo-6.64.txt"))
            .expect("bundled direction-number table is valid")
    })
}

/// Direction integers `v_1..v_max_bits` for one coordinate, scaled to
/// `BITS` bits.
fn direction_integers(dir: Option<&Direction>, max_bits: u32) -> Vec<u32> {
    let mut v = vec![0u32; max_bits as usize];
    match dir {
        // first coordinate: van der Corput, v_k = 2^(BITS-k)
        None => {
            for k in 0..max_bits {
                v[k as usize] = 1 << (BITS - 1 - k);
            }
        }
        Some(dir) => {
            let s = dir.s;
            for k in 0..max_bits.min(s) {
                v[k as usize] = dir.m[k as usize] << (BITS - 1 - k);
            }
            for k in s..max_bits {
                let prev = v[(k - s) as usize];
                let mut value = prev ^ (prev >> s);
                for i in 1..s {
                    if (dir.a >> (s - 1 - i)) & 1 == 1 {
                        value ^= v[(k - i) as usize];
                    }
                }
                v[k as usize] = value;
            }
        }
    }
    v
}

/// First `n` Sobol points in `[0,1)^d`, flat row-major, generated in Gray
/// code order with the all-zero point skipped (the first emitted point is
/// `(0.5,...,0.5)`).
pub fn sobol_points(d: usize, n: usize, table: &DirectionTable) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(Error::DimensionTooSmall { got: 0, min: 1 });
    }
    if d > table.max_dimension() {
        return Err(Error::DimensionUnsupported {
            d,
            max_dim: table.max_dimension(),
        });
    }
    let max_bits = (usize::BITS - n.leading_zeros()).max(1).min(BITS);
    let dirs: Vec<Vec<u32>> = (0..d)
        .map(|j| direction_integers(if j == 0 { None } else { Some(&table.rows[j - 1]) }, max_bits))
        .collect();
    let scale = (BITS as f64).exp2().recip();
    let mut state = vec![0u32; d];
    let mut points = Vec::with_capacity(n * d);
    for i in 1..=n as u64 {
        let bit = i.trailing_zeros() as usize;
        for j in 0..d {
            state[j] ^= dirs[j][bit];
            points.push(state[j] as f64 * scale);
        }
    }
    Ok(points)
}

/// Sobol comparison design on `[-1,1]^d`: the first `n` Sobol points mapped
/// by `x -> 2x - 1`.
pub fn sobol_design(d: usize, n: usize, table: &DirectionTable) -> Result<Design> {
    let points = sobol_points(d, n, table)?
        .into_iter()
        .map(|x| 2.0 * x - 1.0)
        .collect();
    Design::with_kind(DesignKind::Sobol, d, n, None, points)
}
