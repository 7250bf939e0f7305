//! Standard normal CDF and density.

use statrs::function::erf::erfc;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal CDF via the complementary error function.
pub fn phi(t: f64) -> f64 {
    0.5 * erfc(-t / SQRT_2)
}

/// Standard normal density.
pub fn pdf(t: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * t * t).exp()
}
