//! Standard normal density and distribution function.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}
