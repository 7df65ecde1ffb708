#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::Rng;

use super::config::GrowthLaw;
use crate::{Error, Result};

const MAX_THINNING_STEPS: u64 = 1_000_000;

/// `B(x) = (x - x0)^beta 1{x >= x0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLagShape {
    pub x0: f64,
    pub beta: f64,
}

impl PowerLagShape {
    pub fn new(x0: f64, beta: f64) -> Result<Self> {
        if !(x0 >= 0.0) || !(beta >= 0.0) || !x0.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidInput("division shape needs x0 >= 0 and beta >= 0"));
        }
        Ok(Self { x0, beta })
    }

    pub fn rate(&self, x: f64) -> f64 {
        if x >= self.x0 {
            (x - self.x0).powf(self.beta)
        } else {
            0.0
        }
    }

    /// `int_0^x B`.
    pub fn cumulative(&self, x: f64) -> f64 {
        if x > self.x0 {
            (x - self.x0).powf(self.beta + 1.0) / (self.beta + 1.0)
        } else {
            0.0
        }
    }

    /// Smallest `x` with `cumulative(x) = level`.
    pub fn inverse_cumulative(&self, level: f64) -> f64 {
        let k = self.beta + 1.0;
        self.x0 + (k * level).powf(1.0 / k)
    }
}

/// Whether `B` is a hazard per unit of size or per unit of time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DivisionMode {
    /// Per unit of size: `gamma = g(x, v) B(x)`, so the division size does not
    /// depend on the growth rate.
    UnitSize,
    /// Per unit of time: `gamma = B(x)`.
    UnitTime,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeDivisionRate {
    pub mode: DivisionMode,
    pub shape: PowerLagShape,
}

impl SizeDivisionRate {
    pub fn unit_size(x0: f64, beta: f64) -> Result<Self> {
        Ok(Self { mode: DivisionMode::UnitSize, shape: PowerLagShape::new(x0, beta)? })
    }

    pub fn unit_time(x0: f64, beta: f64) -> Result<Self> {
        Ok(Self { mode: DivisionMode::UnitTime, shape: PowerLagShape::new(x0, beta)? })
    }

    /// Division size of a cell born at `x_b` growing at rate `v`.
    pub fn sample_division_size<R: Rng + ?Sized>(
        &self,
        growth: GrowthLaw,
        x_b: f64,
        v: f64,
        rng: &mut R,
    ) -> Result<f64> {
        match (self.mode, growth) {
            (DivisionMode::UnitSize, _) => loop {
                let u: f64 = rng.random();
                if u > 0.0 {
                    return Ok(sample_division_size(&self.shape, x_b, u));
                }
            },
            (DivisionMode::UnitTime, GrowthLaw::Linear) => loop {
                // Hazard per unit size is B / v.
                let e = exp1(rng) * v;
                if e > 0.0 {
                    return Ok(self.shape.inverse_cumulative(self.shape.cumulative(x_b) + e));
                }
            },
            (DivisionMode::UnitTime, GrowthLaw::Exponential) => {
                sample_division_size_unit_time(&self.shape, x_b, v, rng)
            }
        }
    }
}

fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    -(-u).ln_1p()
}

/// Inverse-CDF draw of the division size for a hazard `B` per unit size:
/// survival `exp(-int_{x_b}^s B)`, with `E = -ln(1 - u)`.
pub fn sample_division_size(shape: &PowerLagShape, x_b: f64, u: f64) -> f64 {
    let e = -(-u).ln_1p();
    if e == 0.0 {
        return x_b;
    }
    shape.inverse_cumulative(shape.cumulative(x_b) + e)
}

/// Division size under a hazard `B(s) / (v s)` per unit size (time hazard
/// `B` with exponential growth), by thinning.
///
/// Candidates come from the dominating hazard `B(s) / (v x_b)`, whose
/// cumulative inverts in closed form; a candidate at `s` is kept with
/// probability `x_b / s`.
pub fn sample_division_size_unit_time<R: Rng + ?Sized>(
    shape: &PowerLagShape,
    x_b: f64,
    v: f64,
    rng: &mut R,
) -> Result<f64> {
    if !(x_b > 0.0) || !(v > 0.0) {
        return Err(Error::InvalidInput("unit-time sampler needs positive size and rate"));
    }
    let mut level = shape.cumulative(x_b);
    for _ in 0..MAX_THINNING_STEPS {
        level += exp1(rng) * v * x_b;
        let s = shape.inverse_cumulative(level);
        let keep: f64 = rng.random();
        if keep * s < x_b && s > x_b {
            return Ok(s);
        }
    }
    Err(Error::RejectionBudget { what: "unit-time division size", attempts: MAX_THINNING_STEPS })
}

/// Size at birth of a daughter of a cell born at `x` growing exponentially
/// at rate `v` and dividing symmetrically under the time hazard `B`.
pub fn sample_daughter_size_unit_time<R: Rng + ?Sized>(
    shape: &PowerLagShape,
    x: f64,
    v: f64,
    rng: &mut R,
) -> Result<f64> {
    Ok(0.5 * sample_division_size_unit_time(shape, x, v, rng)?)
}

/// Time to grow from `birth` to `division` at rate `v`.
pub fn lifetime(growth: GrowthLaw, birth: f64, division: f64, v: f64) -> Result<f64> {
    if division < birth {
        return Err(Error::NonMonotoneGrowth { birth, division });
    }
    if !(v > 0.0) {
        return Err(Error::InvalidInput("growth rate must be positive"));
    }
    Ok(match growth {
        GrowthLaw::Exponential => (division / birth).ln() / v,
        GrowthLaw::Linear => (division - birth) / v,
    })
}
