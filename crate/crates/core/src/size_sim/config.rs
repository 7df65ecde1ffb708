#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::Rng;

use super::rates::SizeDivisionRate;
use crate::age_model::{AlphaFamily, VariabilitySpec};
use crate::{Error, Result};

/// Default memory cap on the number of recorded cells.
pub const DEFAULT_CELL_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GrowthLaw {
    /// `xi e^{tau (t - b)}`
    Exponential,
    /// `xi + tau (t - b)`
    Linear,
}

impl GrowthLaw {
    /// Size at time `t` of a cell born at `b` with size `xi` and rate `tau`.
    pub fn size_at(self, xi: f64, tau: f64, elapsed: f64) -> f64 {
        match self {
            GrowthLaw::Exponential => xi * (tau * elapsed).exp(),
            GrowthLaw::Linear => xi + tau * elapsed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitRule {
    Symmetric,
    /// Daughters `u s` and `(1 - u) s` with `u` uniform on `[eps, 1 - eps]`.
    UniformAsymmetric { eps: f64 },
}

impl SplitRule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SplitRule::UniformAsymmetric { eps } if !(0.0..0.5).contains(&eps) => {
                Err(Error::InvalidInput("asymmetric split needs 0 <= eps < 1/2"))
            }
            _ => Ok(()),
        }
    }

    /// Daughter sizes; they sum to `s`.
    pub fn split<R: Rng + ?Sized>(&self, s: f64, rng: &mut R) -> (f64, f64) {
        match *self {
            SplitRule::Symmetric => (0.5 * s, 0.5 * s),
            SplitRule::UniformAsymmetric { eps } => {
                let u = eps + (1.0 - 2.0 * eps) * rng.random::<f64>();
                // The larger piece is at least s/2, so s minus it is exact.
                let large = u.max(1.0 - u) * s;
                let small = s - large;
                if u >= 0.5 {
                    (large, small)
                } else {
                    (small, large)
                }
            }
        }
    }
}

/// Law of a daughter's growth rate given her mother's.
#[derive(Debug, Clone, PartialEq)]
pub enum HeredityKernel {
    /// Fresh draw from `law`, independent of the mother.
    Memoryless(VariabilitySpec),
    /// `theta * mother + (1 - theta) * fresh`, clipped to the support of `law`.
    AutoRegressive { law: VariabilitySpec, theta: f64 },
}

impl HeredityKernel {
    pub fn memoryless(family: &AlphaFamily) -> Self {
        HeredityKernel::Memoryless(family.law())
    }

    pub fn law(&self) -> &VariabilitySpec {
        match self {
            HeredityKernel::Memoryless(law) | HeredityKernel::AutoRegressive { law, .. } => law,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.law().validate()?;
        if let HeredityKernel::AutoRegressive { theta, .. } = self {
            if !(0.0..=1.0).contains(theta) {
                return Err(Error::InvalidInput("mixing theta must lie in [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Draws a growth rate from `kernel`; `parent` is `None` for a root drawn
/// from the kernel.
pub fn sample_growth_rate<R: Rng + ?Sized>(
    kernel: &HeredityKernel,
    parent: Option<f64>,
    rng: &mut R,
) -> Result<f64> {
    match kernel {
        HeredityKernel::Memoryless(law) => law.sample(rng),
        HeredityKernel::AutoRegressive { law, theta } => {
            let fresh = law.sample(rng)?;
            Ok(match parent {
                Some(p) => {
                    let (lo, hi) = law.support();
                    (theta * p + (1.0 - theta) * fresh).clamp(lo, hi)
                }
                None => fresh,
            })
        }
    }
}

/// Growth rate of the initial cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootRate {
    Fixed(f64),
    DrawnFromKernel,
}

/// One size-model experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub division: SizeDivisionRate,
    pub growth: GrowthLaw,
    pub split: SplitRule,
    pub kernel: HeredityKernel,
    pub horizon: f64,
    pub x_root: f64,
    pub root_rate: RootRate,
    pub cell_cap: usize,
}

impl SimConfig {
    /// Exponential growth, symmetric division, root of size 2 with rate 1.
    pub fn new(division: SizeDivisionRate, kernel: HeredityKernel, horizon: f64) -> Self {
        Self {
            division,
            growth: GrowthLaw::Exponential,
            split: SplitRule::Symmetric,
            kernel,
            horizon,
            x_root: 2.0,
            root_rate: RootRate::Fixed(1.0),
            cell_cap: DEFAULT_CELL_CAP,
        }
    }

    pub fn with_growth(mut self, growth: GrowthLaw) -> Self {
        self.growth = growth;
        self
    }

    pub fn with_split(mut self, split: SplitRule) -> Self {
        self.split = split;
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_root(mut self, x_root: f64, root_rate: RootRate) -> Self {
        self.x_root = x_root;
        self.root_rate = root_rate;
        self
    }

    pub fn with_cell_cap(mut self, cap: usize) -> Self {
        self.cell_cap = cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::InvalidInput("horizon must be positive"));
        }
        if !(self.x_root > 0.0) || !self.x_root.is_finite() {
            return Err(Error::InvalidInput("root size must be positive"));
        }
        if let RootRate::Fixed(v) = self.root_rate {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput("root rate must be positive"));
            }
        }
        if self.cell_cap == 0 {
            return Err(Error::InvalidInput("cell cap must be positive"));
        }
        self.split.validate()?;
        self.kernel.validate()
    }
}
