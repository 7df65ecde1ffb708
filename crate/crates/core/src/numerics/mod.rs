//! Shared numerical kernels.

mod diff;
mod gauss;
mod quadrature;
mod rng;
mod root;
pub mod special;

pub use diff::{richardson_second_difference, second_central_difference};
pub use gauss::GaussLegendre;
pub use quadrature::{integrate, integrate_with_breaks, semi_infinite_cutoff, DEFAULT_TAIL_EPS};
pub use rng::{splitmix64, RngStream, StreamRng};
pub use root::find_root_decreasing;

use crate::{Error, Result};

/// Stopping rule shared by the iterative kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64, max_iter: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || !(rel_tol >= 0.0) || max_iter == 0 {
            return Err(Error::InvalidInput(
                "tolerance needs abs_tol > 0, rel_tol >= 0, max_iter >= 1",
            ));
        }
        Ok(Self { abs_tol, rel_tol, max_iter })
    }

    /// Default for root solves: `1e-10` absolute on the residual.
    pub const fn root() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 0.0, max_iter: 200 }
    }

    /// Default for quadrature: `1e-10` absolute, budget counted in subdivisions.
    pub const fn quadrature() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 0.0, max_iter: 200_000 }
    }

    /// Same budget, absolute tolerance scaled by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        Self { abs_tol: self.abs_tol * factor, ..self }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::root()
    }
}
