//! Malthus parameter (population fitness) of structured cell populations
//! with individual variability in aging or growth rates.
//!
//! The crate has two halves:
//!
//! * [`age_model`]: the age-structured model, where the Malthus parameter is
//!   the root of an explicit integral relation and its response to variability
//!   can be computed analytically (sign results, perturbation derivatives).
//! * [`size_sim`] and [`estimator`]: the size-structured model, where the
//!   Malthus parameter is estimated by simulating continuous-time division
//!   trees and aggregating per-tree estimates over Monte Carlo replicates.
//!
//! [`numerics`] holds the shared kernels (quadrature, root finding, finite
//! differences, counter-based random streams).
//!
//! The crate is `no_std` and only needs `alloc`; IO, the command line and
//! thread pools live in the companion `malthus` crate.

#![no_std]
#![deny(rust_2018_idioms)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod age_model;
pub mod error;
pub mod estimator;
pub mod numerics;
pub mod size_sim;

pub use error::{Error, Result};
