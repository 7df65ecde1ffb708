//! Age-structured model with variability in the aging rate.
//!
//! Cells age at an individual rate `v` drawn at birth from a law `rho`, and
//! divide at rate `v B(a)` per unit of time (`B` is a hazard per unit of
//! physiological age). Without heredity the Malthus parameter `lambda` is the
//! unique positive root of
//!
//! ```text
//! H(lambda) = 2 E_rho[ int_0^inf exp(-lambda a / v) f_B(a) da ] = 1,
//! f_B(a) = B(a) exp(-int_0^a B).
//! ```
//!
//! This module evaluates that relation (and its general form with arbitrary
//! hazard and aging speed), the explicit direct/adjoint eigenvectors, the sign
//! classification of `B' - B^2`, and the derivatives of `lambda` along the
//! contraction family `rho_alpha`.

mod curve;
mod division_rate;
mod eigen;
mod malthus;
mod perturbation;
mod sign;
mod variability;

pub use curve::{cv_curve, CurveRow};
pub use division_rate::{AgeDivisionRate, DivisionAgeLaw, TabulatedRate};
pub use eigen::{eigen_pair, EigenFunctions, EigenPair};
pub use malthus::{
    malthus_general, malthus_reference, malthus_with_variability, BalanceFunction, GeneralBalance,
};
pub use perturbation::{d2lambda_at_zero, dlambda_dalpha};
pub use sign::{sign_condition, SignClass};
pub use variability::{AlphaFamily, VariabilitySpec, V_QUADRATURE_NODES};
