use alloc::vec::Vec;

use super::division_rate::AgeDivisionRate;
use super::malthus::{malthus_reference, malthus_with_variability};
use super::variability::AlphaFamily;
use super::variability::VariabilitySpec;
use crate::numerics::Tolerance;
use crate::{Error, Result};

/// One point of the `CV -> lambda` curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub alpha: f64,
    pub cv: f64,
    pub lambda: Result<f64>,
}

/// Malthus parameter along the contraction family of `baseline`, sorted by
/// CV, with a `CV = 0` anchor row at the reference value. A failed solve is
/// kept in its row.
pub fn cv_curve(
    b: &AgeDivisionRate,
    baseline: &VariabilitySpec,
    alphas: &[f64],
    tol: &Tolerance,
) -> Result<Vec<CurveRow>> {
    b.validate()?;
    let families = alphas
        .iter()
        .map(|&alpha| AlphaFamily::new(baseline.clone(), alpha))
        .collect::<Result<Vec<_>>>()?;
    if families.is_empty() && baseline.is_degenerate() {
        return Err(Error::DegenerateBaseline);
    }
    let mut rows = Vec::with_capacity(families.len() + 1);
    rows.push(CurveRow { alpha: 0.0, cv: 0.0, lambda: malthus_reference(b, baseline.mean(), tol) });
    for fam in &families {
        rows.push(CurveRow {
            alpha: fam.alpha(),
            cv: fam.cv(),
            lambda: malthus_with_variability(b, &fam.law(), tol),
        });
    }
    rows.sort_by(|x, y| x.cv.total_cmp(&y.cv));
    Ok(rows)
}
