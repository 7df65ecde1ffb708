use alloc::vec::Vec;

use super::division_rate::AgeDivisionRate;
use crate::numerics::DEFAULT_TAIL_EPS;

const GRID_POINTS: usize = 4096;

/// Shape of the age-at-division density, read off the sign of
/// `f_B' = (B' - B^2) S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignClass {
    /// `B' < B^2` everywhere: variability lowers the Malthus parameter.
    DecreasingFb,
    /// `B' > B^2` everywhere: variability raises it.
    IncreasingFb,
    Mixed,
}

impl SignClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SignClass::DecreasingFb => "decreasing_fB",
            SignClass::IncreasingFb => "increasing_fB",
            SignClass::Mixed => "mixed",
        }
    }
}

/// Classifies `B' - B^2` on a dense grid of the open support.
///
/// Closed-form rates are sampled on `(lag, A)` where `A` truncates the
/// survival at `1e-13`. Tables are sampled at segment midpoints with the
/// segment slope, plus the constant extrapolation up to `a_max` if any.
pub fn sign_condition(b: &AgeDivisionRate) -> SignClass {
    let samples: Vec<(f64, f64)> = match b {
        AgeDivisionRate::Tabulated(t) => {
            let ages = t.ages();
            let mut out: Vec<(f64, f64)> = ages
                .windows(2)
                .map(|w| {
                    let mid = 0.5 * (w[0] + w[1]);
                    (b.derivative(mid), b.rate(mid))
                })
                .collect();
            if t.a_max() > *ages.last().unwrap() {
                out.push((0.0, *t.rates().last().unwrap()));
            }
            out
        }
        _ => {
            let lo = match b {
                AgeDivisionRate::PowerLag { lag, .. } => *lag,
                _ => 0.0,
            };
            let hi = b.cutoff(DEFAULT_TAIL_EPS).unwrap_or(lo + 1.0);
            (0..GRID_POINTS)
                .map(|i| {
                    let a = lo + (hi - lo) * (i as f64 + 0.5) / GRID_POINTS as f64;
                    (b.derivative(a), b.rate(a))
                })
                .collect()
        }
    };
    let below = samples.iter().all(|&(d, r)| d < r * r);
    let above = samples.iter().all(|&(d, r)| d > r * r);
    match (below, above) {
        (true, _) => SignClass::DecreasingFb,
        (_, true) => SignClass::IncreasingFb,
        _ => SignClass::Mixed,
    }
}
