use super::division_rate::AgeDivisionRate;
use super::malthus::{inner_tolerance, laplace_moment, malthus_reference, malthus_with_variability};
use super::variability::{AlphaFamily, VariabilitySpec};
use crate::numerics::Tolerance;
use crate::Result;

/// `d lambda_{B, rho_alpha} / d alpha` at `fam.alpha()`, by implicit
/// differentiation of the balance relation.
pub fn dlambda_dalpha(b: &AgeDivisionRate, fam: &AlphaFamily, tol: &Tolerance) -> Result<f64> {
    let alpha = fam.alpha();
    let baseline = fam.baseline();
    let v_bar = baseline.mean();
    let lambda = malthus_with_variability(b, &fam.law(), tol)?;
    let law = b.law(&inner_tolerance(tol))?;
    let (mut d1, mut d2) = (0.0, 0.0);
    for (v, w) in baseline.quadrature() {
        let u = alpha * (v - v_bar) + v_bar;
        let m1 = laplace_moment(&law, lambda / u, 1)?;
        d1 += w * m1 / u;
        d2 += w * lambda * (v - v_bar) * m1 / (u * u);
    }
    Ok(d2 / d1)
}

/// Second derivative of `alpha -> lambda_{B, rho_alpha}` at `alpha = 0`.
///
/// Only the mean `v_bar` and variance `sigma^2` of the baseline enter:
///
/// `sigma^2 (lambda / v_bar^2) (lambda/v_bar M2 - 2 M1) / M1`,
/// with `Mk = int a^k exp(-lambda a / v_bar) f_B(a) da` and
/// `lambda = lambda_{B, v_bar}`.
pub fn d2lambda_at_zero(b: &AgeDivisionRate, baseline: &VariabilitySpec, tol: &Tolerance) -> Result<f64> {
    baseline.validate()?;
    let sigma2 = baseline.variance();
    if sigma2 == 0.0 {
        return Ok(0.0);
    }
    let v_bar = baseline.mean();
    let lambda = malthus_reference(b, v_bar, tol)?;
    let law = b.law(&inner_tolerance(tol))?;
    let s = lambda / v_bar;
    let m1 = laplace_moment(&law, s, 1)?;
    let m2 = laplace_moment(&law, s, 2)?;
    Ok(sigma2 * (lambda / (v_bar * v_bar)) * (s * m2 - 2.0 * m1) / m1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::richardson_second_difference;
    use crate::Error;

    fn tol() -> Tolerance {
        Tolerance::root()
    }

    fn lambda_at(b: &AgeDivisionRate, base: &VariabilitySpec, alpha: f64) -> f64 {
        malthus_with_variability(b, &base.contract(alpha).unwrap(), &tol()).unwrap()
    }

    #[test]
    fn first_derivative_matches_central_difference() {
        let configs = [
            (AgeDivisionRate::Constant { b: 1.0 }, VariabilitySpec::two_point(0.5, 1.5), 0.5),
            (
                AgeDivisionRate::PowerLag { beta: 2.0, lag: 1.0 },
                VariabilitySpec::TruncatedGaussian { v_min: 0.0, v_max: 2.0, sigma_eta: 0.7 },
                0.6,
            ),
            (
                AgeDivisionRate::PowerLag { beta: 1.0, lag: 1.0 },
                VariabilitySpec::Uniform { v_min: 0.5, v_max: 1.5 },
                0.3,
            ),
        ];
        for (b, base, alpha) in configs {
            let fam = AlphaFamily::new(base.clone(), alpha).unwrap();
            let d = dlambda_dalpha(&b, &fam, &tol()).unwrap();
            let h = 1e-3;
            let fd = (lambda_at(&b, &base, alpha + h) - lambda_at(&b, &base, alpha - h)) / (2.0 * h);
            assert!((d - fd).abs() < 1e-5, "{b:?}: {d} vs {fd}");
        }
    }

    #[test]
    fn first_derivative_vanishes_at_zero() {
        let b = AgeDivisionRate::PowerLag { beta: 2.0, lag: 1.0 };
        let base = VariabilitySpec::TruncatedGaussian { v_min: 0.0, v_max: 2.0, sigma_eta: 0.7 };
        let fam = AlphaFamily::new(base, 1e-6).unwrap();
        assert!(dlambda_dalpha(&b, &fam, &tol()).unwrap().abs() < 1e-6);
    }

    #[test]
    fn dirac_baseline_rejected() {
        assert_eq!(
            AlphaFamily::new(VariabilitySpec::Dirac { v_bar: 1.0 }, 0.5).unwrap_err(),
            Error::DegenerateBaseline
        );
    }

    #[test]
    fn second_derivative_constant_rate_closed_form() {
        let b = AgeDivisionRate::Constant { b: 1.0 };
        let d2 = d2lambda_at_zero(&b, &VariabilitySpec::two_point(0.5, 1.5), &tol()).unwrap();
        assert!((d2 + 0.25).abs() < 1e-8, "{d2}");
        // Off unit mean: -sigma^2 b / v_bar.
        let b = AgeDivisionRate::Constant { b: 2.0 };
        let d2 = d2lambda_at_zero(&b, &VariabilitySpec::two_point(1.0, 3.0), &tol()).unwrap();
        assert!((d2 + 1.0 * 2.0 / 2.0).abs() < 1e-8, "{d2}");
    }

    #[test]
    fn second_derivative_matches_richardson_for_constant_rate() {
        let b = AgeDivisionRate::Constant { b: 1.0 };
        let base = VariabilitySpec::two_point(0.5, 1.5);
        for h in [0.02, 0.01] {
            let fd = richardson_second_difference(|a| lambda_at(&b, &base, a.abs()), 0.0, h);
            assert!((fd + 0.25).abs() < 1e-4, "h={h}: {fd}");
        }
    }

    #[test]
    fn second_derivative_power_lag_matches_richardson() {
        let b = AgeDivisionRate::PowerLag { beta: 2.0, lag: 1.0 };
        let base = VariabilitySpec::TruncatedGaussian { v_min: 0.0, v_max: 2.0, sigma_eta: 0.7 };
        let d2 = d2lambda_at_zero(&b, &base, &tol()).unwrap();
        let fd = richardson_second_difference(|a| lambda_at(&b, &base, a.abs()), 0.0, 0.02);
        assert!(((fd - d2) / d2).abs() < 1e-3, "{fd} vs {d2}");
    }

    #[test]
    fn zero_variance_gives_zero() {
        let b = AgeDivisionRate::PowerLag { beta: 2.0, lag: 1.0 };
        let d2 = d2lambda_at_zero(&b, &VariabilitySpec::Dirac { v_bar: 1.0 }, &tol()).unwrap();
        assert_eq!(d2, 0.0);
    }
}
