#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use alloc::vec::Vec;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::numerics::special::{normal_cdf, normal_pdf};
use crate::numerics::GaussLegendre;
use crate::{Error, Result};

/// Gauss–Legendre nodes used for integrals over the support of a density.
pub const V_QUADRATURE_NODES: usize = 64;

const MAX_NORMAL_REJECTIONS: u64 = 100_000;

/// Law of the individual aging (or growth) rate.
///
/// `DiscreteMixture` is not a density, but the Malthus relation extends to it
/// verbatim; it is used as an oracle (closed-form roots) and as a quantised
/// approximation of densities. `Uniform` is a convenience density for the
/// eigenvector checks.
#[derive(Debug, Clone, PartialEq)]
pub enum VariabilitySpec {
    Dirac { v_bar: f64 },
    /// Gaussian with mean `(v_min + v_max) / 2` and standard deviation
    /// `sigma_eta`, truncated to `[v_min, v_max]`.
    TruncatedGaussian { v_min: f64, v_max: f64, sigma_eta: f64 },
    Uniform { v_min: f64, v_max: f64 },
    /// Atoms `(v_i, w_i)` with `sum w_i = 1`.
    DiscreteMixture { atoms: Vec<(f64, f64)> },
}

impl VariabilitySpec {
    pub fn two_point(v1: f64, v2: f64) -> Self {
        VariabilitySpec::DiscreteMixture { atoms: alloc::vec![(v1, 0.5), (v2, 0.5)] }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            VariabilitySpec::Dirac { v_bar } => {
                if !(*v_bar > 0.0) || !v_bar.is_finite() {
                    return Err(Error::InvalidInput("Dirac rate must be positive"));
                }
            }
            VariabilitySpec::TruncatedGaussian { v_min, v_max, sigma_eta } => {
                if !(*v_min >= 0.0) || !(v_max > v_min) || !v_max.is_finite() {
                    return Err(Error::InvalidInput("truncation needs 0 <= v_min < v_max < inf"));
                }
                if !(*sigma_eta > 0.0) || !sigma_eta.is_finite() {
                    return Err(Error::InvalidInput("sigma_eta must be positive"));
                }
            }
            VariabilitySpec::Uniform { v_min, v_max } => {
                if !(*v_min >= 0.0) || !(v_max > v_min) || !v_max.is_finite() {
                    return Err(Error::InvalidInput("uniform law needs 0 <= v_min < v_max < inf"));
                }
            }
            VariabilitySpec::DiscreteMixture { atoms } => {
                if atoms.is_empty() {
                    return Err(Error::InvalidInput("mixture needs at least one atom"));
                }
                if atoms.iter().any(|&(v, w)| !(v > 0.0) || !(w > 0.0) || !v.is_finite()) {
                    return Err(Error::InvalidInput("mixture atoms need v > 0 and w > 0"));
                }
                let total: f64 = atoms.iter().map(|a| a.1).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidInput("mixture weights must sum to 1"));
                }
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match self {
            VariabilitySpec::Dirac { v_bar } => *v_bar,
            VariabilitySpec::TruncatedGaussian { v_min, v_max, .. }
            | VariabilitySpec::Uniform { v_min, v_max } => 0.5 * (v_min + v_max),
            VariabilitySpec::DiscreteMixture { atoms } => atoms.iter().map(|&(v, w)| v * w).sum(),
        }
    }

    /// Variance, from the truncated-normal moment formulas for the Gaussian case.
    pub fn variance(&self) -> f64 {
        match self {
            VariabilitySpec::Dirac { .. } => 0.0,
            VariabilitySpec::TruncatedGaussian { v_min, v_max, sigma_eta } => {
                let mu = 0.5 * (v_min + v_max);
                let (a, b) = ((v_min - mu) / sigma_eta, (v_max - mu) / sigma_eta);
                let z = normal_cdf(b) - normal_cdf(a);
                let (pa, pb) = (normal_pdf(a), normal_pdf(b));
                let shift = (pa - pb) / z;
                sigma_eta * sigma_eta * (1.0 + (a * pa - b * pb) / z - shift * shift)
            }
            VariabilitySpec::Uniform { v_min, v_max } => (v_max - v_min).powi(2) / 12.0,
            VariabilitySpec::DiscreteMixture { atoms } => {
                let m = self.mean();
                atoms.iter().map(|&(v, w)| w * (v - m) * (v - m)).sum()
            }
        }
    }

    pub fn sd(&self) -> f64 {
        self.variance().max(0.0).sqrt()
    }

    /// Coefficient of variation `sd / mean`.
    pub fn cv(&self) -> f64 {
        self.sd() / self.mean()
    }

    pub fn is_degenerate(&self) -> bool {
        match self {
            VariabilitySpec::Dirac { .. } => true,
            VariabilitySpec::DiscreteMixture { atoms } => atoms.windows(2).all(|w| w[0].0 == w[1].0),
            _ => false,
        }
    }

    /// Whether the law has a density (eigenvectors need one).
    pub fn is_density(&self) -> bool {
        matches!(
            self,
            VariabilitySpec::TruncatedGaussian { .. } | VariabilitySpec::Uniform { .. }
        )
    }

    /// Closed support `[lo, hi]`.
    pub fn support(&self) -> (f64, f64) {
        match self {
            VariabilitySpec::Dirac { v_bar } => (*v_bar, *v_bar),
            VariabilitySpec::TruncatedGaussian { v_min, v_max, .. }
            | VariabilitySpec::Uniform { v_min, v_max } => (*v_min, *v_max),
            VariabilitySpec::DiscreteMixture { atoms } => atoms.iter().fold(
                (f64::INFINITY, f64::NEG_INFINITY),
                |(lo, hi), &(v, _)| (lo.min(v), hi.max(v)),
            ),
        }
    }

    /// `rho(v)` for density laws, `None` otherwise.
    pub fn density(&self, v: f64) -> Option<f64> {
        match self {
            VariabilitySpec::TruncatedGaussian { v_min, v_max, sigma_eta } => {
                if v < *v_min || v > *v_max {
                    return Some(0.0);
                }
                let mu = 0.5 * (v_min + v_max);
                let z = normal_cdf((v_max - mu) / sigma_eta) - normal_cdf((v_min - mu) / sigma_eta);
                Some(normal_pdf((v - mu) / sigma_eta) / (sigma_eta * z))
            }
            VariabilitySpec::Uniform { v_min, v_max } => {
                Some(if v < *v_min || v > *v_max { 0.0 } else { 1.0 / (v_max - v_min) })
            }
            _ => None,
        }
    }

    /// Nodes and probability weights representing the law: atoms as given,
    /// densities by 64-point Gauss–Legendre on the support with weights
    /// `w_i rho(v_i)` renormalised to sum to one.
    pub fn quadrature(&self) -> Vec<(f64, f64)> {
        match self {
            VariabilitySpec::Dirac { v_bar } => alloc::vec![(*v_bar, 1.0)],
            VariabilitySpec::DiscreteMixture { atoms } => atoms.clone(),
            _ => {
                let (lo, hi) = self.support();
                let rule = GaussLegendre::new(V_QUADRATURE_NODES);
                let mut nodes: Vec<(f64, f64)> = rule
                    .mapped(lo, hi)
                    .map(|(v, w)| (v, w * self.density(v).unwrap_or(0.0)))
                    .collect();
                let total: f64 = nodes.iter().map(|n| n.1).sum();
                for n in &mut nodes {
                    n.1 /= total;
                }
                nodes
            }
        }
    }

    /// Law of `mean + alpha (V - mean)`: the contraction `rho_alpha` of this
    /// law toward its mean. `alpha = 0` yields the Dirac mass at the mean.
    pub fn contract(&self, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidInput("contraction amplitude must lie in [0, 1]"));
        }
        let m = self.mean();
        if alpha == 0.0 {
            return Ok(VariabilitySpec::Dirac { v_bar: m });
        }
        let map = |v: f64| m + alpha * (v - m);
        Ok(match self {
            VariabilitySpec::Dirac { v_bar } => VariabilitySpec::Dirac { v_bar: *v_bar },
            VariabilitySpec::TruncatedGaussian { v_min, v_max, sigma_eta } => {
                VariabilitySpec::TruncatedGaussian {
                    v_min: map(*v_min),
                    v_max: map(*v_max),
                    sigma_eta: alpha * sigma_eta,
                }
            }
            VariabilitySpec::Uniform { v_min, v_max } => {
                VariabilitySpec::Uniform { v_min: map(*v_min), v_max: map(*v_max) }
            }
            VariabilitySpec::DiscreteMixture { atoms } => VariabilitySpec::DiscreteMixture {
                atoms: atoms.iter().map(|&(v, w)| (map(v), w)).collect(),
            },
        })
    }

    /// One draw. Truncated Gaussians are sampled by rejection against the
    /// untruncated normal; non-positive rates are rejected as well.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        match self {
            VariabilitySpec::Dirac { v_bar } => Ok(*v_bar),
            VariabilitySpec::TruncatedGaussian { v_min, v_max, sigma_eta } => {
                let mu = 0.5 * (v_min + v_max);
                for _ in 0..MAX_NORMAL_REJECTIONS {
                    let z: f64 = rng.sample(StandardNormal);
                    let v = mu + sigma_eta * z;
                    if v >= *v_min && v <= *v_max && v > 0.0 {
                        return Ok(v);
                    }
                }
                Err(Error::RejectionBudget { what: "truncated Gaussian", attempts: MAX_NORMAL_REJECTIONS })
            }
            VariabilitySpec::Uniform { v_min, v_max } => {
                for _ in 0..MAX_NORMAL_REJECTIONS {
                    let v = v_min + (v_max - v_min) * rng.random::<f64>();
                    if v > 0.0 {
                        return Ok(v);
                    }
                }
                Err(Error::RejectionBudget { what: "uniform rate", attempts: MAX_NORMAL_REJECTIONS })
            }
            VariabilitySpec::DiscreteMixture { atoms } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for &(v, w) in atoms {
                    acc += w;
                    if u < acc {
                        return Ok(v);
                    }
                }
                Ok(atoms.last().unwrap().0)
            }
        }
    }
}

/// `rho_alpha(v) = rho((v - (1 - alpha) v_bar) / alpha) / alpha`: a baseline
/// law contracted toward its mean with amplitude `alpha` in `(0, 1]`.
///
/// The mean is preserved and the coefficient of variation scales by `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaFamily {
    baseline: VariabilitySpec,
    alpha: f64,
}

impl AlphaFamily {
    pub fn new(baseline: VariabilitySpec, alpha: f64) -> Result<Self> {
        baseline.validate()?;
        if baseline.is_degenerate() {
            return Err(Error::DegenerateBaseline);
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidInput("alpha must lie in (0, 1]"));
        }
        Ok(Self { baseline, alpha })
    }

    pub fn baseline(&self) -> &VariabilitySpec {
        &self.baseline
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.baseline.clone(), alpha)
    }

    /// The contracted law as a plain [`VariabilitySpec`].
    pub fn law(&self) -> VariabilitySpec {
        self.baseline.contract(self.alpha).expect("alpha validated on construction")
    }

    /// `rho_alpha(v)` straight from the defining change of variables.
    pub fn density(&self, v: f64) -> Option<f64> {
        let m = self.baseline.mean();
        self.baseline
            .density((v - (1.0 - self.alpha) * m) / self.alpha)
            .map(|d| d / self.alpha)
    }

    pub fn cv(&self) -> f64 {
        self.alpha * self.baseline.cv()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, RngStream, Tolerance};

    fn paper_baseline() -> VariabilitySpec {
        VariabilitySpec::TruncatedGaussian { v_min: 0.0, v_max: 2.0, sigma_eta: 0.7 }
    }

    #[test]
    fn truncated_gaussian_moments_match_quadrature() {
        let rho = paper_baseline();
        let q = Tolerance::quadrature();
        let d = |v| rho.density(v).unwrap();
        let mass = integrate(d, 0.0, 2.0, &q).unwrap();
        let mean = integrate(|v| v * d(v), 0.0, 2.0, &q).unwrap();
        let var = integrate(|v| (v - 1.0) * (v - 1.0) * d(v), 0.0, 2.0, &q).unwrap();
        assert!((mass - 1.0).abs() < 1e-10);
        assert!((mean - rho.mean()).abs() < 1e-10);
        assert!((var - rho.variance()).abs() < 1e-10);
        // sigma_eta = 0.7 on [0, 2] gives CV close to 50%.
        assert!((rho.cv() - 0.5).abs() < 0.005, "{}", rho.cv());
    }

    #[test]
    fn quadrature_weights_reproduce_moments() {
        for rho in [paper_baseline(), VariabilitySpec::Uniform { v_min: 0.5, v_max: 1.5 }] {
            let nodes = rho.quadrature();
            let mass: f64 = nodes.iter().map(|n| n.1).sum();
            let mean: f64 = nodes.iter().map(|n| n.0 * n.1).sum();
            let var: f64 = nodes.iter().map(|n| (n.0 - rho.mean()).powi(2) * n.1).sum();
            assert!((mass - 1.0).abs() < 1e-14);
            assert!((mean - rho.mean()).abs() < 1e-12);
            assert!((var - rho.variance()).abs() < 1e-12);
        }
    }

    #[test]
    fn contraction_preserves_mean_and_scales_cv() {
        let fam = AlphaFamily::new(paper_baseline(), 0.4).unwrap();
        let law = fam.law();
        assert_eq!(law.support(), (0.6, 1.4));
        assert!((law.mean() - 1.0).abs() < 1e-15);
        assert!((law.cv() - 0.4 * paper_baseline().cv()).abs() < 1e-12);
        let q = Tolerance::quadrature();
        let mean = integrate(|v| v * fam.density(v).unwrap(), 0.6, 1.4, &q).unwrap();
        assert!((mean - 1.0).abs() < 1e-10);
        for v in [0.61, 0.9, 1.0, 1.37] {
            assert!((fam.density(v).unwrap() - law.density(v).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn contraction_to_zero_is_dirac() {
        assert_eq!(paper_baseline().contract(0.0).unwrap(), VariabilitySpec::Dirac { v_bar: 1.0 });
        assert!(paper_baseline().contract(1.5).is_err());
    }

    #[test]
    fn alpha_family_rejects_degenerate_baseline() {
        assert_eq!(
            AlphaFamily::new(VariabilitySpec::Dirac { v_bar: 1.0 }, 0.5),
            Err(Error::DegenerateBaseline)
        );
        assert!(AlphaFamily::new(paper_baseline(), 0.0).is_err());
    }

    #[test]
    fn truncated_gaussian_sampling_moments() {
        let rho = paper_baseline();
        let mut rng = RngStream::new(11, 0).generator();
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| rho.sample(&mut rng).unwrap()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - 1.0).abs() < 0.01);
        assert!((var.sqrt() / mean - 0.50).abs() < 0.01);
        assert!(xs.iter().all(|&x| x > 0.0 && x <= 2.0));
    }

    #[test]
    fn contracted_sampling_stays_in_support() {
        let law = paper_baseline().contract(0.4).unwrap();
        let mut rng = RngStream::new(3, 1).generator();
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| law.sample(&mut rng).unwrap()).collect();
        assert!(xs.iter().all(|&x| (0.6..=1.4).contains(&x)));
        let mean = xs.iter().sum::<f64>() / n as f64;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        assert!((sd / mean - 0.20).abs() < 0.005);
    }

    #[test]
    fn mixture_validation() {
        assert!(VariabilitySpec::two_point(0.5, 1.5).validate().is_ok());
        let bad = VariabilitySpec::DiscreteMixture { atoms: alloc::vec![(1.0, 0.3)] };
        assert!(bad.validate().is_err());
        assert!((VariabilitySpec::two_point(0.5, 1.5).variance() - 0.25).abs() < 1e-15);
    }
}
