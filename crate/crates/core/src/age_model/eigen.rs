#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use alloc::vec::Vec;

use super::division_rate::{AgeDivisionRate, DivisionAgeLaw};
use super::malthus::{inner_tolerance, laplace_moment, malthus_with_variability};
use super::variability::VariabilitySpec;
use crate::numerics::{integrate_with_breaks, Tolerance};
use crate::{Error, Result};

/// Closed-form direct and adjoint eigenfunctions for aging speed `v` and
/// division rate `v B(a)`:
///
/// `N(a, v) = kappa rho(v) / v exp(-lambda a / v) S(a)`
///
/// `phi(a, v) = kappa' int_a^inf B(s) exp(-lambda (s - a) / v) S(s) / S(a) ds`
#[derive(Debug, Clone)]
pub struct EigenFunctions<'a> {
    law: DivisionAgeLaw<'a>,
    rho: VariabilitySpec,
    lambda: f64,
    kappa: f64,
    kappa_prime: f64,
}

impl<'a> EigenFunctions<'a> {
    pub fn new(b: &'a AgeDivisionRate, rho: &VariabilitySpec, tol: &Tolerance) -> Result<Self> {
        rho.validate()?;
        if !rho.is_density() {
            return Err(Error::DensityRequired);
        }
        let lambda = malthus_with_variability(b, rho, tol)?;
        let law = b.law(&inner_tolerance(tol))?;
        let (mut mass, mut moment) = (0.0, 0.0);
        for (v, w) in rho.quadrature() {
            let s = lambda / v;
            let surv = law.integrate_survival(|a| (-s * a).exp())?;
            mass += w * surv / v;
            moment += w * laplace_moment(&law, s, 1)? / v;
        }
        let kappa = 1.0 / mass;
        let kappa_prime = 1.0 / (kappa * moment);
        Ok(Self { law, rho: rho.clone(), lambda, kappa, kappa_prime })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn kappa_prime(&self) -> f64 {
        self.kappa_prime
    }

    pub fn rho(&self) -> &VariabilitySpec {
        &self.rho
    }

    pub fn n(&self, a: f64, v: f64) -> f64 {
        let rho = self.rho.density(v).unwrap_or(0.0);
        if rho == 0.0 || v <= 0.0 {
            return 0.0;
        }
        self.kappa * rho / v * (-self.lambda * a / v).exp() * self.law.rate().survival(a)
    }

    pub fn phi(&self, a: f64, v: f64) -> Result<f64> {
        let rate = self.law.rate();
        let s = self.lambda / v;
        let base = rate.cumulative(a);
        let upper = self.law.upper().max(a);
        let mut total = 0.0;
        if upper > a {
            let breaks: Vec<f64> = self.law.breaks().iter().copied().filter(|&x| x > a && x < upper).collect();
            total = integrate_with_breaks(
                |x| {
                    let r = rate.rate(x);
                    if r == 0.0 || rate.survival(x) == 0.0 {
                        0.0
                    } else {
                        r * (-s * (x - a) - (rate.cumulative(x) - base)).exp()
                    }
                },
                a,
                upper,
                &breaks,
                self.law.tolerance(),
            )?;
        }
        if let Some((a_max, _)) = rate.terminal_atom() {
            if a <= a_max {
                total += (-s * (a_max - a) - (rate.cumulative(a_max) - base)).exp();
            }
        }
        Ok(self.kappa_prime * total)
    }
}

/// Malthus parameter with direct and adjoint eigenvectors sampled on a grid.
///
/// `n` and `phi` are row-major with one row per age node.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda: f64,
    pub a_nodes: Vec<f64>,
    pub v_nodes: Vec<f64>,
    pub n: Vec<f64>,
    pub phi: Vec<f64>,
    pub kappa: f64,
    pub kappa_prime: f64,
}

impl EigenPair {
    pub fn n_at(&self, i: usize, j: usize) -> f64 {
        self.n[i * self.v_nodes.len() + j]
    }

    pub fn phi_at(&self, i: usize, j: usize) -> f64 {
        self.phi[i * self.v_nodes.len() + j]
    }
}

pub fn eigen_pair(
    b: &AgeDivisionRate,
    rho: &VariabilitySpec,
    a_nodes: &[f64],
    v_nodes: &[f64],
    tol: &Tolerance,
) -> Result<EigenPair> {
    let f = EigenFunctions::new(b, rho, tol)?;
    let mut n = Vec::with_capacity(a_nodes.len() * v_nodes.len());
    let mut phi = Vec::with_capacity(n.capacity());
    for &a in a_nodes {
        for &v in v_nodes {
            n.push(f.n(a, v));
            phi.push(f.phi(a, v)?);
        }
    }
    Ok(EigenPair {
        lambda: f.lambda,
        a_nodes: a_nodes.to_vec(),
        v_nodes: v_nodes.to_vec(),
        n,
        phi,
        kappa: f.kappa,
        kappa_prime: f.kappa_prime,
    })
}
