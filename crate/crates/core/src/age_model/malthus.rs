#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use alloc::vec::Vec;

use super::division_rate::{AgeDivisionRate, DivisionAgeLaw};
use super::variability::VariabilitySpec;
use crate::numerics::{find_root_decreasing, integrate_with_breaks, GaussLegendre, Tolerance};
use crate::{Error, Result};

/// Exponent at which `exp(-x)` is treated as zero in truncated tails.
const TAIL_EXPONENT: f64 = 40.0;
const GENERAL_MAX_AGE: f64 = 1e7;
const CELL_RULE: usize = 8;

/// Quadrature tolerance for integrals nested inside a root solve: two
/// orders tighter than the residual tolerance.
pub(crate) fn inner_tolerance(tol: &Tolerance) -> Tolerance {
    Tolerance { abs_tol: tol.abs_tol * 1e-2, rel_tol: 0.0, max_iter: Tolerance::quadrature().max_iter }
}

/// `int a^k exp(-s a) f_B(a) da`, including the terminal atom of tables.
pub(crate) fn laplace_moment(law: &DivisionAgeLaw<'_>, s: f64, k: i32) -> Result<f64> {
    let rate = law.rate();
    let mut upper = law.upper();
    if s > 0.0 {
        upper = upper.min((TAIL_EXPONENT + 10.0 * k as f64) / s);
    }
    let mut total = 0.0;
    if upper > 0.0 {
        let breaks: Vec<f64> = law.breaks().iter().copied().filter(|&x| x < upper).collect();
        total = integrate_with_breaks(
            |a| {
                let d = rate.density(a);
                if d == 0.0 {
                    0.0
                } else {
                    a.powi(k) * (-s * a).exp() * d
                }
            },
            0.0,
            upper,
            &breaks,
            law.tolerance(),
        )?;
    }
    if let Some((a_max, mass)) = rate.terminal_atom() {
        total += mass * a_max.powi(k) * (-s * a_max).exp();
    }
    Ok(total)
}

/// `H_rho(lambda) = 2 int int exp(-lambda a / v) f_B(a) rho(v) dv da`.
///
/// Strictly decreasing in `lambda` from `H(0) = 2`; the Malthus parameter is
/// the root of `H = 1`.
#[derive(Debug, Clone)]
pub struct BalanceFunction<'a> {
    law: DivisionAgeLaw<'a>,
    nodes: Vec<(f64, f64)>,
}

impl<'a> BalanceFunction<'a> {
    pub fn new(b: &'a AgeDivisionRate, rho: &VariabilitySpec, tol: &Tolerance) -> Result<Self> {
        rho.validate()?;
        let law = b.law(&inner_tolerance(tol))?;
        Ok(Self { law, nodes: rho.quadrature() })
    }

    pub fn eval(&self, lambda: f64) -> Result<f64> {
        let mut h = 0.0;
        for &(v, w) in &self.nodes {
            if w == 0.0 {
                continue;
            }
            h += w * laplace_moment(&self.law, lambda / v, 0)?;
        }
        Ok(2.0 * h)
    }

    pub fn solve(&self, tol: &Tolerance) -> Result<f64> {
        solve_captured(|l| self.eval(l), tol)
    }
}

/// Runs the root solver on a fallible function, surfacing the first
/// evaluation error instead of a spurious root.
fn solve_captured<F: Fn(f64) -> Result<f64>>(h: F, tol: &Tolerance) -> Result<f64> {
    let mut failure = None;
    let root = find_root_decreasing(
        |l| match h(l) {
            Ok(x) => x,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        1.0,
        tol,
    );
    match failure {
        Some(e) => Err(e),
        None => root,
    }
}

/// Malthus parameter `lambda_{B, v_bar}` of a population aging at the
/// constant rate `v_bar`.
pub fn malthus_reference(b: &AgeDivisionRate, v_bar: f64, tol: &Tolerance) -> Result<f64> {
    BalanceFunction::new(b, &VariabilitySpec::Dirac { v_bar }, tol)?.solve(tol)
}

/// Malthus parameter `lambda_{B, rho}` with aging rates drawn from `rho` at
/// each birth, independently of the mother.
pub fn malthus_with_variability(b: &AgeDivisionRate, rho: &VariabilitySpec, tol: &Tolerance) -> Result<f64> {
    BalanceFunction::new(b, rho, tol)?.solve(tol)
}

/// Balance function for a general aging speed `g_a` and division rate
/// `gamma`, given as `hazard = gamma / g_a` and `inv_speed = 1 / g_a`:
///
/// `H(lambda) = 2 int int hazard(a, v) exp(-int_0^a (lambda inv_speed + hazard)) rho(v) dv da`.
///
/// Each rate node carries a table of Gauss–Legendre cells in age with the
/// running integrals of `hazard` and `inv_speed` precomputed, so evaluating
/// `H` costs one exponential per quadrature point.
#[derive(Debug, Clone)]
pub struct GeneralBalance {
    tables: Vec<(f64, Vec<(f64, f64)>)>,
}

impl GeneralBalance {
    /// `lambda_hint` bounds the cell width so that `exp(-lambda I(a))` is
    /// resolved for `lambda` up to about four times the hint.
    pub fn new<G, S>(
        hazard: &G,
        inv_speed: &S,
        rho: &VariabilitySpec,
        breaks: &[f64],
        lambda_hint: f64,
    ) -> Result<Self>
    where
        G: Fn(f64, f64) -> f64,
        S: Fn(f64, f64) -> f64,
    {
        rho.validate()?;
        let mut breaks: Vec<f64> = breaks.iter().copied().filter(|&x| x > 0.0).collect();
        breaks.sort_by(f64::total_cmp);
        let rule = GaussLegendre::new(CELL_RULE);
        let mut tables = Vec::new();
        for (v, w) in rho.quadrature() {
            if w == 0.0 {
                continue;
            }
            tables.push((w, age_table(|a| hazard(a, v), |a| inv_speed(a, v), &breaks, lambda_hint, &rule)?));
        }
        Ok(Self { tables })
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        let mut h = 0.0;
        for (w, cells) in &self.tables {
            let inner: f64 = cells.iter().map(|&(c, i)| c * (-lambda * i).exp()).sum();
            h += w * inner;
        }
        2.0 * h
    }
}

fn age_table<G: Fn(f64) -> f64, S: Fn(f64) -> f64>(
    hazard: G,
    inv_speed: S,
    breaks: &[f64],
    lambda_hint: f64,
    rule: &GaussLegendre,
) -> Result<Vec<(f64, f64)>> {
    let mut cells = Vec::new();
    let (mut a, mut big_lambda, mut big_i) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut next_break = breaks.iter().copied().peekable();
    while big_lambda <= TAIL_EXPONENT {
        if a > GENERAL_MAX_AGE {
            return Err(Error::NonIntegrableTail);
        }
        let local = hazard(a).max(0.0) + lambda_hint * inv_speed(a).max(0.0);
        let mut h = (0.02 * a).max(0.02);
        if local > 0.0 {
            h = h.min(0.25 / local);
        }
        while let Some(&k) = next_break.peek() {
            if k <= a {
                next_break.next();
            } else {
                break;
            }
        }
        if let Some(&k) = next_break.peek() {
            h = h.min(k - a);
        }
        let end = a + h;
        for (x, wx) in rule.mapped(a, end) {
            let lam = big_lambda + rule.integrate(a, x, &hazard);
            let ii = big_i + rule.integrate(a, x, &inv_speed);
            let c = wx * hazard(x) * (-lam).exp();
            if c != 0.0 {
                cells.push((c, ii));
            }
        }
        big_lambda += rule.integrate(a, end, &hazard);
        big_i += rule.integrate(a, end, &inv_speed);
        if end == a {
            return Err(Error::InvalidInput("age grid stalled"));
        }
        a = end;
    }
    Ok(cells)
}

/// Malthus parameter for a general aging speed and division rate, with
/// rates drawn from `rho` independently of the mother.
///
/// `breaks` lists ages where `hazard` or `inv_speed` are not smooth.
pub fn malthus_general<G, S>(
    hazard: G,
    inv_speed: S,
    rho: &VariabilitySpec,
    breaks: &[f64],
    tol: &Tolerance,
) -> Result<f64>
where
    G: Fn(f64, f64) -> f64,
    S: Fn(f64, f64) -> f64,
{
    let coarse = GeneralBalance::new(&hazard, &inv_speed, rho, breaks, 0.0)?;
    let guess = find_root_decreasing(|l| coarse.eval(l), 1.0, &tol.scaled(1e3))?;
    let fine = GeneralBalance::new(&hazard, &inv_speed, rho, breaks, guess)?;
    find_root_decreasing(|l| fine.eval(l), 1.0, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::root()
    }

    fn two_point() -> VariabilitySpec {
        VariabilitySpec::two_point(0.5, 1.5)
    }

    #[test]
    fn constant_rate_reference_is_b_times_v() {
        let cases = [(1.0, 1.0), (2.0, 0.5), (3.0, 1.0), (0.1, 10.0), (10.0, 10.0), (0.37, 4.2)];
        for (b, v) in cases {
            let lam = malthus_reference(&AgeDivisionRate::Constant { b }, v, &tol()).unwrap();
            assert!((lam - b * v).abs() < 1e-10 * (1.0 + b * v), "b={b} v={v} got {lam}");
        }
    }

    #[test]
    fn power_lag_reference_matches_dense_riemann_sum() {
        let b = AgeDivisionRate::PowerLag { beta: 2.0, lag: 1.0 };
        let lam = malthus_reference(&b, 1.0, &tol()).unwrap();
        // Independent midpoint sum of H on [1, 8] and a 1e-6 scan around the root.
        let n = 200_000;
        let h = 7.0 / n as f64;
        let big_h = |l: f64| {
            (0..n)
                .map(|i| {
                    let a = 1.0 + (i as f64 + 0.5) * h;
                    let x = a - 1.0;
                    2.0 * (-l * a).exp() * x * x * (-x * x * x / 3.0).exp() * h
                })
                .sum::<f64>()
        };
        let mut l = lam - 1e-5;
        while big_h(l) > 1.0 {
            l += 1e-6;
        }
        assert!((l - lam).abs() < 2e-6, "scan {l} vs solver {lam}");
        assert!((lam - 0.307_449_812).abs() < 1e-8, "{lam}");
    }

    #[test]
    fn two_point_constant_rate_quadratic_root() {
        let b = AgeDivisionRate::Constant { b: 1.0 };
        let lam = malthus_with_variability(&b, &two_point(), &tol()).unwrap();
        assert!((lam - 0.75_f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn dirac_reduction() {
        let rates = [
            AgeDivisionRate::Constant { b: 0.7 },
            AgeDivisionRate::PowerLag { beta: 1.0, lag: 1.0 },
            AgeDivisionRate::PowerLag { beta: 2.0, lag: 0.5 },
            AgeDivisionRate::PowerLag { beta: 0.0, lag: 2.0 },
            AgeDivisionRate::PowerLag { beta: 3.5, lag: 0.0 },
        ];
        for b in &rates {
            let r = malthus_reference(b, 1.3, &tol()).unwrap();
            let d = malthus_with_variability(b, &VariabilitySpec::Dirac { v_bar: 1.3 }, &tol()).unwrap();
            assert!((r - d).abs() < 1e-9);
        }
    }

    #[test]
    fn truncated_gaussian_constant_rate_matches_fine_quantisation() {
        let b = AgeDivisionRate::Constant { b: 1.0 };
        let rho = VariabilitySpec::TruncatedGaussian { v_min: 0.0, v_max: 2.0, sigma_eta: 0.7 };
        let lam = malthus_with_variability(&b, &rho, &tol()).unwrap();
        assert!(lam < 1.0);
        // 1e4 equal-width atoms, each exact for constant B: sum w v / (lambda + v) = 1/2.
        let n = 10_000;
        let atoms: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v = (i as f64 + 0.5) * 2.0 / n as f64;
                (v, rho.density(v).unwrap() * 2.0 / n as f64)
            })
            .collect();
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let h = |l: f64| atoms.iter().map(|&(v, w)| 2.0 * w / total * v / (l + v)).sum::<f64>();
        let oracle = find_root_decreasing(h, 1.0, &tol()).unwrap();
        assert!((lam - oracle).abs() < 1e-6, "{lam} vs {oracle}");
    }

    #[test]
    fn root_certificate() {
        let b = AgeDivisionRate::PowerLag { beta: 2.0, lag: 1.0 };
        let rho = VariabilitySpec::TruncatedGaussian { v_min: 0.6, v_max: 1.4, sigma_eta: 0.28 };
        let t = tol();
        let h = BalanceFunction::new(&b, &rho, &t).unwrap();
        let lam = h.solve(&t).unwrap();
        let d = 10.0 * t.abs_tol;
        assert!(h.eval(lam - d).unwrap() > 1.0);
        assert!(h.eval(lam + d).unwrap() < 1.0);
    }

    #[test]
    fn general_relation_constant_hazard_over_speed() {
        let rho = VariabilitySpec::TruncatedGaussian { v_min: 0.0, v_max: 2.0, sigma_eta: 0.7 };
        let lam = malthus_general(|_, v| 0.8 / v, |_, v| 1.0 / v, &rho, &[], &tol()).unwrap();
        assert!((lam - 0.8).abs() < 1e-9, "{lam}");
    }

    #[test]
    fn general_relation_reduces_to_reference() {
        let b = AgeDivisionRate::PowerLag { beta: 2.0, lag: 1.0 };
        let r = malthus_reference(&b, 1.0, &tol()).unwrap();
        let g = malthus_general(
            |a, _| b.rate(a),
            |_, _| 1.0,
            &VariabilitySpec::Dirac { v_bar: 1.0 },
            &[1.0],
            &tol(),
        )
        .unwrap();
        assert!((r - g).abs() < 1e-9, "{r} vs {g}");
    }

    #[test]
    fn general_relation_two_point() {
        let lam = malthus_general(|_, _| 1.0, |_, v| 1.0 / v, &two_point(), &[], &tol()).unwrap();
        assert!((lam - 0.75_f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn tabulated_constant_matches_closed_form() {
        let t = super::super::division_rate::TabulatedRate::new(
            alloc::vec![0.0, 10.0, 20.0, 40.0],
            alloc::vec![1.5, 1.5, 1.5, 1.5],
            40.0,
        )
        .unwrap();
        let lam = malthus_reference(&AgeDivisionRate::Tabulated(t), 2.0, &tol()).unwrap();
        assert!((lam - 3.0).abs() < 1e-9);
    }
}
