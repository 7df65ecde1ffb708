#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use alloc::vec::Vec;

use crate::numerics::{integrate_with_breaks, semi_infinite_cutoff, Tolerance, DEFAULT_TAIL_EPS};
use crate::{Error, Result};

/// Division hazard per unit of physiological age.
#[derive(Debug, Clone, PartialEq)]
pub enum AgeDivisionRate {
    /// `B(a) = b`.
    Constant { b: f64 },
    /// `B(a) = (a - lag)^beta 1{a >= lag}`.
    PowerLag { beta: f64, lag: f64 },
    /// Piecewise-linear table on `[0, a_max]`.
    Tabulated(TabulatedRate),
}

/// Piecewise-linear hazard through `(ages[i], rates[i])`.
///
/// The cumulative hazard is integrated exactly (trapezoid on a linear
/// interpolant). Beyond the last node the hazard is held constant, and the
/// survival is declared to vanish at `a_max`: whatever mass survives to
/// `a_max` divides there, so the age-at-division law is the density `f_B` on
/// `[0, a_max)` plus an atom at `a_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedRate {
    ages: Vec<f64>,
    rates: Vec<f64>,
    cumulative: Vec<f64>,
    a_max: f64,
}

impl TabulatedRate {
    pub fn new(ages: Vec<f64>, rates: Vec<f64>, a_max: f64) -> Result<Self> {
        if ages.len() < 2 || ages.len() != rates.len() {
            return Err(Error::InvalidInput("tabulated rate needs >= 2 matching (a, B) nodes"));
        }
        if ages[0] != 0.0 || ages.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("tabulated ages must start at 0 and increase strictly"));
        }
        if rates.iter().any(|&r| !(r >= 0.0) || !r.is_finite()) {
            return Err(Error::InvalidInput("tabulated rates must be finite and non-negative"));
        }
        if !(a_max >= *ages.last().unwrap()) || !a_max.is_finite() {
            return Err(Error::InvalidInput("a_max must be finite and cover the grid"));
        }
        let mut cumulative = Vec::with_capacity(ages.len());
        cumulative.push(0.0);
        for i in 1..ages.len() {
            let seg = 0.5 * (rates[i] + rates[i - 1]) * (ages[i] - ages[i - 1]);
            cumulative.push(cumulative[i - 1] + seg);
        }
        Ok(Self { ages, rates, cumulative, a_max })
    }

    /// Tabulates `rate` on `ages`.
    pub fn from_fn<F: Fn(f64) -> f64>(ages: Vec<f64>, rate: F, a_max: f64) -> Result<Self> {
        let rates = ages.iter().map(|&a| rate(a)).collect();
        Self::new(ages, rates, a_max)
    }

    pub fn ages(&self) -> &[f64] {
        &self.ages
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn a_max(&self) -> f64 {
        self.a_max
    }

    fn segment(&self, a: f64) -> usize {
        match self.ages.binary_search_by(|x| x.total_cmp(&a)) {
            Ok(i) => i.min(self.ages.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.ages.len() - 2),
        }
    }

    fn rate(&self, a: f64) -> f64 {
        let last = *self.ages.last().unwrap();
        if a < 0.0 || a >= self.a_max {
            return 0.0;
        }
        if a >= last {
            return *self.rates.last().unwrap();
        }
        let i = self.segment(a);
        let t = (a - self.ages[i]) / (self.ages[i + 1] - self.ages[i]);
        self.rates[i] + t * (self.rates[i + 1] - self.rates[i])
    }

    fn cumulative(&self, a: f64) -> f64 {
        let last = *self.ages.last().unwrap();
        if a <= 0.0 {
            return 0.0;
        }
        let a = a.min(self.a_max);
        if a >= last {
            return self.cumulative.last().unwrap() + self.rates.last().unwrap() * (a - last);
        }
        let i = self.segment(a);
        let ra = self.rate(a);
        self.cumulative[i] + 0.5 * (self.rates[i] + ra) * (a - self.ages[i])
    }

    fn slope(&self, a: f64) -> f64 {
        if a >= *self.ages.last().unwrap() {
            return 0.0;
        }
        let i = self.segment(a);
        (self.rates[i + 1] - self.rates[i]) / (self.ages[i + 1] - self.ages[i])
    }
}

impl AgeDivisionRate {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AgeDivisionRate::Constant { b } if !(b > 0.0) || !b.is_finite() => {
                Err(Error::InvalidInput("constant rate must be positive and finite"))
            }
            AgeDivisionRate::PowerLag { beta, lag }
                if !(beta >= 0.0) || !(lag >= 0.0) || !beta.is_finite() || !lag.is_finite() =>
            {
                Err(Error::InvalidInput("power-lag rate needs beta >= 0 and lag >= 0"))
            }
            _ => Ok(()),
        }
    }

    /// `B(a)`.
    pub fn rate(&self, a: f64) -> f64 {
        match self {
            AgeDivisionRate::Constant { b } => {
                if a >= 0.0 {
                    *b
                } else {
                    0.0
                }
            }
            AgeDivisionRate::PowerLag { beta, lag } => {
                if a >= *lag {
                    (a - lag).powf(*beta)
                } else {
                    0.0
                }
            }
            AgeDivisionRate::Tabulated(t) => t.rate(a),
        }
    }

    /// `Lambda(a) = int_0^a B`.
    pub fn cumulative(&self, a: f64) -> f64 {
        if a <= 0.0 {
            return 0.0;
        }
        match self {
            AgeDivisionRate::Constant { b } => b * a,
            AgeDivisionRate::PowerLag { beta, lag } => {
                if a > *lag {
                    (a - lag).powf(beta + 1.0) / (beta + 1.0)
                } else {
                    0.0
                }
            }
            AgeDivisionRate::Tabulated(t) => t.cumulative(a),
        }
    }

    /// `S(a) = exp(-Lambda(a))`, with `S = 0` past `a_max` for tables (the
    /// value at `a_max` itself is the left limit, i.e. the terminal atom).
    pub fn survival(&self, a: f64) -> f64 {
        if let AgeDivisionRate::Tabulated(t) = self {
            if a > t.a_max {
                return 0.0;
            }
        }
        (-self.cumulative(a)).exp()
    }

    /// Continuous part of the age-at-division law, `f_B = B S`.
    pub fn density(&self, a: f64) -> f64 {
        let b = self.rate(a);
        if b == 0.0 {
            0.0
        } else {
            b * self.survival(a)
        }
    }

    /// `B'(a)` where it exists (one-sided at table nodes, `0` off the support).
    pub fn derivative(&self, a: f64) -> f64 {
        match self {
            AgeDivisionRate::Constant { .. } => 0.0,
            AgeDivisionRate::PowerLag { beta, lag } => {
                if a > *lag && *beta > 0.0 {
                    beta * (a - lag).powf(beta - 1.0)
                } else {
                    0.0
                }
            }
            AgeDivisionRate::Tabulated(t) => t.slope(a),
        }
    }

    /// Points where `B` or `B'` may be discontinuous.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            AgeDivisionRate::Constant { .. } => Vec::new(),
            AgeDivisionRate::PowerLag { lag, .. } => alloc::vec![*lag],
            AgeDivisionRate::Tabulated(t) => {
                let mut k = t.ages.clone();
                k.push(t.a_max);
                k
            }
        }
    }

    /// Upper end of the support, if finite.
    pub fn a_max(&self) -> Option<f64> {
        match self {
            AgeDivisionRate::Tabulated(t) => Some(t.a_max),
            _ => None,
        }
    }

    /// Mass dividing exactly at `a_max` (tables only).
    pub fn terminal_atom(&self) -> Option<(f64, f64)> {
        match self {
            AgeDivisionRate::Tabulated(t) => {
                let mass = (-t.cumulative(t.a_max)).exp();
                Some((t.a_max, mass))
            }
            _ => None,
        }
    }

    /// Age beyond which the survival mass is below `eps` (or `a_max`).
    pub fn cutoff(&self, eps: f64) -> Result<f64> {
        let a = match self {
            AgeDivisionRate::Constant { b } => -eps.ln() / b,
            AgeDivisionRate::PowerLag { beta, lag } => {
                lag + ((beta + 1.0) * -eps.ln()).powf(1.0 / (beta + 1.0))
            }
            AgeDivisionRate::Tabulated(t) => {
                semi_infinite_cutoff(|a| self.survival(a), eps).unwrap_or(t.a_max).min(t.a_max)
            }
        };
        if a.is_finite() {
            Ok(a)
        } else {
            Err(Error::NonIntegrableTail)
        }
    }

    /// Prepared integration against the age-at-division law.
    pub fn law(&self, tol: &Tolerance) -> Result<DivisionAgeLaw<'_>> {
        self.validate()?;
        let upper = self.cutoff(DEFAULT_TAIL_EPS)?;
        let mut breaks = self.kinks();
        breaks.retain(|&k| k > 0.0 && k < upper);
        Ok(DivisionAgeLaw { rate: self, upper, breaks, tol: *tol })
    }
}

/// Integrates functions of age against `f_B(a) da` (plus the terminal atom of
/// tabulated rates) on `[0, A]`, where `A` truncates a survival tail of
/// `1e-13`.
#[derive(Debug, Clone)]
pub struct DivisionAgeLaw<'a> {
    rate: &'a AgeDivisionRate,
    upper: f64,
    breaks: Vec<f64>,
    tol: Tolerance,
}

impl DivisionAgeLaw<'_> {
    pub fn rate(&self) -> &AgeDivisionRate {
        self.rate
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn tolerance(&self) -> &Tolerance {
        &self.tol
    }

    /// `int g(a) f_B(a) da + atom * g(a_max)`.
    pub fn expect<G: Fn(f64) -> f64>(&self, g: G) -> Result<f64> {
        let rate = self.rate;
        let mut total = if self.upper > 0.0 {
            integrate_with_breaks(|a| g(a) * rate.density(a), 0.0, self.upper, &self.breaks, &self.tol)?
        } else {
            0.0
        };
        if let Some((a_max, mass)) = rate.terminal_atom() {
            if mass > 0.0 {
                total += mass * g(a_max);
            }
        }
        Ok(total)
    }

    /// `int_0^A g(a) S(a) da`.
    pub fn integrate_survival<G: Fn(f64) -> f64>(&self, g: G) -> Result<f64> {
        if self.upper <= 0.0 {
            return Ok(0.0);
        }
        let rate = self.rate;
        integrate_with_breaks(|a| g(a) * rate.survival(a), 0.0, self.upper, &self.breaks, &self.tol)
    }
}
