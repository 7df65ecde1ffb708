use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt::Write;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::stats::{summarize, PopulationStats};
use crate::age_model::VariabilitySpec;
use crate::numerics::{splitmix64, RngStream};
use crate::size_sim::{biomass_at, simulate_tree, HeredityKernel, SimConfig, TreeResult};
use crate::{Error, Result};

/// Observable whose growth between two times estimates the Malthus parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    /// Total size of the living cells.
    Biomass,
    /// Number of living cells.
    Count,
}

impl EstimatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorKind::Biomass => "biomass",
            EstimatorKind::Count => "count",
        }
    }

    fn observe(self, tree: &TreeResult, t: f64) -> Result<f64> {
        let x = match self {
            EstimatorKind::Biomass => biomass_at(tree, t)?,
            EstimatorKind::Count => tree.count_at(t)? as f64,
        };
        if x > 0.0 {
            Ok(x)
        } else {
            Err(Error::EmptyPopulation { t })
        }
    }

    /// `ln(X_{t2} / X_{t1}) / (t2 - t1)`.
    pub fn estimate_between(self, tree: &TreeResult, t1: f64, t2: f64) -> Result<f64> {
        if !(0.0 <= t1 && t1 < t2) {
            return Err(Error::InvalidInput("observation times need 0 <= t1 < t2"));
        }
        let (x1, x2) = (self.observe(tree, t1)?, self.observe(tree, t2)?);
        Ok((x2 / x1).ln() / (t2 - t1))
    }

    /// `(2 / T) ln(X_T / X_{T/2})`.
    pub fn estimate(self, tree: &TreeResult, t: f64) -> Result<f64> {
        self.estimate_between(tree, 0.5 * t, t)
    }
}

/// `(2 / T) ln(M_T / M_{T/2})` with `M` the biomass.
pub fn malthus_hat_biomass(tree: &TreeResult, t: f64) -> Result<f64> {
    EstimatorKind::Biomass.estimate(tree, t)
}

/// `(2 / T) ln(N_T / N_{T/2})` with `N` the number of living cells.
pub fn malthus_hat_count(tree: &TreeResult, t: f64) -> Result<f64> {
    EstimatorKind::Count.estimate(tree, t)
}

/// Runs independent jobs `0..n`, returning results in job order.
pub trait Executor: Sync {
    fn run<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs jobs one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn run<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}

/// Monte Carlo protocol: `m` trees on streams `(seed, 0..m)`, observed at
/// `first_fraction * T` and `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Protocol {
    pub m: usize,
    pub seed: u64,
    pub estimator: EstimatorKind,
    pub first_fraction: f64,
}

impl Protocol {
    pub fn new(m: usize, seed: u64, estimator: EstimatorKind) -> Self {
        Self { m, seed, estimator, first_fraction: 0.5 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::InvalidInput("Monte Carlo needs M >= 2"));
        }
        if !(self.first_fraction >= 0.0 && self.first_fraction < 1.0) {
            return Err(Error::InvalidInput("first observation fraction must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// Summary of `M` per-tree estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct MalthusEstimate {
    pub per_tree: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Living cells at the horizon.
    pub pop: PopulationStats,
    pub horizon: f64,
    pub m: usize,
    pub estimator: EstimatorKind,
    pub config_digest: u64,
}

/// 64-bit digest of the `Debug` rendering of a configuration.
pub fn config_digest(config: &SimConfig) -> u64 {
    struct Hasher(u64);
    impl Write for Hasher {
        fn write_str(&mut self, s: &str) -> core::fmt::Result {
            for chunk in s.as_bytes().chunks(8) {
                let mut word = [0u8; 8];
                word[..chunk.len()].copy_from_slice(chunk);
                self.0 = splitmix64(self.0 ^ u64::from_le_bytes(word));
            }
            Ok(())
        }
    }
    let mut h = Hasher(0);
    let _ = write!(h, "{config:?}");
    h.0
}

fn replicate<T>(stream: u64, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Replicate { stream, source: Box::new(e) })
}

/// Simulates `M` trees and aggregates the per-tree estimates at the horizon.
pub fn monte_carlo<E: Executor>(config: &SimConfig, protocol: &Protocol, exec: &E) -> Result<MalthusEstimate> {
    config.validate()?;
    protocol.validate()?;
    let t = config.horizon;
    let outcomes = exec.run(protocol.m, |i| {
        let stream = i as u64;
        let tree = replicate(stream, simulate_tree(config, RngStream::new(protocol.seed, stream)))?;
        let est = replicate(
            stream,
            protocol.estimator.estimate_between(&tree, protocol.first_fraction * t, t),
        )?;
        let count = replicate(stream, tree.count_at(t))?;
        Ok((est, count))
    });
    let mut per_tree = Vec::with_capacity(protocol.m);
    let mut counts = Vec::with_capacity(protocol.m);
    for o in outcomes {
        let (e, c) = o?;
        per_tree.push(e);
        counts.push(c);
    }
    let s = summarize(&per_tree)?;
    Ok(MalthusEstimate {
        per_tree,
        mean: s.mean,
        sd: s.sd,
        ci_low: s.ci_low,
        ci_high: s.ci_high,
        pop: PopulationStats::from_counts(&counts),
        horizon: t,
        m: protocol.m,
        estimator: protocol.estimator,
        config_digest: config_digest(config),
    })
}

/// One row of a CV table.
#[derive(Debug, Clone, PartialEq)]
pub struct CvRow {
    pub alpha: f64,
    pub cv: f64,
    pub horizon: f64,
    pub estimate: Result<MalthusEstimate>,
}

/// `base` with its kernel law replaced by `baseline` contracted by `alpha`.
pub fn contracted_config(base: &SimConfig, baseline: &VariabilitySpec, alpha: f64, horizon: f64) -> Result<SimConfig> {
    let law = baseline.contract(alpha)?;
    let kernel = match &base.kernel {
        HeredityKernel::Memoryless(_) => HeredityKernel::Memoryless(law),
        HeredityKernel::AutoRegressive { theta, .. } => HeredityKernel::AutoRegressive { law, theta: *theta },
    };
    Ok(SimConfig { kernel, horizon, ..base.clone() })
}

/// Monte Carlo estimate for each `(alpha, T)` row, with the kernel law of
/// `base` replaced by `baseline` contracted by `alpha` (`alpha = 0` gives the
/// constant-rate reference). Every row uses the same seed. Failures stay in
/// their row.
pub fn cv_table<E: Executor>(
    base: &SimConfig,
    baseline: &VariabilitySpec,
    rows: &[(f64, f64)],
    protocol: &Protocol,
    exec: &E,
) -> Result<Vec<CvRow>> {
    baseline.validate()?;
    protocol.validate()?;
    let cv0 = baseline.cv();
    Ok(rows
        .iter()
        .map(|&(alpha, horizon)| CvRow {
            alpha,
            cv: alpha * cv0,
            horizon,
            estimate: contracted_config(base, baseline, alpha, horizon)
                .and_then(|cfg| monte_carlo(&cfg, protocol, exec)),
        })
        .collect())
}

/// Spread of the biomass and count estimators on the same trees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdRow {
    pub horizon: f64,
    pub mean_biomass: f64,
    pub sd_biomass: f64,
    pub mean_count: f64,
    pub sd_count: f64,
}

/// Both estimators at each horizon, on `M` trees simulated once up to the
/// largest horizon (a tree observed before its horizon is the tree simulated
/// to that time).
pub fn estimator_sd_comparison<E: Executor>(
    config: &SimConfig,
    horizons: &[f64],
    m: usize,
    seed: u64,
    exec: &E,
) -> Result<Vec<SdRow>> {
    Protocol::new(m, seed, EstimatorKind::Biomass).validate()?;
    if horizons.is_empty() || horizons.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return Err(Error::InvalidInput("horizons must be positive"));
    }
    let t_max = horizons.iter().copied().fold(0.0, f64::max);
    let cfg = config.clone().with_horizon(t_max);
    cfg.validate()?;
    let outcomes = exec.run(m, |i| {
        let stream = i as u64;
        let tree = replicate(stream, simulate_tree(&cfg, RngStream::new(seed, stream)))?;
        horizons
            .iter()
            .map(|&t| {
                let b = replicate(stream, malthus_hat_biomass(&tree, t))?;
                let c = replicate(stream, malthus_hat_count(&tree, t))?;
                Ok((b, c))
            })
            .collect::<Result<Vec<_>>>()
    });
    let per_tree = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    horizons
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let b: Vec<f64> = per_tree.iter().map(|row| row[k].0).collect();
            let c: Vec<f64> = per_tree.iter().map(|row| row[k].1).collect();
            let (sb, sc) = (summarize(&b)?, summarize(&c)?);
            Ok(SdRow { horizon: t, mean_biomass: sb.mean, sd_biomass: sb.sd, mean_count: sc.mean, sd_count: sc.sd })
        })
        .collect()
}
