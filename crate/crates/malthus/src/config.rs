//! Flat `key=value` run configuration for the size model.
//!
//! One entry per line, `#` starts a comment line, keys use dotted sections
//! (`division.beta=2`). Unknown keys are rejected. Later entries and `--set`
//! overrides replace earlier ones.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use malthus_core::age_model::VariabilitySpec;
use malthus_core::estimator::{EstimatorKind, Protocol};
use malthus_core::size_sim::{
    GrowthLaw, HeredityKernel, RootRate, SimConfig, SizeDivisionRate, SplitRule, DEFAULT_CELL_CAP,
};

use crate::error::{CliError, CliResult};

/// Keys with their defaults (the exponential, symmetric, memoryless setting
/// with `B(x) = (x - 1)^2` and three rows of the CV table).
pub const DEFAULTS: &[(&str, &str)] = &[
    ("division.mode", "unit_size"),
    ("division.x0", "1"),
    ("division.beta", "2"),
    ("growth", "exp"),
    ("split", "sym"),
    ("kernel", "memoryless"),
    ("baseline", "gauss"),
    ("baseline.vbar", "1"),
    ("baseline.sigma_eta", "0.7"),
    ("baseline.v_min", ""),
    ("baseline.v_max", ""),
    ("root.size", "2"),
    ("root.rate", "1"),
    ("cell_cap", ""),
    ("rows", "0.1:10.5,0.4:11.5,0.9:13"),
    ("M", "50"),
    ("seed", "1"),
    ("estimator", "biomass"),
    ("t1_fraction", "0.5"),
];

/// Resolved key-value configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KvConfig {
    entries: BTreeMap<String, String>,
}

impl Default for KvConfig {
    fn default() -> Self {
        let entries = DEFAULTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        Self { entries }
    }
}

fn config_err(msg: impl fmt::Display) -> CliError {
    CliError::Config(msg.to_string())
}

impl KvConfig {
    /// Defaults overridden by the lines of `text`.
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            cfg.set_entry(line).map_err(|e| config_err(format!("line {}: {e}", n + 1)))?;
        }
        Ok(cfg)
    }

    /// Applies one `key=value` override.
    pub fn set_entry(&mut self, entry: &str) -> CliResult<()> {
        let (k, v) = entry
            .split_once('=')
            .ok_or_else(|| config_err(format!("expected key=value, got `{entry}`")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        match self.entries.get_mut(key) {
            Some(slot) => {
                *slot = value.to_owned();
                Ok(())
            }
            None => Err(config_err(format!("unknown key `{key}`"))),
        }
    }

    pub fn get(&self, key: &str) -> &str {
        self.entries.get(key).map(String::as_str).unwrap_or("")
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }

    /// Canonical text form, one sorted `key=value` per line.
    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    fn num<T: FromStr>(&self, key: &str) -> CliResult<T> {
        let raw = self.get(key);
        raw.parse().map_err(|_| config_err(format!("`{key}`: cannot parse `{raw}`")))
    }

    fn opt_num<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        if self.get(key).is_empty() {
            Ok(None)
        } else {
            self.num(key).map(Some)
        }
    }

    pub fn baseline(&self) -> CliResult<VariabilitySpec> {
        BaselineSpec {
            kind: self.get("baseline").to_owned(),
            vbar: self.num("baseline.vbar")?,
            sigma_eta: self.num("baseline.sigma_eta")?,
            v_min: self.opt_num("baseline.v_min")?,
            v_max: self.opt_num("baseline.v_max")?,
        }
        .build()
    }

    /// Model with the kernel law set to the baseline; horizon from the first row.
    pub fn sim_config(&self) -> CliResult<SimConfig> {
        let (x0, beta) = (self.num("division.x0")?, self.num("division.beta")?);
        let division = match self.get("division.mode") {
            "unit_size" => SizeDivisionRate::unit_size(x0, beta),
            "unit_time" => SizeDivisionRate::unit_time(x0, beta),
            other => return Err(config_err(format!("division.mode: unknown `{other}`"))),
        }
        .map_err(CliError::Model)?;
        let growth = match self.get("growth") {
            "exp" => GrowthLaw::Exponential,
            "linear" => GrowthLaw::Linear,
            other => return Err(config_err(format!("growth: unknown `{other}`"))),
        };
        let split = match self.get("split") {
            "sym" => SplitRule::Symmetric,
            s => match s.strip_prefix("asym:") {
                Some(eps) => SplitRule::UniformAsymmetric {
                    eps: eps.parse().map_err(|_| config_err(format!("split: bad eps in `{s}`")))?,
                },
                None => return Err(config_err(format!("split: unknown `{s}`"))),
            },
        };
        let law = self.baseline()?;
        let kernel = match self.get("kernel") {
            "memoryless" => HeredityKernel::Memoryless(law),
            s => match s.strip_prefix("ar:") {
                Some(theta) => HeredityKernel::AutoRegressive {
                    law,
                    theta: theta.parse().map_err(|_| config_err(format!("kernel: bad theta in `{s}`")))?,
                },
                None => return Err(config_err(format!("kernel: unknown `{s}`"))),
            },
        };
        let root_rate = match self.get("root.rate") {
            "drawn" => RootRate::DrawnFromKernel,
            _ => RootRate::Fixed(self.num("root.rate")?),
        };
        let horizon = self.rows()?.first().map_or(1.0, |r| r.1);
        let cfg = SimConfig::new(division, kernel, horizon)
            .with_growth(growth)
            .with_split(split)
            .with_root(self.num("root.size")?, root_rate)
            .with_cell_cap(self.opt_num("cell_cap")?.unwrap_or(DEFAULT_CELL_CAP));
        cfg.validate().map_err(CliError::Model)?;
        Ok(cfg)
    }

    /// `(alpha, T)` pairs.
    pub fn rows(&self) -> CliResult<Vec<(f64, f64)>> {
        let rows = parse_rows(self.get("rows"))?;
        if rows.is_empty() {
            return Err(config_err("rows: at least one alpha:T pair required"));
        }
        Ok(rows)
    }

    pub fn protocol(&self) -> CliResult<Protocol> {
        let estimator = match self.get("estimator") {
            "biomass" => EstimatorKind::Biomass,
            "count" => EstimatorKind::Count,
            other => return Err(config_err(format!("estimator: unknown `{other}`"))),
        };
        let mut p = Protocol::new(self.num("M")?, self.num("seed")?, estimator);
        p.first_fraction = self.num("t1_fraction")?;
        p.validate().map_err(CliError::Model)?;
        Ok(p)
    }
}

fn parse_rows(s: &str) -> CliResult<Vec<(f64, f64)>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|pair| {
            let (a, t) = pair
                .split_once(':')
                .ok_or_else(|| config_err(format!("rows: expected alpha:T, got `{pair}`")))?;
            let a: f64 = a.trim().parse().map_err(|_| config_err(format!("rows: bad alpha `{a}`")))?;
            let t: f64 = t.trim().parse().map_err(|_| config_err(format!("rows: bad horizon `{t}`")))?;
            if !(t > 0.0 && t.is_finite()) || !(0.0..=1.0).contains(&a) {
                return Err(config_err(format!("rows: need 0 <= alpha <= 1 and T > 0 in `{pair}`")));
            }
            Ok((a, t))
        })
        .collect()
}

/// Baseline law from its textual kind and parameters.
///
/// * `gauss`: Gaussian with mean `vbar`, scale `sigma_eta`, truncated to
///   `[v_min, v_max]` (default `[vbar - 1, vbar + 1]`)
/// * `twopoint` or `twopoint(v1,v2)`: equal atoms, default `vbar -+ 0.5`
/// * `uniform`: uniform density on `[v_min, v_max]`
/// * `dirac`: all mass at `vbar`
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineSpec {
    pub kind: String,
    pub vbar: f64,
    pub sigma_eta: f64,
    pub v_min: Option<f64>,
    pub v_max: Option<f64>,
}

impl BaselineSpec {
    pub fn build(&self) -> CliResult<VariabilitySpec> {
        let kind = self.kind.trim();
        let spec = if let Some(args) = kind.strip_prefix("twopoint(").and_then(|s| s.strip_suffix(')')) {
            let vals: Vec<f64> = args
                .split(',')
                .map(|x| x.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|_| config_err(format!("baseline: bad atoms in `{kind}`")))?;
            match vals[..] {
                [v1, v2] => VariabilitySpec::two_point(v1, v2),
                _ => return Err(config_err("baseline: twopoint takes two atoms")),
            }
        } else {
            let lo = |w: f64| self.v_min.unwrap_or(self.vbar - w);
            let hi = |w: f64| self.v_max.unwrap_or(self.vbar + w);
            match kind {
                "gauss" => VariabilitySpec::TruncatedGaussian { v_min: lo(1.0), v_max: hi(1.0), sigma_eta: self.sigma_eta },
                "twopoint" => VariabilitySpec::two_point(lo(0.5), hi(0.5)),
                "uniform" => VariabilitySpec::Uniform { v_min: lo(0.5), v_max: hi(0.5) },
                "dirac" => VariabilitySpec::Dirac { v_bar: self.vbar },
                other => return Err(config_err(format!("baseline: unknown `{other}`"))),
            }
        };
        spec.validate().map_err(CliError::Model)?;
        Ok(spec)
    }
}
