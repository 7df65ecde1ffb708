//! The subcommands, as functions from typed arguments to CSV documents.

use std::collections::BTreeMap;

use malthus_core::age_model::{
    cv_curve, d2lambda_at_zero, dlambda_dalpha, malthus_reference, malthus_with_variability, AgeDivisionRate,
    AlphaFamily,
};
use malthus_core::estimator::{cv_table, estimator_sd_comparison, Executor};
use malthus_core::numerics::{RngStream, Tolerance};
use malthus_core::size_sim::simulate_tree;
use malthus_core::Error;

use crate::config::{BaselineSpec, KvConfig};
use crate::error::{CliError, CliResult};
use crate::format::{Csv, Field};

fn status(r: &Result<f64, Error>) -> String {
    match r {
        Ok(_) => "ok".to_owned(),
        Err(e) => e.to_string(),
    }
}

fn real_or_missing(r: &Result<f64, Error>) -> Field<'static> {
    match r {
        Ok(x) => Field::Real(*x),
        Err(_) => Field::Missing,
    }
}

fn check_alphas(alphas: &[f64]) -> CliResult<()> {
    match alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        Some(a) => Err(CliError::Config(format!("alpha {a} outside [0, 1]"))),
        None => Ok(()),
    }
}

pub const AGE_CURVE_HEADER: &[&str] = &["beta", "alpha", "cv", "lambda", "lambda_reference", "solver_status"];

/// `CV -> lambda` curves for `B(a) = (a - lag)^beta 1{a >= lag}`, one block
/// per `beta`, each starting with its `CV = 0` anchor.
pub fn age_curve(betas: &[f64], lag: f64, alphas: &[f64], baseline: &BaselineSpec, tol: &Tolerance) -> CliResult<Csv> {
    check_alphas(alphas)?;
    let base = baseline.build()?;
    let alphas: Vec<f64> = alphas.iter().copied().filter(|&a| a > 0.0).collect();
    let mut csv = Csv::new(AGE_CURVE_HEADER);
    for &beta in betas {
        let b = AgeDivisionRate::PowerLag { beta, lag };
        b.validate().map_err(CliError::Model)?;
        let rows = cv_curve(&b, &base, &alphas, tol).map_err(CliError::Model)?;
        let reference = rows.iter().find(|r| r.cv == 0.0 && r.alpha == 0.0).map(|r| r.lambda.clone());
        let reference = reference.unwrap_or_else(|| malthus_reference(&b, base.mean(), tol));
        for r in &rows {
            csv.row(&[
                Field::Real(beta),
                Field::Real(r.alpha),
                Field::Real(r.cv),
                real_or_missing(&r.lambda),
                real_or_missing(&reference),
                Field::Text(&status(&r.lambda)),
            ]);
        }
    }
    Ok(csv)
}

pub const AGE_PERTURB_HEADER: &[&str] =
    &["alpha", "lambda_exact", "lambda_quadratic_approx", "residual", "d2_at_zero", "dlambda_dalpha"];

/// Exact `lambda_alpha` against its second-order expansion at `alpha = 0`.
pub fn age_perturb(b: &AgeDivisionRate, baseline: &BaselineSpec, alphas: &[f64], tol: &Tolerance) -> CliResult<Csv> {
    check_alphas(alphas)?;
    b.validate().map_err(CliError::Model)?;
    let base = baseline.build()?;
    if base.is_degenerate() {
        return Err(CliError::Model(Error::DegenerateBaseline));
    }
    let lambda0 = malthus_reference(b, base.mean(), tol).map_err(CliError::Runtime)?;
    let d2 = d2lambda_at_zero(b, &base, tol).map_err(CliError::Runtime)?;
    let mut csv = Csv::new(AGE_PERTURB_HEADER);
    for &alpha in alphas {
        let approx = lambda0 + 0.5 * alpha * alpha * d2;
        let (exact, slope) = if alpha == 0.0 {
            (lambda0, 0.0)
        } else {
            let fam = AlphaFamily::new(base.clone(), alpha).map_err(CliError::Model)?;
            let exact = malthus_with_variability(b, &fam.law(), tol).map_err(CliError::Runtime)?;
            (exact, dlambda_dalpha(b, &fam, tol).map_err(CliError::Runtime)?)
        };
        csv.row(&[
            Field::Real(alpha),
            Field::Real(exact),
            Field::Real(approx),
            Field::Real(exact - approx),
            Field::Real(d2),
            Field::Real(slope),
        ]);
    }
    Ok(csv)
}

pub const SIZE_MC_HEADER: &[&str] =
    &["cv", "alpha", "T", "mean", "sd", "ci_low", "ci_high", "pop_mean", "pop_min", "pop_max", "status"];

/// Monte Carlo CV table; every row uses the configured seed.
pub fn size_mc<E: Executor>(cfg: &KvConfig, exec: &E) -> CliResult<Csv> {
    let base = cfg.sim_config()?;
    let baseline = cfg.baseline()?;
    let rows = cfg.rows()?;
    let protocol = cfg.protocol()?;
    let table = cv_table(&base, &baseline, &rows, &protocol, exec).map_err(CliError::Model)?;
    let mut csv = Csv::new(SIZE_MC_HEADER);
    for row in &table {
        let mut fields = vec![Field::Real(row.cv), Field::Real(row.alpha), Field::Real(row.horizon)];
        let msg;
        match &row.estimate {
            Ok(e) => fields.extend([
                Field::Real(e.mean),
                Field::Real(e.sd),
                Field::Real(e.ci_low),
                Field::Real(e.ci_high),
                Field::Real(e.pop.mean),
                Field::Count(e.pop.min),
                Field::Count(e.pop.max),
                Field::Text("ok"),
            ]),
            Err(err) => {
                msg = err.to_string();
                fields.extend([Field::Missing; 7]);
                fields.push(Field::Text(&msg));
            }
        }
        csv.row(&fields);
    }
    Ok(csv)
}

pub const ESTIMATOR_COMPARE_HEADER: &[&str] = &["T", "sd_biomass", "sd_count"];

/// Spread of the biomass and count estimators on the same `m` trees.
pub fn estimator_compare<E: Executor>(
    cfg: &KvConfig,
    alpha: f64,
    horizons: &[f64],
    m: usize,
    seed: u64,
    exec: &E,
) -> CliResult<Csv> {
    check_alphas(&[alpha])?;
    let base = cfg.sim_config()?;
    let baseline = cfg.baseline()?;
    let sim = malthus_core::estimator::contracted_config(&base, &baseline, alpha, base.horizon)
        .map_err(CliError::Model)?;
    let rows = estimator_sd_comparison(&sim, horizons, m, seed, exec).map_err(|e| match e {
        Error::InvalidInput(_) => CliError::Model(e),
        e => CliError::Runtime(e),
    })?;
    let mut csv = Csv::new(ESTIMATOR_COMPARE_HEADER);
    for r in rows {
        csv.row(&[Field::Real(r.horizon), Field::Real(r.sd_biomass), Field::Real(r.sd_count)]);
    }
    Ok(csv)
}

pub const TREE_DUMP_HEADER: &[&str] = &["id_path", "parent_path", "b", "zeta", "xi", "tau", "d"];

/// Every cell of one tree. Paths spell the genealogy from the root `r`
/// (`r01` is the second daughter of the first daughter); the root has an
/// empty parent path.
pub fn tree_dump(cfg: &KvConfig, alpha: f64, horizon: f64, seed: u64, stream: u64) -> CliResult<Csv> {
    check_alphas(&[alpha])?;
    let base = cfg.sim_config()?;
    let baseline = cfg.baseline()?;
    let sim = malthus_core::estimator::contracted_config(&base, &baseline, alpha, horizon).map_err(CliError::Model)?;
    sim.validate().map_err(CliError::Model)?;
    let tree = simulate_tree(&sim, RngStream::new(seed, stream)).map_err(CliError::Runtime)?;
    let mut csv = Csv::new(TREE_DUMP_HEADER);
    for c in &tree.cells {
        let path = tree.path(c.id);
        let parent = c.parent.map(|p| tree.path(p)).unwrap_or_default();
        csv.row(&[
            Field::Text(&path),
            Field::Text(&parent),
            Field::Real(c.b),
            Field::Real(c.zeta),
            Field::Real(c.xi),
            Field::Real(c.tau),
            Field::Real(c.d),
        ]);
    }
    Ok(csv)
}

/// Flag values recorded in a manifest.
pub fn settings<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_owned(), v)).collect()
}

/// Comma-joined list of reals for manifests.
pub fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}
