//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the binary exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use malthus::exec::RayonExecutor;
use malthus_core::age_model::{
    cv_curve, d2lambda_at_zero, malthus_general, malthus_reference, malthus_with_variability, AgeDivisionRate,
    TabulatedRate, VariabilitySpec,
};
use malthus_core::estimator::{
    contracted_config, estimator_sd_comparison, malthus_hat_biomass, monte_carlo, EstimatorKind, Protocol,
};
use malthus_core::numerics::{integrate_with_breaks, RngStream, Tolerance};
use malthus_core::size_sim::{
    simulate_tree, GrowthLaw, HeredityKernel, RootRate, SimConfig, SizeDivisionRate, SplitRule,
};
use rand::Rng;

type Check = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(elapsed: Duration, budget_s: f64, o: Outcome) -> Outcome {
    let secs = elapsed.as_secs_f64();
    if secs < budget_s {
        o
    } else {
        outcome(false, format!("{} [took {secs:.1}s, budget {budget_s}s]", o.detail))
    }
}

fn tol() -> Tolerance {
    Tolerance::root()
}

fn gauss_baseline() -> VariabilitySpec {
    VariabilitySpec::TruncatedGaussian { v_min: 0.0, v_max: 2.0, sigma_eta: 0.7 }
}

fn table_config(alpha: f64, horizon: f64) -> SimConfig {
    let base = SimConfig::new(
        SizeDivisionRate::unit_size(1.0, 2.0).unwrap(),
        HeredityKernel::Memoryless(gauss_baseline()),
        horizon,
    );
    contracted_config(&base, &gauss_baseline(), alpha, horizon).unwrap()
}

fn executor() -> RayonExecutor {
    RayonExecutor::new(None).unwrap()
}

fn closed_forms() -> Outcome {
    let t0 = Instant::now();
    let mut rng = RngStream::new(2024, 0).generator();
    let mut worst_ref: f64 = 0.0;
    for _ in 0..20 {
        let b = rng.random_range(0.1..10.0);
        let v = rng.random_range(0.1..10.0);
        let l = malthus_reference(&AgeDivisionRate::Constant { b }, v, &tol()).unwrap();
        worst_ref = worst_ref.max((l - b * v).abs());
    }
    let mut worst_two: f64 = 0.0;
    for _ in 0..20 {
        let b = rng.random_range(0.1..10.0);
        let v1 = rng.random_range(0.1..5.0);
        let v2 = rng.random_range(0.1..5.0);
        let l = malthus_with_variability(&AgeDivisionRate::Constant { b }, &VariabilitySpec::two_point(v1, v2), &tol())
            .unwrap();
        worst_two = worst_two.max((l - b * (v1 * v2).sqrt()).abs());
    }
    let o = outcome(
        worst_ref <= 1e-10 && worst_two <= 1e-8,
        format!("max |lambda - b vbar| = {worst_ref:.2e}, max |lambda - b sqrt(v1 v2)| = {worst_two:.2e}"),
    );
    within(t0.elapsed(), 1.0, o)
}

fn constant_hazard_invariance() -> Outcome {
    let t0 = Instant::now();
    let c = 0.8;
    let laws = [gauss_baseline(), VariabilitySpec::Uniform { v_min: 0.5, v_max: 1.5 }, VariabilitySpec::two_point(0.3, 2.1)];
    let mut worst: f64 = 0.0;
    for rho in &laws {
        let l = malthus_general(|_, v| c / v, |_, v| 1.0 / v, rho, &[], &tol()).unwrap();
        worst = worst.max((l - c).abs());
    }
    within(t0.elapsed(), 1.0, outcome(worst <= 1e-9, format!("max |lambda - c| = {worst:.2e} over 3 laws")))
}

/// Table for `B(a) = 2a / (1 - a^2)`, whose age-at-division density is `2a` on `[0, 1]`.
fn linear_density_rate() -> AgeDivisionRate {
    let mut ages: Vec<f64> = (0..400).map(|i| 0.5 * i as f64 / 400.0).collect();
    let mut gap: f64 = 0.5;
    while gap > 1e-3 {
        ages.push(1.0 - gap);
        gap *= 0.985;
    }
    ages.push(0.999);
    let last = *ages.last().unwrap();
    AgeDivisionRate::Tabulated(TabulatedRate::from_fn(ages, |a| 2.0 * a / (1.0 - a * a), last).unwrap())
}

fn sign_results() -> Outcome {
    let t0 = Instant::now();
    let margin = 100.0 * tol().abs_tol;
    let rho = VariabilitySpec::two_point(0.5, 1.5);
    let constant = AgeDivisionRate::Constant { b: 1.0 };
    let dec = malthus_reference(&constant, 1.0, &tol()).unwrap() - malthus_with_variability(&constant, &rho, &tol()).unwrap();
    let witness = linear_density_rate();
    let inc = malthus_with_variability(&witness, &rho, &tol()).unwrap() - malthus_reference(&witness, 1.0, &tol()).unwrap();
    let o = outcome(
        dec > margin && inc > margin,
        format!(
            "decreasing f_B: lambda_vbar - lambda_rho = {dec:.6} (need > {margin:.0e}); \
             increasing f_B: lambda_rho - lambda_vbar = {inc:.6} (need > {margin:.0e})"
        ),
    );
    within(t0.elapsed(), 5.0, o)
}

fn perturbation_order() -> Outcome {
    let t0 = Instant::now();
    let b = AgeDivisionRate::Constant { b: 1.0 };
    let base = VariabilitySpec::two_point(0.5, 1.5);
    let l0 = malthus_reference(&b, 1.0, &tol()).unwrap();
    let d2 = d2lambda_at_zero(&b, &base, &tol()).unwrap();
    let residuals: Vec<f64> = [0.2, 0.1, 0.05, 0.025]
        .iter()
        .map(|&a: &f64| {
            let l = malthus_with_variability(&b, &base.contract(a).unwrap(), &tol()).unwrap();
            (l - l0 - 0.5 * a * a * d2) / (a * a)
        })
        .collect();
    let shrinking = residuals.windows(2).all(|w| w[1].abs() < w[0].abs());
    let o = outcome(
        shrinking && (d2 + 0.25).abs() <= 1e-6,
        format!(
            "d2 = {d2:.9} (closed form -0.25), residual/alpha^2 at alpha 0.2..0.025 = {}",
            residuals.iter().map(|r| format!("{r:.3e}")).collect::<Vec<_>>().join(", ")
        ),
    );
    within(t0.elapsed(), 5.0, o)
}

fn figure1_shape() -> Outcome {
    let t0 = Instant::now();
    let base = gauss_baseline();
    let cv0 = base.cv();
    let alphas: Vec<f64> = (1..=9).map(|k| 0.05 * k as f64 / cv0).collect();
    let mut worst_increase = f64::NEG_INFINITY;
    let mut failures = 0;
    for beta in [0.0, 1.0, 2.0] {
        let rows = cv_curve(&AgeDivisionRate::PowerLag { beta, lag: 1.0 }, &base, &alphas, &tol()).unwrap();
        let lambdas: Vec<f64> = rows.iter().filter_map(|r| r.lambda.clone().ok()).collect();
        failures += rows.len() - lambdas.len();
        for w in lambdas.windows(2) {
            worst_increase = worst_increase.max(w[1] - w[0]);
        }
    }
    let o = outcome(
        failures == 0 && worst_increase <= 1e-8,
        format!("largest step lambda(cv_next) - lambda(cv) = {worst_increase:.3e}, failed solves = {failures}"),
    );
    within(t0.elapsed(), 30.0, o)
}

fn biomass_identity() -> Outcome {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    let mut trees = 0;
    for v in [1.0, 0.5, 1.3] {
        for split in [SplitRule::Symmetric, SplitRule::UniformAsymmetric { eps: 0.1 }, SplitRule::UniformAsymmetric { eps: 0.3 }] {
            let cfg = SimConfig::new(
                SizeDivisionRate::unit_size(1.0, 2.0).unwrap(),
                HeredityKernel::Memoryless(VariabilitySpec::Dirac { v_bar: v }),
                7.0 / v,
            )
            .with_split(split)
            .with_root(2.0, RootRate::Fixed(v));
            for s in 0..5 {
                let tree = simulate_tree(&cfg, RngStream::new(99, s)).unwrap();
                worst = worst.max((malthus_hat_biomass(&tree, cfg.horizon).unwrap() - v).abs());
                trees += 1;
            }
        }
    }
    within(t0.elapsed(), 10.0, outcome(worst <= 1e-12, format!("max |lambda_hat - vbar| = {worst:.2e} over {trees} trees")))
}

fn table1() -> Outcome {
    let exec = executor();
    let rows = [(0.1, 10.5, 0.9985, 0.0018, 0.9999 - 0.9974), (0.4, 11.5, 0.9757, 0.0054, 0.9789 - 0.9717), (0.9, 13.0, 0.8722, 0.0117, 0.8794 - 0.8650)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (alpha, t, paper, slack, paper_width) in rows {
        let est = monte_carlo(&table_config(alpha, t), &Protocol::new(50, 1, EstimatorKind::Biomass), &exec).unwrap();
        let width = est.ci_high - est.ci_low;
        let ok = (est.mean - paper).abs() <= slack && width <= 2.0 * paper_width && width >= 0.5 * paper_width;
        pass &= ok;
        parts.push(format!(
            "alpha {alpha}: mean {:.4} (paper {paper}), CI width {width:.4} (paper {paper_width:.4})",
            est.mean
        ));
    }
    outcome(pass, parts.join("; "))
}

fn table4() -> Outcome {
    let cfg = SimConfig::new(
        SizeDivisionRate::unit_size(1.0, 2.0).unwrap(),
        HeredityKernel::Memoryless(VariabilitySpec::Dirac { v_bar: 1.0 }),
        17.25,
    )
    .with_growth(GrowthLaw::Linear);
    let est = monte_carlo(&cfg, &Protocol::new(50, 1, EstimatorKind::Biomass), &executor()).unwrap();
    outcome(
        (0.6082..=0.6178).contains(&est.mean),
        format!("mean {:.4} (sd {:.4}), required [0.6082, 0.6178]", est.mean, est.sd),
    )
}

fn figure3() -> Outcome {
    let rows = estimator_sd_comparison(&table_config(0.3, 12.0), &[6.0, 8.0, 10.0, 12.0], 50, 1, &executor()).unwrap();
    let pass = rows.iter().all(|r| r.sd_biomass < r.sd_count);
    let detail = rows
        .iter()
        .map(|r| format!("T={}: {:.4} < {:.4}", r.horizon, r.sd_biomass, r.sd_count))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(pass, detail)
}

/// KS distance between `samples` and the law with cumulative hazard
/// `int_{start}^{y} hazard` (hazard in the daughter-size variable).
fn ks_distance<H: Fn(f64) -> f64>(mut samples: Vec<f64>, start: f64, hazard: H, breaks: &[f64]) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let t = Tolerance::quadrature();
    let (mut cum, mut prev, mut d) = (0.0, start, 0.0f64);
    for (i, &y) in samples.iter().enumerate() {
        if y > prev {
            cum += integrate_with_breaks(&hazard, prev, y, breaks, &t).unwrap();
            prev = y;
        }
        let f = 1.0 - (-cum).exp();
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

fn transition_laws() -> Outcome {
    let t0 = Instant::now();
    let (x, v, n) = (1.2, 1.3, 100_000);
    let b = |s: f64| if s >= 1.0 { (s - 1.0) * (s - 1.0) } else { 0.0 };
    let mut rng = RngStream::new(7, 0).generator();
    let unit_size = SizeDivisionRate::unit_size(1.0, 2.0).unwrap();
    let daughters: Vec<f64> = (0..n)
        .map(|_| 0.5 * unit_size.sample_division_size(GrowthLaw::Exponential, x, v, &mut rng).unwrap())
        .collect();
    let d_size = ks_distance(daughters, 0.5 * x, |y| 2.0 * b(2.0 * y), &[0.5]);
    let unit_time = SizeDivisionRate::unit_time(1.0, 2.0).unwrap();
    let daughters: Vec<f64> = (0..n)
        .map(|_| 0.5 * unit_time.sample_division_size(GrowthLaw::Exponential, x, v, &mut rng).unwrap())
        .collect();
    let d_time = ks_distance(daughters, 0.5 * x, |y| b(2.0 * y) / (v * y), &[0.5]);
    let o = outcome(
        d_size < 0.01 && d_time < 0.01,
        format!("KS unit-size (inverse CDF) = {d_size:.4}, unit-time (rejection) = {d_time:.4}"),
    );
    within(t0.elapsed(), 60.0, o)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_malthus"))
            .args(["--threads", threads, "size-mc", "--set", "rows=0.1:10.5,0.4:11.5,0.9:13", "--set", "M=50"])
            .args(["--set", "seed=20240101", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let a = run("1", "t1.csv");
    let b = run("8", "t8.csv");
    let c = run("8", "t8b.csv");
    outcome(a == b && b == c, format!("3 runs (threads 1, 8, 8), {} bytes each, identical = {}", a.len(), a == b && b == c))
}

fn main() {
    let criteria: [Check; 11] = [
        ("closed-form exactness", closed_forms),
        ("constant-hazard invariance", constant_hazard_invariance),
        ("sign results for monotone f_B", sign_results),
        ("second-order expansion", perturbation_order),
        ("CV curve non-increasing", figure1_shape),
        ("biomass identity", biomass_identity),
        ("CV table reproduction (M=50)", table1),
        ("linear growth reference", table4),
        ("biomass vs count spread", figure3),
        ("transition-law oracle", transition_laws),
        ("determinism across thread counts", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {} ({:.1}s)",
            i + 1,
            if result.pass { "PASS" } else { "FAIL" },
            result.detail,
            t0.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
