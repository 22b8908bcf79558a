//! Side-by-side run of the FPDHF kernel and the generic product-space kernel.

use serde::{Deserialize, Serialize};

use nfb_core::engine::Nfb;
use nfb_core::methods::{initialize_fpdhf, kernel_fpdhf, kernel_nfb_product, InitInput, Scenario};
use nfb_core::schedules::{validate_schedule, ScheduleSpec};

use crate::config::{self, Meta, OutDir};
use crate::error::{CliError, CliResult};
use crate::problems::pd_problem;
use crate::Context;

pub const SECTION: &str = "equiv";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquivConfig {
    pub seed: u64,
    pub primal: usize,
    pub dual: usize,
    /// Rows of the least-squares matrix.
    pub rows: usize,
    pub iters: usize,
    pub tol: f64,
    pub t: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub alpha: f64,
    /// Defaults to the midpoint of the admissible interval.
    pub lambda: Option<f64>,
}

impl Default for EquivConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            primal: 20,
            dual: 8,
            rows: 12,
            iters: 200,
            tol: 1e-9,
            t: 0.9,
            kappa1: 0.5,
            kappa2: 0.9,
            alpha: 0.25,
            lambda: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivReport {
    pub iters: usize,
    pub max_deviation: f64,
    pub worst_iteration: usize,
    pub final_deviation: f64,
    pub tau: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub deviations: Vec<f64>,
}

/// Iterates both kernels from the same start and records the sup-norm gap per iteration.
pub fn compare(cfg: &EquivConfig) -> CliResult<EquivReport> {
    let pd = pd_problem(cfg.primal, cfg.dual, cfg.rows, cfg.seed)?;
    let input = InitInput::for_problem(&pd.problem, cfg.t, cfg.kappa1, cfg.kappa2).scenario(
        Scenario::PickAlphaThenLambda,
        Some(cfg.alpha),
        cfg.lambda,
    );
    let init = initialize_fpdhf(&input)?;
    let schedule = ScheduleSpec::constant(init.alpha, init.lambda)?;
    validate_schedule(&schedule, &init.certificate(), cfg.iters.max(1))?;
    let direct = kernel_fpdhf(&pd.problem, init.tau, init.sigma)?;
    let product = kernel_nfb_product(&pd.problem, init.tau, init.sigma)?;
    let mut a = Nfb::new(&direct, pd.z0.clone(), pd.z0.clone(), schedule)?;
    let mut b = Nfb::new(&product, pd.z0.clone(), pd.z0.clone(), schedule)?;
    let mut deviations = Vec::with_capacity(cfg.iters);
    for n in 0..cfg.iters {
        let d = a.step().max_abs_diff(b.step());
        if !d.is_finite() {
            return Err(nfb_core::Error::NonFinite { index: n }.into());
        }
        deviations.push(d);
    }
    let (worst_iteration, max_deviation) =
        deviations.iter().copied().enumerate().fold((0, 0.0), |acc, (i, d)| if d > acc.1 { (i + 1, d) } else { acc });
    Ok(EquivReport {
        iters: cfg.iters,
        max_deviation,
        worst_iteration,
        final_deviation: deviations.last().copied().unwrap_or(0.0),
        tau: init.tau,
        sigma: init.sigma,
        alpha: init.alpha,
        lambda: init.lambda,
        deviations,
    })
}

pub fn run(ctx: &Context) -> CliResult<()> {
    let cfg: EquivConfig = config::section(&ctx.table, SECTION, ctx.seed)?;
    let report = compare(&cfg)?;
    let provenance = vec![
        format!(
            "pd problem: primal {}, dual {}, M {}x{}, box [-1,1], l-inf dual ball 0.5, skew D; z0 ~ N(0, I)",
            cfg.primal, cfg.dual, cfg.rows, cfg.primal
        ),
        format!("tau = {}, sigma = {}, alpha = {}, lambda = {}", report.tau, report.sigma, report.alpha, report.lambda),
    ];
    let meta = Meta::new("equiv-test", SECTION, cfg.seed, &cfg, provenance);
    let out = OutDir::create(&ctx.out)?;
    out.write_config(&meta, SECTION, &cfg)?;
    let mut body = String::from("n,max_abs_deviation\n");
    for (i, d) in report.deviations.iter().enumerate() {
        body.push_str(&format!("{},{d:e}\n", i + 1));
    }
    out.write_csv("equiv.csv", &meta, &body)?;
    let pass = report.max_deviation < cfg.tol;
    let doc = serde_json::json!({
        "meta": meta,
        "iters": report.iters,
        "max_deviation": report.max_deviation,
        "worst_iteration": report.worst_iteration,
        "final_deviation": report.final_deviation,
        "tol": cfg.tol,
        "pass": pass,
    });
    out.write_json("equiv.json", &doc)?;
    println!(
        "max deviation {:e} over {} iterations (worst at n = {}), tolerance {:e}: {}",
        report.max_deviation,
        report.iters,
        report.worst_iteration,
        cfg.tol,
        if pass { "PASS" } else { "FAIL" }
    );
    if !pass {
        return Err(CliError::CheckFailed(format!("max deviation {:e} >= {:e}", report.max_deviation, cfg.tol)));
    }
    Ok(())
}
