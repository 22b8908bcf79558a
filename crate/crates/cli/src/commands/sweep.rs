//! Feasibility and iteration counts over a grid of `(alpha, lambda, t, kappa1, kappa2)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use nfb_core::engine::{run_nfb, RunConfig, RunStatus};
use nfb_core::experiments::{gen_qp, QpDims};
use nfb_core::linalg::DenseVector;
use nfb_core::methods::{build_kernel, initialize_fpdhf, InitInput, MethodName, Scenario};
use nfb_core::operators::SplitProblem;
use nfb_core::schedules::ScheduleSpec;
use nfb_core::{Error, Inequality};

use crate::config::{self, Meta, OutDir};
use crate::error::{CliError, CliResult};
use crate::problems::pd_problem;
use crate::Context;

pub const SECTION: &str = "sweep";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub seed: u64,
    /// `pd` (FPDHF on the seeded primal-dual test problem) or `qp` (FBHF on a constrained least-squares instance).
    pub problem: String,
    /// `(primal, dual, rows of M)` for `pd`; `(N, m, p)` for `qp`.
    pub dims: [usize; 3],
    pub alpha: Vec<f64>,
    pub lambda: Vec<f64>,
    pub t: Vec<f64>,
    pub kappa1: Vec<f64>,
    pub kappa2: Vec<f64>,
    pub max_iters: usize,
    pub rel_tol: f64,
    /// Also run cells that fail the certificate, without validation.
    pub run_infeasible: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            problem: "pd".into(),
            dims: [20, 8, 12],
            alpha: vec![0.0, 0.1, 0.2, 0.3],
            lambda: vec![0.5, 1.0, 1.5],
            t: vec![0.9],
            kappa1: vec![0.5, 0.9],
            kappa2: vec![0.5, 0.9],
            max_iters: 20_000,
            rel_tol: 1e-6,
            run_infeasible: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Cell {
    pub alpha: f64,
    pub lambda: f64,
    pub t: f64,
    pub kappa1: f64,
    pub kappa2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellResult {
    pub cell: Cell,
    pub tau: f64,
    pub sigma: f64,
    pub psi: f64,
    pub lambda_max: f64,
    pub feasible: bool,
    /// Written to CSV as the variant name, which has no commas.
    pub violated: Option<Inequality>,
    pub status: Option<RunStatus>,
    pub iterations: Option<usize>,
    pub final_rel_err: Option<f64>,
    pub elapsed_s: Option<f64>,
}

pub const CSV_HEADER: &str =
    "alpha,lambda,t,kappa1,kappa2,tau,sigma,psi,lambda_max,feasible,violated,status,iterations,final_rel_err,elapsed_s";

fn status_name(s: RunStatus) -> &'static str {
    match s {
        RunStatus::Converged => "converged",
        RunStatus::MaxIters => "max_iters",
        RunStatus::Diverged => "diverged",
    }
}

impl CellResult {
    pub fn csv_line(&self) -> String {
        let c = &self.cell;
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{:e},{:e},{},{},{},{},{},{},{},{}",
            c.alpha,
            c.lambda,
            c.t,
            c.kappa1,
            c.kappa2,
            self.tau,
            self.sigma,
            self.psi,
            self.lambda_max,
            self.feasible,
            opt(self.violated.map(|v| format!("{v:?}"))),
            opt(self.status.map(|s| status_name(s).to_string())),
            opt(self.iterations.map(|n| n.to_string())),
            opt(self.final_rel_err.map(|e| format!("{e:e}"))),
            opt(self.elapsed_s.map(|t| format!("{t:.4}"))),
        )
    }
}

fn grid(cfg: &SweepConfig) -> Vec<Cell> {
    let mut cells = Vec::new();
    for &alpha in &cfg.alpha {
        for &lambda in &cfg.lambda {
            for &t in &cfg.t {
                for &kappa1 in &cfg.kappa1 {
                    for &kappa2 in &cfg.kappa2 {
                        cells.push(Cell { alpha, lambda, t, kappa1, kappa2 });
                    }
                }
            }
        }
    }
    cells
}

/// Certifies the cell and, when admissible (or `run_infeasible`), runs it from `z0`.
pub fn run_cell(
    problem: &SplitProblem<f64>,
    method: MethodName,
    z0: &DenseVector<f64>,
    cell: Cell,
    cfg: &SweepConfig,
) -> CliResult<CellResult> {
    let nan = f64::NAN;
    let mut res = CellResult {
        cell,
        tau: nan,
        sigma: nan,
        psi: nan,
        lambda_max: nan,
        feasible: false,
        violated: None,
        status: None,
        iterations: None,
        final_rel_err: None,
        elapsed_s: None,
    };
    let input = InitInput::for_problem(problem, cell.t, cell.kappa1, cell.kappa2).scenario(
        Scenario::PickAlphaThenLambda,
        Some(0.0),
        None,
    );
    let init = match initialize_fpdhf(&input) {
        Ok(init) => init,
        Err(Error::Infeasible { inequality, .. }) => {
            res.violated = Some(inequality);
            return Ok(res);
        }
        Err(e) => return Err(e.into()),
    };
    res.tau = init.tau;
    res.sigma = init.sigma;
    res.psi = init.psi;
    let cert = init.certificate();
    let schedule = match ScheduleSpec::constant(cell.alpha, cell.lambda) {
        Ok(s) => s,
        Err(_) => {
            res.violated = Some(Inequality::ParameterDomain);
            return Ok(res);
        }
    };
    let report = cert.report(cell.alpha, cell.lambda)?;
    res.lambda_max = report.lambda_interval.hi;
    res.feasible = report.feasible;
    res.violated = report.violated;
    if !res.feasible && !cfg.run_infeasible {
        return Ok(res);
    }
    let kernel = build_kernel(method, problem, init.tau, init.sigma)?;
    let run_cfg = if res.feasible {
        RunConfig::certified(schedule, cert, cfg.max_iters, cfg.rel_tol)
    } else {
        RunConfig::unchecked(schedule, cfg.max_iters, cfg.rel_tol)
    };
    let (_, trace, _) = run_nfb(kernel.as_ref(), z0.clone(), z0.clone(), run_cfg)?;
    res.status = Some(trace.status);
    res.iterations = Some(trace.iterations);
    res.final_rel_err = Some(trace.final_rel_err);
    res.elapsed_s = Some(trace.elapsed_s);
    Ok(res)
}

pub fn run(ctx: &Context) -> CliResult<()> {
    let cfg: SweepConfig = config::section(&ctx.table, SECTION, ctx.seed)?;
    let cells = grid(&cfg);
    if cells.is_empty() {
        return Err(CliError::Config("sweep grid is empty".into()));
    }
    let (problem, method, z0, description) = match cfg.problem.as_str() {
        "pd" => {
            let [primal, dual, rows] = cfg.dims;
            let pd = pd_problem(primal, dual, rows, cfg.seed)?;
            let desc = format!(
                "pd problem: primal {primal}, dual {dual}, M {rows}x{primal}, box [-1,1], l-inf dual ball 0.5, skew D; z0 ~ N(0, I)"
            );
            (pd.problem, MethodName::Fpdhf, pd.z0, desc)
        }
        "qp" => {
            let [n, m, p] = cfg.dims;
            let inst = gen_qp::<f64>(QpDims { n, m, p }, cfg.seed)?;
            let desc = format!("qp instance N={n} m={m} p={p} seed {}; z0 = 0", inst.seed);
            let dim = inst.dim();
            (inst.problem, MethodName::Fbhf, DenseVector::zeros(dim), desc)
        }
        other => return Err(CliError::Config(format!("problem must be pd or qp, got '{other}'"))),
    };
    let results: Vec<CellResult> =
        cells.par_iter().map(|&c| run_cell(&problem, method, &z0, c, &cfg)).collect::<CliResult<_>>()?;

    let provenance = vec![
        description,
        format!("method {method}; eps = t eps_bar, tau = kappa1 chi, sigma = kappa2 (1 - tau / chi) / (tau ||L||^2)"),
        format!("constant alpha and lambda; stop at relative error < {} or {} iterations", cfg.rel_tol, cfg.max_iters),
    ];
    let meta = Meta::new("sweep", SECTION, cfg.seed, &cfg, provenance);
    let out = OutDir::create(&ctx.out)?;
    out.write_config(&meta, SECTION, &cfg)?;
    let mut body = String::from(CSV_HEADER);
    body.push('\n');
    for r in &results {
        body.push_str(&r.csv_line());
        body.push('\n');
    }
    let path = out.write_csv("sweep.csv", &meta, &body)?;
    let feasible = results.iter().filter(|r| r.feasible).count();
    println!("{} cells, {feasible} feasible; wrote {}", results.len(), path.display());

    let diverged: Vec<String> = results
        .iter()
        .filter(|r| r.feasible && r.status == Some(RunStatus::Diverged))
        .map(|r| format!("{:?}", r.cell))
        .collect();
    if !diverged.is_empty() {
        return Err(CliError::Diverged(diverged.join("; ")));
    }
    Ok(())
}
