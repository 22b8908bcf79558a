//! Least squares over the box with homogeneous linear inequality constraints:
//!
//! ```text
//! min 1/2 ||M x - b||^2  s.t.  x in [0,1]^N,  R x <= 0
//! ```
//!
//! solved as the inclusion `0 in A(x,u) + C(x,u) + D(x,u)` on `R^N x R^p` with
//! `A = N_box x N_{u >= 0}`, `C = (M^T(Mx - b), 0)`, `D = (R^T u, -R x)`.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{run_nfb, IterateTrace, RunConfig, RunStatus};
use crate::error::{Error, Result};
use crate::linalg::{op_norm_estimate, DenseMatrix, DenseVector};
use crate::methods::{initialize_fpdhf, kernel_fbhf, InitInput, InitResult, Scenario};
use crate::operators::{
    BlockResolvent, BoxProjection, LeastSquaresGradient, NonnegProjection, PrimalLeastSquares,
    SkewConstraintMap, SplitProblem,
};
use crate::schedules::{AlphaFamily, ScheduleSpec};
use crate::Scalar;

use super::rng::{normal_matrix, normal_vector, rng_from_seed};

/// Power-method iterations used for `||M||` and `||R||`.
pub const NORM_ITERS: usize = 20_000;
/// Smallest admissible `min pivot / max pivot` of the Cholesky factor of `M M^T`.
pub const RANK_TOL: f64 = 1e-10;
/// Seeds tried before giving up on a full-rank `M`.
pub const MAX_RESAMPLES: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QpDims {
    pub n: usize,
    pub m: usize,
    pub p: usize,
}

impl QpDims {
    pub fn check(&self) -> Result<()> {
        if self.m == 0 || self.p == 0 || self.n < self.m {
            return Err(Error::invalid(format!(
                "need N >= m >= 1 and p >= 1, got (N, m, p) = ({}, {}, {})",
                self.n, self.m, self.p
            )));
        }
        Ok(())
    }
}

/// A generated instance together with the constants the methods need.
#[derive(Clone)]
pub struct QpInstance<T: Scalar> {
    pub dims: QpDims,
    /// Seed actually used (after any full-rank resampling).
    pub seed: u64,
    pub m: DenseMatrix<T>,
    pub b: DenseVector<T>,
    pub r: DenseMatrix<T>,
    pub norm_m: T,
    pub norm_r: T,
    pub problem: SplitProblem<T>,
}

impl<T: Scalar> QpInstance<T> {
    /// `beta = ||M||^-2`.
    pub fn beta(&self) -> T {
        self.problem.beta()
    }
    /// `zeta = ||R||`.
    pub fn zeta(&self) -> T {
        self.problem.zeta()
    }
    pub fn dim(&self) -> usize {
        self.dims.n + self.dims.p
    }

    /// `1/2 ||M x - b||^2` for the primal block of `z`.
    pub fn objective(&self, z: &DenseVector<T>) -> T {
        let (x, _) = z.split_at(self.dims.n);
        let r = &self.m.matvec(&x).expect("dims") - &self.b;
        T::lit(0.5) * r.norm_sq()
    }

    /// Natural residual `||z - J_{tau A}(z - tau (C + D) z)|| / tau`; zero exactly at solutions.
    pub fn kkt_residual(&self, z: &DenseVector<T>, tau: T) -> T {
        let mut g = self.problem.cocoercive().expect("C present").eval(z);
        g += &self.problem.lipschitz().expect("D present").eval(z);
        let mut arg = z.clone();
        arg.axpy(-tau, &g);
        let proj = self.problem.resolvent_a().resolve(&arg, tau);
        proj.dist_sq(z).sqrt() / tau
    }
}

/// Samples `M` (m x N), `R` (p x N) with i.i.d. standard normal entries and
/// `b = (N / sqrt(m)) g` with `g` standard normal.
///
/// The scaling puts `b` far outside `M([0,1]^N)`, so constraints are active
/// and the minimizer is generically unique even though `M` has a nontrivial
/// kernel when `N > m`. `M` must have full row rank; otherwise the next seed
/// is tried.
pub fn gen_qp<T: Scalar>(dims: QpDims, seed: u64) -> Result<QpInstance<T>> {
    dims.check()?;
    for attempt in 0..MAX_RESAMPLES {
        let used = seed.wrapping_add(attempt);
        let mut rng = rng_from_seed(used);
        let m: DenseMatrix<T> = normal_matrix(&mut rng, dims.m, dims.n);
        let r: DenseMatrix<T> = normal_matrix(&mut rng, dims.p, dims.n);
        let g: DenseVector<T> = normal_vector(&mut rng, dims.m);
        let full_rank = m
            .gram_rows()
            .cholesky_min_pivot_ratio()
            .is_some_and(|ratio| ratio.to_f64_lossy() > RANK_TOL);
        if !full_rank {
            continue;
        }
        let b = g.scaled(T::of_usize(dims.n) / T::of_usize(dims.m).sqrt());
        let norm_m = op_norm_estimate(&m, dims.n, NORM_ITERS, used)?;
        let norm_r = op_norm_estimate(&r, dims.n, NORM_ITERS, used.wrapping_add(1))?;
        let c = PrimalLeastSquares {
            inner: LeastSquaresGradient::new(m.clone(), b.clone(), norm_m)?,
            dual_dim: dims.p,
        };
        let d = SkewConstraintMap { r: r.clone(), norm_r };
        let a = BlockResolvent {
            split: dims.n,
            first: Arc::new(BoxProjection { lo: T::zero(), hi: T::one() }),
            second: Arc::new(NonnegProjection),
        };
        let problem = SplitProblem::new(dims.n + dims.p, Arc::new(a))
            .with_cocoercive(Arc::new(c))?
            .with_lipschitz(Arc::new(d))?;
        return Ok(QpInstance { dims, seed: used, m, b, r, norm_m, norm_r, problem });
    }
    Err(Error::invalid(format!("no full-rank M found in {MAX_RESAMPLES} seeds from {seed}")))
}

/// How the inertia is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaChoice {
    Schedule(AlphaFamily),
    /// Constant `c * alpha_bar(psi, lambda)`.
    BarFraction(f64),
}

/// How the relaxation is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaChoice {
    Value(f64),
    /// `c * psi`.
    PsiFraction(f64),
}

impl AlphaChoice {
    /// Accepts schedule names plus `bar:c`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().strip_prefix("bar:") {
            Some(c) => {
                let c: f64 = c.trim().parse().map_err(|_| Error::Parse(format!("bad fraction in '{s}'")))?;
                if !(0.0..1.0).contains(&c) {
                    return Err(Error::invalid(format!("alpha_bar fraction {c} outside [0, 1[")));
                }
                Ok(AlphaChoice::BarFraction(c))
            }
            None => Ok(AlphaChoice::Schedule(s.parse()?)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            AlphaChoice::Schedule(f) => f.to_string(),
            AlphaChoice::BarFraction(c) => format!("bar:{c}"),
        }
    }
}

impl LambdaChoice {
    /// Accepts a number or `psi:c`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad relaxation '{s}'")));
        match s.strip_prefix("psi:") {
            Some(c) => Ok(LambdaChoice::PsiFraction(num(c)?)),
            None => Ok(LambdaChoice::Value(num(s)?)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            LambdaChoice::Value(v) => format!("{v}"),
            LambdaChoice::PsiFraction(c) => format!("psi:{c}"),
        }
    }

    pub fn resolve(&self, psi: f64) -> f64 {
        match *self {
            LambdaChoice::Value(v) => v,
            LambdaChoice::PsiFraction(c) => c * psi,
        }
    }
}

/// One algorithmic variant of the benchmark.
#[derive(Debug, Clone, Serialize)]
pub struct QpVariant {
    pub label: String,
    pub alpha: AlphaChoice,
    pub lambda: LambdaChoice,
    pub t: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct QpRunSettings {
    pub max_iters: usize,
    pub rel_tol: f64,
}

impl Default for QpRunSettings {
    fn default() -> Self {
        Self { max_iters: 1_000_000, rel_tol: 1e-6 }
    }
}

/// FBHF step sizes `eps = t eps_bar`, `tau = t chi` (so `tau = 2 beta eps`) and the resolved schedule.
pub fn qp_parameters<T: Scalar>(inst: &QpInstance<T>, variant: &QpVariant) -> Result<(InitResult<T>, ScheduleSpec)> {
    let t = T::lit(variant.t);
    let base = InitInput::for_problem(&inst.problem, t, t, T::zero());
    let probe = initialize_fpdhf(&base)?;
    let psi = probe.psi.to_f64_lossy();
    let lambda = variant.lambda.resolve(psi);
    let init = match variant.alpha {
        AlphaChoice::BarFraction(c) => {
            let bar = probe.certificate().alpha_max(T::lit(lambda));
            let alpha = T::lit(c) * bar.value;
            initialize_fpdhf(&base.scenario(Scenario::PickLambdaThenAlpha, Some(T::lit(lambda)), Some(alpha)))?
        }
        AlphaChoice::Schedule(f) => initialize_fpdhf(&base.scenario(
            Scenario::PickAlphaThenLambda,
            Some(T::lit(f.limit())),
            Some(T::lit(lambda)),
        ))?,
    };
    let family = match variant.alpha {
        AlphaChoice::Schedule(f) => f,
        AlphaChoice::BarFraction(_) => AlphaFamily::Constant { alpha: init.alpha.to_f64_lossy() },
    };
    Ok((init, ScheduleSpec::new(family, lambda)?))
}

/// Outcome of one FBHF run on one instance.
#[derive(Debug, Clone, Serialize)]
pub struct QpRun {
    pub seed: u64,
    pub status: RunStatus,
    pub iterations: usize,
    pub elapsed_s: f64,
    pub final_rel_err: f64,
    pub tau: f64,
    pub alpha0: f64,
    pub lambda: f64,
}

/// Runs certified FBHF from `z_0 = z_{-1} = 0`.
pub fn solve_qp<T: Scalar>(
    inst: &QpInstance<T>,
    variant: &QpVariant,
    settings: &QpRunSettings,
) -> Result<(DenseVector<T>, IterateTrace, QpRun)> {
    let (init, schedule) = qp_parameters(inst, variant)?;
    let kernel = kernel_fbhf(&inst.problem, init.tau)?;
    let cfg = RunConfig::certified(schedule, init.certificate(), settings.max_iters, settings.rel_tol);
    let zero = DenseVector::zeros(inst.dim());
    let start = Instant::now();
    let (z, trace, _) = run_nfb(&kernel, zero.clone(), zero, cfg)?;
    let run = QpRun {
        seed: inst.seed,
        status: trace.status,
        iterations: trace.iterations,
        elapsed_s: start.elapsed().as_secs_f64(),
        final_rel_err: trace.final_rel_err,
        tau: init.tau.to_f64_lossy(),
        alpha0: schedule.alpha.at(0),
        lambda: schedule.lambda,
    };
    Ok((z, trace, run))
}

/// One benchmark row: averages over seeded realizations for one `(N, m, p)` and variant.
#[derive(Debug, Clone, Serialize)]
pub struct QpBenchRow {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub algorithm: String,
    pub alpha: String,
    pub lambda: String,
    pub t: f64,
    pub runs: usize,
    pub failures: usize,
    pub diverged: usize,
    pub mean_iters_all: f64,
    pub mean_time_all: f64,
    pub mean_iters_converged: f64,
    pub mean_time_converged: f64,
}

impl QpBenchRow {
    pub const CSV_HEADER: &'static str = "N,m,p,algorithm,alpha,lambda,t,runs,failures,diverged,IN_all,T_all,IN_converged,T_converged";

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{:.1},{:.4},{:.1},{:.4}",
            self.n,
            self.m,
            self.p,
            self.algorithm,
            self.alpha,
            self.lambda,
            self.t,
            self.runs,
            self.failures,
            self.diverged,
            self.mean_iters_all,
            self.mean_time_all,
            self.mean_iters_converged,
            self.mean_time_converged
        )
    }
}

pub fn bench_csv(rows: &[QpBenchRow]) -> String {
    let mut out = String::from(QpBenchRow::CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, c) = v.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if c == 0 {
        f64::NAN
    } else {
        s / c as f64
    }
}

/// Runs every variant on `realizations` seeded instances per grid cell.
///
/// Instances run in parallel; results are sorted by seed before averaging.
/// A failure is a run that stopped at `max_iters`; it counts in the all-runs
/// average and is excluded from the converged-only average.
pub fn run_qp_bench(
    grid: &[QpDims],
    variants: &[QpVariant],
    realizations: usize,
    base_seed: u64,
    settings: &QpRunSettings,
) -> Result<Vec<QpBenchRow>> {
    if grid.is_empty() || variants.is_empty() || realizations == 0 {
        return Err(Error::invalid("benchmark grid, variants and realizations must be nonempty"));
    }
    for d in grid {
        d.check()?;
    }
    let mut rows = Vec::new();
    for &dims in grid {
        let seeds: Vec<u64> = (0..realizations as u64).map(|k| base_seed + 1000 * k).collect();
        let instances: Vec<QpInstance<f64>> =
            seeds.par_iter().map(|&s| gen_qp(dims, s)).collect::<Result<_>>()?;
        for v in variants {
            let mut runs: Vec<QpRun> = instances
                .par_iter()
                .map(|inst| solve_qp(inst, v, settings).map(|(_, _, run)| run))
                .collect::<Result<_>>()?;
            runs.sort_by_key(|r| r.seed);
            let converged: Vec<&QpRun> = runs.iter().filter(|r| r.status == RunStatus::Converged).collect();
            rows.push(QpBenchRow {
                n: dims.n,
                m: dims.m,
                p: dims.p,
                algorithm: v.label.clone(),
                alpha: v.alpha.label(),
                lambda: v.lambda.label(),
                t: v.t,
                runs: runs.len(),
                failures: runs.iter().filter(|r| r.status == RunStatus::MaxIters).count(),
                diverged: runs.iter().filter(|r| r.status == RunStatus::Diverged).count(),
                mean_iters_all: mean(runs.iter().map(|r| r.iterations as f64)),
                mean_time_all: mean(runs.iter().map(|r| r.elapsed_s)),
                mean_iters_converged: mean(converged.iter().map(|r| r.iterations as f64)),
                mean_time_converged: mean(converged.iter().map(|r| r.elapsed_s)),
            });
        }
    }
    Ok(rows)
}

/// The variants of the published comparison: plain, constant inertia at
/// fractions of `alpha_bar`, the three decreasing families, and relaxed-inertial.
pub fn default_variants() -> Vec<QpVariant> {
    use crate::schedules::{DEC1, DEC2, DEC3};
    let v = |label: &str, alpha: AlphaChoice, lambda: LambdaChoice, t: f64| QpVariant {
        label: label.to_string(),
        alpha,
        lambda,
        t,
    };
    vec![
        v("FBHF", AlphaChoice::Schedule(AlphaFamily::Constant { alpha: 0.0 }), LambdaChoice::Value(1.0), 0.999),
        v("FBHFI", AlphaChoice::BarFraction(0.9999), LambdaChoice::Value(1.0), 0.8),
        v("FBHFI", AlphaChoice::BarFraction(0.9999), LambdaChoice::Value(1.0), 0.9),
        v("FBHFI", AlphaChoice::BarFraction(0.9999), LambdaChoice::Value(1.0), 0.999),
        v("FBHFID", AlphaChoice::Schedule(DEC1), LambdaChoice::Value(1.0), 0.999),
        v("FBHFID", AlphaChoice::Schedule(DEC2), LambdaChoice::Value(1.0), 0.999),
        v("FBHFID", AlphaChoice::Schedule(DEC3), LambdaChoice::Value(1.0), 0.999),
        v("FBHFRI", AlphaChoice::BarFraction(0.9999), LambdaChoice::PsiFraction(0.95), 0.9),
        v("FBHFRI", AlphaChoice::BarFraction(0.9999), LambdaChoice::PsiFraction(0.9999), 0.9),
    ]
}
