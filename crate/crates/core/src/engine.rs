//! The inertial and relaxed nonlinear forward-backward loop.
//!
//! ```text
//! y_n     = z_n + alpha_n (z_n - z_{n-1})
//! x_n     = (M + A)^-1 (M - C) y_n
//! w_{n+1} = y_n - gamma S^-1 (M y_n - M x_n)
//! z_{n+1} = lambda_n w_{n+1} + (1 - lambda_n) y_n
//! ```
//!
//! Kernels supply the middle two lines; the engine owns inertia, relaxation,
//! stopping and tracing.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::certificates::{delta_n, Certificate, FejerInput, FejerMonitor};
use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use crate::schedules::{validate_schedule, ScheduleSpec};
use crate::Scalar;

/// One step of a concrete splitting method, viewed as a warped resolvent.
pub trait MethodKernel<T: Scalar>: Send + Sync {
    fn name(&self) -> &'static str;

    /// Dimension of the (flattened) iterate.
    fn dim(&self) -> usize;

    /// `(x_n, w_{n+1})` from `y_n`. Must be deterministic; zeros of `A + C` are fixed.
    fn warp_step(&self, y: &DenseVector<T>, n: usize) -> (DenseVector<T>, DenseVector<T>);

    /// `<a, S b>`.
    fn metric_weight(&self, a: &DenseVector<T>, b: &DenseVector<T>) -> T;

    fn metric_norm_sq(&self, a: &DenseVector<T>) -> T {
        self.metric_weight(a, a)
    }
}

impl<T: Scalar, K: MethodKernel<T> + ?Sized> MethodKernel<T> for Box<K> {
    fn name(&self) -> &'static str {
        (**self).name()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn warp_step(&self, y: &DenseVector<T>, n: usize) -> (DenseVector<T>, DenseVector<T>) {
        (**self).warp_step(y, n)
    }
    fn metric_weight(&self, a: &DenseVector<T>, b: &DenseVector<T>) -> T {
        (**self).metric_weight(a, b)
    }
}

/// `||z_new - z_old|| / max(||z_old||, 1)` in the Euclidean norm.
pub fn relative_error<T: Scalar>(z_new: &DenseVector<T>, z_old: &DenseVector<T>) -> T {
    z_new.dist_sq(z_old).sqrt() / z_old.norm().max(T::one())
}

pub const DEFAULT_TRACE_EVERY: usize = 100;
/// Every iteration up to this index is recorded.
pub const DENSE_TRACE_PREFIX: usize = 100;
/// Horizon used when the engine validates a schedule itself.
pub const VALIDATION_HORIZON_CAP: usize = 1_000_000;

#[derive(Debug, Clone)]
enum Validation<T: Scalar> {
    Certified(Certificate<T>),
    Skipped,
}

#[derive(Debug, Clone)]
pub struct RunConfig<T: Scalar> {
    pub max_iters: usize,
    pub rel_tol: f64,
    pub schedule: ScheduleSpec,
    pub trace_every: usize,
    pub monitor: Option<FejerMonitor<T>>,
    validation: Validation<T>,
}

impl<T: Scalar> RunConfig<T> {
    /// The schedule is validated against `cert` before the run starts.
    pub fn certified(schedule: ScheduleSpec, cert: Certificate<T>, max_iters: usize, rel_tol: f64) -> Self {
        Self {
            max_iters,
            rel_tol,
            schedule,
            trace_every: DEFAULT_TRACE_EVERY,
            monitor: None,
            validation: Validation::Certified(cert),
        }
    }

    /// Runs without any admissibility check.
    pub fn unchecked(schedule: ScheduleSpec, max_iters: usize, rel_tol: f64) -> Self {
        Self {
            max_iters,
            rel_tol,
            schedule,
            trace_every: DEFAULT_TRACE_EVERY,
            monitor: None,
            validation: Validation::Skipped,
        }
    }

    pub fn with_trace_every(mut self, every: usize) -> Self {
        self.trace_every = every;
        self
    }

    /// Attaches a Lyapunov monitor; requires a certified config.
    pub fn with_monitor(mut self, monitor: FejerMonitor<T>) -> Self {
        self.monitor = Some(monitor);
        self
    }

    pub fn certificate(&self) -> Option<&Certificate<T>> {
        match &self.validation {
            Validation::Certified(c) => Some(c),
            Validation::Skipped => None,
        }
    }

    pub fn is_validated(&self) -> bool {
        matches!(self.validation, Validation::Certified(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    MaxIters,
    Diverged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    pub n: usize,
    pub rel_err: f64,
    /// `||z_{n+1} - z_n||_S^2`.
    pub dz_sq: f64,
    /// `H_{n+1}` when a monitor is attached.
    pub h: Option<f64>,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IterateTrace {
    pub method: String,
    pub schedule: String,
    pub records: Vec<TraceRecord>,
    pub status: RunStatus,
    /// Number of completed updates `z_n -> z_{n+1}`.
    pub iterations: usize,
    pub final_rel_err: f64,
    pub dz_sum: f64,
    pub elapsed_s: f64,
    pub fejer_checks: usize,
    pub fejer_violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceSummary {
    pub method: String,
    pub schedule: String,
    pub status: RunStatus,
    pub iterations: usize,
    pub final_rel_err: f64,
    pub dz_sum: f64,
    pub elapsed_s: f64,
    pub fejer_checks: usize,
    pub fejer_violations: usize,
}

impl IterateTrace {
    pub fn summary(&self) -> TraceSummary {
        TraceSummary {
            method: self.method.clone(),
            schedule: self.schedule.clone(),
            status: self.status,
            iterations: self.iterations,
            final_rel_err: self.final_rel_err,
            dz_sum: self.dz_sum,
            elapsed_s: self.elapsed_s,
            fejer_checks: self.fejer_checks,
            fejer_violations: self.fejer_violations,
        }
    }

    /// Columns `n,rel_err,dz_sq[,H_n],elapsed_s`.
    pub fn to_csv(&self) -> String {
        let with_h = self.records.iter().any(|r| r.h.is_some());
        let mut out = String::from(if with_h { "n,rel_err,dz_sq,H_n,elapsed_s\n" } else { "n,rel_err,dz_sq,elapsed_s\n" });
        for r in &self.records {
            let _ = write!(out, "{},{:e},{:e}", r.n, r.rel_err, r.dz_sq);
            if with_h {
                let _ = match r.h {
                    Some(h) => write!(out, ",{h:e}"),
                    None => write!(out, ","),
                };
            }
            let _ = writeln!(out, ",{:.6}", r.elapsed_s);
        }
        out
    }
}

/// Stepwise driver; [`run_nfb`] is a loop over [`Nfb::step`].
pub struct Nfb<'k, T: Scalar, K: MethodKernel<T> + ?Sized> {
    kernel: &'k K,
    schedule: ScheduleSpec,
    z: DenseVector<T>,
    z_prev: DenseVector<T>,
    n: usize,
}

/// Result of one update.
pub struct Step<T: Scalar> {
    pub n: usize,
    pub y: DenseVector<T>,
    pub x: DenseVector<T>,
    pub z_next: DenseVector<T>,
}

impl<'k, T: Scalar, K: MethodKernel<T> + ?Sized> Nfb<'k, T, K> {
    pub fn new(kernel: &'k K, z0: DenseVector<T>, zm1: DenseVector<T>, schedule: ScheduleSpec) -> Result<Self> {
        z0.check_len(kernel.dim())?;
        zm1.check_len(kernel.dim())?;
        Ok(Self { kernel, schedule, z: z0, z_prev: zm1, n: 0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn z(&self) -> &DenseVector<T> {
        &self.z
    }
    pub fn z_prev(&self) -> &DenseVector<T> {
        &self.z_prev
    }

    /// Computes `z_{n+1}` without committing it.
    pub fn propose(&self) -> Step<T> {
        let n = self.n;
        let alpha: T = self.schedule.alpha_at(n);
        let lambda: T = self.schedule.lambda_at(n);
        let y = self.z.zip_map(&self.z_prev, |z, zp| z + alpha * (z - zp));
        let (x, w) = self.kernel.warp_step(&y, n);
        let one_minus = T::one() - lambda;
        let z_next = w.zip_map(&y, |w, y| lambda * w + one_minus * y);
        Step { n, y, x, z_next }
    }

    pub fn commit(&mut self, z_next: DenseVector<T>) {
        self.z_prev = std::mem::replace(&mut self.z, z_next);
        self.n += 1;
    }

    /// Advances one iteration and returns the new iterate.
    pub fn step(&mut self) -> &DenseVector<T> {
        let s = self.propose();
        self.commit(s.z_next);
        &self.z
    }

    pub fn into_iterates(self) -> (DenseVector<T>, DenseVector<T>) {
        (self.z, self.z_prev)
    }
}

/// Runs the inertial-relaxed iteration until the relative error drops below
/// `cfg.rel_tol`, `cfg.max_iters` is reached, or an iterate stops being finite.
///
/// Returns the last finite iterate, the trace and the monitor (if any).
pub fn run_nfb<T: Scalar, K: MethodKernel<T> + ?Sized>(
    kernel: &K,
    z0: DenseVector<T>,
    zm1: DenseVector<T>,
    cfg: RunConfig<T>,
) -> Result<(DenseVector<T>, IterateTrace, Option<FejerMonitor<T>>)> {
    if !(cfg.rel_tol > 0.0) {
        return Err(Error::invalid(format!("rel_tol = {} must be positive", cfg.rel_tol)));
    }
    if cfg.trace_every == 0 {
        return Err(Error::invalid("trace_every must be positive"));
    }
    let RunConfig { max_iters, rel_tol, schedule, trace_every, mut monitor, validation } = cfg;
    let cert = match validation {
        Validation::Certified(c) => {
            validate_schedule(&schedule, &c, max_iters.clamp(1, VALIDATION_HORIZON_CAP))?;
            Some(c)
        }
        Validation::Skipped => None,
    };
    let rho: Option<T> = cert.as_ref().map(|c| c.rho(T::lit(schedule.lambda)));
    if monitor.is_some() && rho.is_none() {
        return Err(Error::invalid("the Fejér monitor needs a certified run"));
    }
    if let Some(m) = &monitor {
        m.reference().check_len(kernel.dim())?;
    }

    let mut it = Nfb::new(kernel, z0, zm1, schedule)?;
    let start = Instant::now();
    let mut records = Vec::new();
    let mut status = RunStatus::MaxIters;
    let mut final_rel_err = f64::NAN;
    let mut dz_sum = 0.0f64;
    let mut iterations = 0;

    for n in 0..max_iters {
        let step = it.propose();
        if !step.z_next.is_finite() {
            status = RunStatus::Diverged;
            break;
        }
        let rel = relative_error(&step.z_next, it.z()).to_f64_lossy();
        let diff = &step.z_next - it.z();
        let dz_sq = kernel.metric_norm_sq(&diff).to_f64_lossy();
        dz_sum += dz_sq;

        let mut h = None;
        if let (Some(m), Some(rho)) = (monitor.as_mut(), rho) {
            let a_nm1: T = schedule.alpha_at(n.saturating_sub(1));
            let a_n: T = schedule.alpha_at(n);
            let a_np1: T = schedule.alpha_at(n + 1);
            let report = m.step(
                FejerInput {
                    n,
                    z_nm1: it.z_prev(),
                    z_n: it.z(),
                    z_np1: &step.z_next,
                    alpha_nm1: a_nm1,
                    alpha_n: a_n,
                    alpha_np1: a_np1,
                    rho_n: rho,
                    rho_np1: rho,
                    delta_n: delta_n(a_n, a_np1, rho, rho),
                },
                &|v| kernel.metric_norm_sq(v),
            );
            h = Some(report.h_np1.to_f64_lossy());
        }

        it.commit(step.z_next);
        iterations = n + 1;
        final_rel_err = rel;
        let converged = rel < rel_tol;
        let last = converged || n + 1 == max_iters;
        if n <= DENSE_TRACE_PREFIX || n % trace_every == 0 || last {
            records.push(TraceRecord { n, rel_err: rel, dz_sq, h, elapsed_s: start.elapsed().as_secs_f64() });
        }
        if converged {
            status = RunStatus::Converged;
            break;
        }
    }

    let (fejer_checks, fejer_violations) =
        monitor.as_ref().map_or((0, 0), |m| (m.checks(), m.violations().len()));
    let trace = IterateTrace {
        method: kernel.name().to_string(),
        schedule: schedule.name(),
        records,
        status,
        iterations,
        final_rel_err,
        dz_sum,
        elapsed_s: start.elapsed().as_secs_f64(),
        fejer_checks,
        fejer_violations,
    };
    let (z, _) = it.into_iterates();
    Ok((z, trace, monitor))
}
