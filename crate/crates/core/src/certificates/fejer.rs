//! Runtime check of the Lyapunov sequence `H_n` against a reference solution.

use serde::Serialize;

use crate::linalg::DenseVector;
use crate::Scalar;

/// One monitored transition `n -> n + 1`.
#[derive(Debug, Clone, Copy)]
pub struct FejerInput<'a, T: Scalar> {
    pub n: usize,
    pub z_nm1: &'a DenseVector<T>,
    pub z_n: &'a DenseVector<T>,
    pub z_np1: &'a DenseVector<T>,
    pub alpha_nm1: T,
    pub alpha_n: T,
    pub alpha_np1: T,
    pub rho_n: T,
    pub rho_np1: T,
    pub delta_n: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FejerReport<T> {
    pub n: usize,
    pub h_n: T,
    pub h_np1: T,
    /// Permitted increase from a decreasing inertia schedule.
    pub allowance: T,
    pub delta_n: T,
    pub flagged: bool,
}

/// Tracks `H_n = ||z_n - z||^2 - alpha_{n-1} ||z_{n-1} - z||^2 + (alpha_n (1 - alpha_n) rho_n + alpha_n (1 + alpha_n)) ||z_n - z_{n-1}||^2`
/// in the metric of the run.
///
/// For nondecreasing inertia `H_{n+1} <= H_n`. When `alpha_n < alpha_{n-1}` the
/// bound carries the extra term `(alpha_{n-1} - alpha_n) ||z_{n-1} - z||^2`.
/// Violations are recorded, never raised.
#[derive(Debug, Clone)]
pub struct FejerMonitor<T: Scalar> {
    reference: DenseVector<T>,
    slack: T,
    start: usize,
    last: [Option<T>; 2],
    dz_sum: T,
    checks: usize,
    violations: Vec<FejerReport<T>>,
}

pub const FEJER_SLACK: f64 = 1e-10;

impl<T: Scalar> FejerMonitor<T> {
    pub fn new(reference: DenseVector<T>) -> Self {
        Self {
            reference,
            slack: T::lit(FEJER_SLACK),
            start: 0,
            last: [None, None],
            dz_sum: T::zero(),
            checks: 0,
            violations: Vec::new(),
        }
    }

    pub fn with_slack(mut self, slack: T) -> Self {
        self.slack = slack;
        self
    }

    /// Transitions with `n < start` are evaluated but not flagged.
    pub fn with_start(mut self, start: usize) -> Self {
        self.start = start;
        self
    }

    pub fn reference(&self) -> &DenseVector<T> {
        &self.reference
    }

    pub fn h_value(
        &self,
        z_n: &DenseVector<T>,
        z_nm1: &DenseVector<T>,
        alpha_nm1: T,
        alpha_n: T,
        rho_n: T,
        metric_sq: &dyn Fn(&DenseVector<T>) -> T,
    ) -> T {
        let e_n = metric_sq(&(z_n - &self.reference));
        let e_nm1 = metric_sq(&(z_nm1 - &self.reference));
        let d = metric_sq(&(z_n - z_nm1));
        let one = T::one();
        let coef = alpha_n * (one - alpha_n) * rho_n + alpha_n * (one + alpha_n);
        e_n - alpha_nm1 * e_nm1 + coef * d
    }

    /// `metric_sq` evaluates `||v||_S^2`.
    pub fn step(
        &mut self,
        input: FejerInput<'_, T>,
        metric_sq: &dyn Fn(&DenseVector<T>) -> T,
    ) -> FejerReport<T> {
        let h_n = self.h_value(input.z_n, input.z_nm1, input.alpha_nm1, input.alpha_n, input.rho_n, metric_sq);
        let h_np1 = self.h_value(input.z_np1, input.z_n, input.alpha_n, input.alpha_np1, input.rho_np1, metric_sq);
        let drop = input.alpha_nm1 - input.alpha_n;
        let allowance = if drop > T::zero() {
            drop * metric_sq(&(input.z_nm1 - &self.reference))
        } else {
            T::zero()
        };
        self.dz_sum += metric_sq(&(input.z_np1 - input.z_n));
        let eligible = input.n >= self.start && input.delta_n > T::zero() && input.rho_n >= T::zero();
        let flagged = eligible && h_np1 > h_n + allowance + self.slack;
        let report = FejerReport { n: input.n, h_n, h_np1, allowance, delta_n: input.delta_n, flagged };
        if eligible {
            self.checks += 1;
        }
        if flagged {
            self.violations.push(report);
        }
        self.last = [Some(h_n), Some(h_np1)];
        report
    }

    /// Last two `H` values `(H_n, H_{n+1})`.
    pub fn history(&self) -> [Option<T>; 2] {
        self.last
    }

    /// Running `sum ||z_{n+1} - z_n||_S^2`.
    pub fn dz_sum(&self) -> T {
        self.dz_sum
    }

    pub fn checks(&self) -> usize {
        self.checks
    }

    pub fn violations(&self) -> &[FejerReport<T>] {
        &self.violations
    }
}
