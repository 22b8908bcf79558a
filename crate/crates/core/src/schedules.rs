//! Inertia and relaxation sequences.
//!
//! Schedules are evaluated in `f64` and cast to the working scalar so that
//! monotonicity checks do not depend on the iteration precision.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::certificates::{delta_constant, delta_n, phi_value, Certificate};
use crate::error::{Error, Inequality, Result};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    Constant,
    NondecreasingToLimit,
    DecreasingSummable,
}

/// Inertia family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum AlphaFamily {
    /// `alpha_n = a`.
    Constant { alpha: f64 },
    /// `alpha_n = a (n + 1) / (n + 2)`, increasing to `a`.
    Nondecreasing { limit: f64 },
    /// `alpha_n = 1 / (c0 + c1 n (ln n)^e)`, with the log factor taken as 0 for `n <= 1`.
    Log { c0: f64, c1: f64, exponent: f64 },
}

pub const DEC1: AlphaFamily = AlphaFamily::Log { c0: 1.0, c1: 1e-3, exponent: 1.001 };
pub const DEC2: AlphaFamily = AlphaFamily::Log { c0: 3.0, c1: 1e-5, exponent: 1.00001 };
pub const DEC3: AlphaFamily = AlphaFamily::Log { c0: 9.0, c1: 1e-5, exponent: 1.00001 };

/// Inertia family plus a constant relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScheduleSpec {
    pub alpha: AlphaFamily,
    pub lambda: f64,
}

impl AlphaFamily {
    pub fn kind(&self) -> ScheduleKind {
        match self {
            AlphaFamily::Constant { .. } => ScheduleKind::Constant,
            AlphaFamily::Nondecreasing { .. } => ScheduleKind::NondecreasingToLimit,
            AlphaFamily::Log { .. } => ScheduleKind::DecreasingSummable,
        }
    }

    /// `lim alpha_n`.
    pub fn limit(&self) -> f64 {
        match *self {
            AlphaFamily::Constant { alpha } => alpha,
            AlphaFamily::Nondecreasing { limit } => limit,
            AlphaFamily::Log { .. } => 0.0,
        }
    }

    pub fn at(&self, n: usize) -> f64 {
        match *self {
            AlphaFamily::Constant { alpha } => alpha,
            AlphaFamily::Nondecreasing { limit } => limit * (n as f64 + 1.0) / (n as f64 + 2.0),
            AlphaFamily::Log { c0, c1, exponent } => {
                let log_factor = if n <= 1 { 0.0 } else { (n as f64).ln().powf(exponent) };
                1.0 / (c0 + c1 * n as f64 * log_factor)
            }
        }
    }

    fn check(&self) -> Result<()> {
        let ok = match *self {
            AlphaFamily::Constant { alpha } => (0.0..1.0).contains(&alpha),
            AlphaFamily::Nondecreasing { limit } => (0.0..1.0).contains(&limit),
            AlphaFamily::Log { c0, c1, exponent } => c0 >= 1.0 && c1 > 0.0 && exponent > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("schedule parameters out of range: {self}")))
        }
    }
}

impl fmt::Display for AlphaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AlphaFamily::Constant { alpha } => write!(f, "const:{alpha}"),
            AlphaFamily::Nondecreasing { limit } => write!(f, "nondec:{limit}"),
            fam if fam == DEC1 => f.write_str("dec1"),
            fam if fam == DEC2 => f.write_str("dec2"),
            fam if fam == DEC3 => f.write_str("dec3"),
            AlphaFamily::Log { c0, c1, exponent } => write!(f, "custom:{c0},{c1},{exponent}"),
        }
    }
}

impl FromStr for AlphaFamily {
    type Err = Error;

    /// Accepts `const:a`, `nondec:a`, `dec1`, `dec2`, `dec3`, `custom:c0,c1,e`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |t: &str| -> Result<f64> {
            t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{t}' in schedule '{s}'")))
        };
        let fam = match s.split_once(':') {
            None => match s {
                "dec1" => DEC1,
                "dec2" => DEC2,
                "dec3" => DEC3,
                _ => return Err(Error::Parse(format!("unknown schedule '{s}'"))),
            },
            Some(("const", a)) => AlphaFamily::Constant { alpha: num(a)? },
            Some(("nondec", a)) => AlphaFamily::Nondecreasing { limit: num(a)? },
            Some(("custom", rest)) => {
                let parts: Vec<&str> = rest.split(',').collect();
                if parts.len() != 3 {
                    return Err(Error::Parse(format!("custom schedule needs c0,c1,e: '{s}'")));
                }
                AlphaFamily::Log { c0: num(parts[0])?, c1: num(parts[1])?, exponent: num(parts[2])? }
            }
            Some(_) => return Err(Error::Parse(format!("unknown schedule '{s}'"))),
        };
        fam.check()?;
        Ok(fam)
    }
}

impl ScheduleSpec {
    pub fn new(alpha: AlphaFamily, lambda: f64) -> Result<Self> {
        alpha.check()?;
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid(format!("lambda = {lambda} must be positive")));
        }
        Ok(Self { alpha, lambda })
    }

    pub fn parse(alpha: &str, lambda: f64) -> Result<Self> {
        Self::new(alpha.parse()?, lambda)
    }

    pub fn constant(alpha: f64, lambda: f64) -> Result<Self> {
        Self::new(AlphaFamily::Constant { alpha }, lambda)
    }

    pub fn kind(&self) -> ScheduleKind {
        self.alpha.kind()
    }

    pub fn name(&self) -> String {
        self.alpha.to_string()
    }

    pub fn alpha_at<T: Scalar>(&self, n: usize) -> T {
        T::lit(self.alpha.at(n))
    }

    pub fn lambda_at<T: Scalar>(&self, _n: usize) -> T {
        T::lit(self.lambda)
    }
}

pub fn alpha_at(spec: &ScheduleSpec, n: usize) -> f64 {
    spec.alpha.at(n)
}

/// Outcome of [`schedule_report`].
#[derive(Debug, Clone, Serialize)]
pub struct ScheduleReport {
    pub schedule: String,
    pub kind: ScheduleKind,
    pub lambda: f64,
    pub psi: f64,
    pub rho: f64,
    pub horizon: usize,
    pub log_base: &'static str,
    /// `delta_0`.
    pub delta_first: f64,
    /// `min delta_n` over `[horizon/2, horizon]`.
    pub delta_tail_min: f64,
    /// `lim delta_n = (1 - a)^2 rho - a (1 + a)` at the limit `a` of the inertia.
    pub delta_limit: f64,
    /// Smallest `N` with `delta_n > 0` for all `N <= n <= horizon`.
    pub validated_from: Option<usize>,
    /// Constant schedules: `phi(alpha) psi`.
    pub lambda_max: Option<f64>,
    /// Decreasing schedules: strictly decreasing for `2 <= n <= horizon`.
    pub strictly_decreasing: Option<bool>,
    /// Decreasing schedules: excess summable by the integral test (`e > 1`).
    pub summable: Option<bool>,
    pub feasible: bool,
    pub violated: Option<Inequality>,
}

/// Evaluates the schedule conditions and always returns the report.
///
/// Feasibility uses the exact limit of `delta_n` (`liminf` is a limit for
/// these families). `delta_n` over `0..=horizon` is reported alongside: slowly
/// decreasing families can keep `delta_n <= 0` for a long prefix while still
/// being admissible, and `validated_from` tells from which index the
/// per-step descent inequality applies.
pub fn schedule_report<T: Scalar>(spec: &ScheduleSpec, cert: &Certificate<T>, horizon: usize) -> Result<ScheduleReport> {
    if horizon == 0 {
        return Err(Error::invalid("horizon must be at least 1"));
    }
    let psi = cert.psi.to_f64_lossy();
    let lambda = spec.lambda;
    let rho = psi / lambda - 1.0;
    let mut violated = None;
    if rho < 0.0 {
        violated = Some(Inequality::RhoNonnegative);
    }

    let tail_start = horizon / 2;
    let mut delta_first = f64::NAN;
    let mut delta_tail_min = f64::INFINITY;
    let mut last_nonpositive: Option<usize> = None;
    let mut prev_alpha = spec.alpha.at(0);
    let mut strictly_decreasing = true;
    for n in 0..=horizon {
        let a_n = spec.alpha.at(n);
        let a_np1 = spec.alpha.at(n + 1);
        let d = delta_n(a_n, a_np1, rho, rho);
        if n == 0 {
            delta_first = d;
        }
        if n >= tail_start {
            delta_tail_min = delta_tail_min.min(d);
        }
        if !(d > 0.0) {
            last_nonpositive = Some(n);
        }
        if n >= 3 && !(a_n < prev_alpha) {
            strictly_decreasing = false;
        }
        prev_alpha = a_n;
    }
    let validated_from = match last_nonpositive {
        None => Some(0),
        Some(n) if n < horizon => Some(n + 1),
        Some(_) => None,
    };

    let delta_limit = delta_constant(spec.alpha.limit(), rho);
    let mut lambda_max = None;
    let mut decreasing = None;
    let mut summable = None;
    match spec.alpha {
        AlphaFamily::Constant { alpha } => {
            let bound = phi_value(alpha)? * psi;
            lambda_max = Some(bound);
            if violated.is_none() && !(bound > lambda) {
                violated = Some(Inequality::LambdaInterval);
            }
        }
        AlphaFamily::Nondecreasing { .. } => {
            if violated.is_none() && !(delta_limit > 0.0) {
                violated = Some(Inequality::DeltaPositive);
            }
        }
        AlphaFamily::Log { exponent, .. } => {
            decreasing = Some(strictly_decreasing);
            summable = Some(exponent > 1.0);
            if violated.is_none() && !(delta_limit > 0.0) {
                violated = Some(Inequality::DeltaPositive);
            }
            if violated.is_none() && !(strictly_decreasing && exponent > 1.0) {
                violated = Some(Inequality::DecreasingSummable);
            }
        }
    }

    Ok(ScheduleReport {
        schedule: spec.name(),
        kind: spec.kind(),
        lambda,
        psi,
        rho,
        horizon,
        log_base: "e",
        delta_first,
        delta_tail_min,
        delta_limit,
        validated_from,
        lambda_max,
        strictly_decreasing: decreasing,
        summable,
        feasible: violated.is_none(),
        violated,
    })
}

/// Like [`schedule_report`], but an infeasible schedule is an error naming the violated inequality.
pub fn validate_schedule<T: Scalar>(spec: &ScheduleSpec, cert: &Certificate<T>, horizon: usize) -> Result<ScheduleReport> {
    let report = schedule_report(spec, cert, horizon)?;
    match report.violated {
        None => Ok(report),
        Some(ineq) => Err(Error::infeasible(
            ineq,
            format!(
                "schedule {} with lambda = {}: psi = {}, rho = {}, tail min delta = {}",
                report.schedule, report.lambda, report.psi, report.rho, report.delta_tail_min
            ),
        )),
    }
}
