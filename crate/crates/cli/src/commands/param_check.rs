//! Feasibility report for one parameter choice.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use nfb_core::certificates::NuMode;
use nfb_core::experiments::{gen_qp, gen_restore, QpDims, RestoreConfig};
use nfb_core::methods::{chi_value, epsilon_bar, initialize_fpdhf, InitInput, MethodName, Scenario};
use nfb_core::{Error, Inequality};

use crate::config::{self, Meta, OutDir};
use crate::error::{CliError, CliResult};
use crate::Context;

pub const SECTION: &str = "param_check";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamCheckConfig {
    pub seed: u64,
    pub method: String,
    /// `constants` reads `beta`, `zeta`, `norm_l`; `qp` generates an instance of
    /// size `dims`; `restore` generates the instance of the `[restore]` table.
    pub source: String,
    pub dims: [usize; 3],
    pub beta: f64,
    pub zeta: f64,
    pub norm_l: f64,
    pub t: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub alpha: f64,
    /// Defaults to the midpoint of `]0, phi(alpha) psi[`.
    pub lambda: Option<f64>,
    /// `general` or `monotone`; defaults to `general` when both `L` and `D` are present.
    pub nu: Option<String>,
}

impl Default for ParamCheckConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            method: "fpdhf".into(),
            source: "constants".into(),
            dims: [200, 100, 20],
            beta: 1.0,
            zeta: 1.0,
            norm_l: 1.0,
            t: 0.9,
            kappa1: 0.5,
            kappa2: 0.5,
            alpha: 0.0,
            lambda: None,
            nu: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub inequality: Inequality,
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Constants {
    pub beta: f64,
    pub zeta: f64,
    pub norm_l: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Evaluation {
    pub method: MethodName,
    pub constants: Constants,
    pub nu_mode: NuMode,
    /// Ordered `(name, value)` pairs.
    pub values: Vec<(&'static str, f64)>,
    pub checks: Vec<CheckLine>,
    pub violated: Option<(Inequality, String)>,
    pub notes: Vec<String>,
}

impl Evaluation {
    pub fn feasible(&self) -> bool {
        self.violated.is_none()
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }
}

/// Structural constants of each method: absent operators fix `beta = inf`, `zeta = 0` or `||L|| = 0`.
fn apply_structure(method: MethodName, c: &mut Constants, notes: &mut Vec<String>) {
    let (no_c, no_d, no_l) = match method {
        MethodName::Fb => (false, true, true),
        MethodName::Fbf => (true, false, true),
        MethodName::Fbhf => (false, false, true),
        MethodName::Cp => (true, true, false),
        MethodName::Cv => (false, true, false),
        MethodName::CpFbf => (true, false, false),
        MethodName::Fpdhf | MethodName::FpdhfOracle => (false, false, false),
    };
    let mut force = |flag: bool, name: &str, slot: &mut f64, v: f64| {
        if flag && *slot != v {
            notes.push(format!("{method} has no such operator: {name} set to {v}"));
            *slot = v;
        }
    };
    force(no_c, "beta", &mut c.beta, f64::INFINITY);
    force(no_d, "zeta", &mut c.zeta, 0.0);
    force(no_l, "norm_l", &mut c.norm_l, 0.0);
}

fn nu_mode(cfg: &ParamCheckConfig, c: &Constants) -> CliResult<NuMode> {
    match cfg.nu.as_deref() {
        None => Ok(if c.norm_l > 0.0 && c.zeta > 0.0 { NuMode::General } else { NuMode::Monotone }),
        Some("general") => Ok(NuMode::General),
        Some("monotone") => Ok(NuMode::Monotone),
        Some(other) => Err(CliError::Config(format!("nu must be 'general' or 'monotone', got '{other}'"))),
    }
}

fn line(inequality: Inequality, ok: bool, detail: String) -> CheckLine {
    CheckLine { inequality, name: inequality.name(), status: if ok { Status::Pass } else { Status::Fail }, detail }
}

fn domain_failures(cfg: &ParamCheckConfig, c: &Constants) -> Vec<String> {
    let open = |v: f64| v > 0.0 && v < 1.0;
    let mut bad = Vec::new();
    for (name, v) in [("t", cfg.t), ("kappa1", cfg.kappa1)] {
        if !open(v) {
            bad.push(format!("{name} = {v} outside ]0, 1["));
        }
    }
    if c.norm_l > 0.0 && !open(cfg.kappa2) {
        bad.push(format!("kappa2 = {} outside ]0, 1[", cfg.kappa2));
    } else if c.norm_l == 0.0 && !(0.0..1.0).contains(&cfg.kappa2) {
        bad.push(format!("kappa2 = {} outside [0, 1[", cfg.kappa2));
    }
    if !(0.0..1.0).contains(&cfg.alpha) {
        bad.push(format!("alpha = {} outside [0, 1[", cfg.alpha));
    }
    if !(c.beta > 0.0) {
        bad.push(format!("beta = {} must be positive", c.beta));
    }
    if !(c.zeta >= 0.0 && c.zeta.is_finite()) {
        bad.push(format!("zeta = {} must be finite and nonnegative", c.zeta));
    }
    if !(c.norm_l >= 0.0 && c.norm_l.is_finite()) {
        bad.push(format!("norm_l = {} must be finite and nonnegative", c.norm_l));
    }
    bad
}

/// Evaluates every inequality for the configured method and constants.
pub fn evaluate(cfg: &ParamCheckConfig, constants: Constants) -> CliResult<Evaluation> {
    let method: MethodName = cfg.method.parse()?;
    let mut notes = Vec::new();
    let mut c = constants;
    apply_structure(method, &mut c, &mut notes);
    let nu_mode = nu_mode(cfg, &c)?;
    let mut eval = Evaluation { method, constants: c, nu_mode, values: Vec::new(), checks: Vec::new(), violated: None, notes };

    let order = [
        Inequality::ParameterDomain,
        Inequality::StepBelowChi,
        Inequality::DualStepProduct,
        Inequality::ZetaTildeBelowOne,
        Inequality::EpsilonBelowOneMinusZetaSq,
        Inequality::StepBelowCocoercivity,
        Inequality::LambdaInterval,
        Inequality::AlphaInterval,
        Inequality::RhoNonnegative,
        Inequality::DeltaPositive,
    ];
    let skip_rest = |eval: &mut Evaluation| {
        for ineq in order {
            if !eval.checks.iter().any(|l| l.inequality == ineq) {
                eval.checks.push(CheckLine { inequality: ineq, name: ineq.name(), status: Status::Skip, detail: "not evaluated".into() });
            }
        }
    };

    let bad = domain_failures(cfg, &c);
    if !bad.is_empty() {
        let detail = bad.join("; ");
        eval.checks.push(line(Inequality::ParameterDomain, false, detail.clone()));
        eval.violated = Some((Inequality::ParameterDomain, detail));
        skip_rest(&mut eval);
        return Ok(eval);
    }
    eval.checks.push(line(Inequality::ParameterDomain, true, "t, kappa1, kappa2, alpha, beta, zeta, ||L|| in range".into()));
    eval.values.push(("eps_bar", epsilon_bar(c.beta, c.zeta)));
    eval.values.push(("chi", chi_value(c.beta, c.zeta)));

    let input = InitInput {
        beta: c.beta,
        zeta: c.zeta,
        norm_l: c.norm_l,
        t: cfg.t,
        kappa1: cfg.kappa1,
        kappa2: cfg.kappa2,
        nu_mode,
        scenario: Scenario::PickAlphaThenLambda,
        chosen: Some(0.0),
        dependent: None,
    };
    let init = match initialize_fpdhf(&input) {
        Ok(init) => init,
        Err(e) => {
            let ineq = e.inequality().unwrap_or(Inequality::ParameterDomain);
            let detail = match &e {
                Error::Infeasible { detail, .. } => detail.clone(),
                other => other.to_string(),
            };
            eval.checks.push(line(ineq, false, detail.clone()));
            eval.violated = Some((ineq, detail));
            skip_rest(&mut eval);
            return Ok(eval);
        }
    };
    if init.provenance.chi_arbitrary {
        eval.notes.push("beta = inf and zeta = 0: chi is unconstrained, set to 1".into());
    }
    if init.provenance.epsilon_raised {
        eval.notes.push("eps raised above t eps_bar to satisfy tau <= 2 beta_tilde eps".into());
    }
    let p = init.params;
    let cert = init.certificate();
    let lambda = match cfg.lambda {
        Some(l) => l,
        None => 0.5 * cert.lambda_max(cfg.alpha)?,
    };
    let report = cert.report(cfg.alpha, lambda)?;
    let product = p.sigma * p.tau * p.norm_l * p.norm_l;
    let margin = 1.0 - p.zeta_tilde * p.zeta_tilde - p.epsilon;
    let cocoercive_bound = 2.0 * p.beta_tilde * p.epsilon;

    eval.values.extend([
        ("eps", p.epsilon),
        ("tau", p.tau),
        ("sigma", p.sigma),
        ("beta_tilde", p.beta_tilde),
        ("zeta_tilde", p.zeta_tilde),
        ("nu", p.nu),
        ("psi", cert.psi),
        ("alpha", cfg.alpha),
        ("phi_alpha", report.phi_alpha),
        ("lambda", lambda),
        ("lambda_max", report.lambda_interval.hi),
        ("alpha_bar", if report.alpha_bound.feasible { report.alpha_bound.value } else { f64::NAN }),
        ("rho", report.rho),
        ("delta_hat", report.delta_hat),
    ]);
    let chi = eval.value("chi").expect("chi recorded");
    eval.checks.extend([
        line(Inequality::StepBelowChi, p.tau > 0.0 && p.tau < chi, format!("tau = {}, chi = {chi}", p.tau)),
        line(Inequality::DualStepProduct, 1.0 - product > 0.0, format!("sigma tau ||L||^2 = {product}")),
        line(Inequality::ZetaTildeBelowOne, p.zeta_tilde < 1.0, format!("zeta_tilde = {}", p.zeta_tilde)),
        line(Inequality::EpsilonBelowOneMinusZetaSq, margin > 0.0, format!("1 - zeta_tilde^2 - eps = {margin}")),
        line(
            Inequality::StepBelowCocoercivity,
            !(p.tau > cocoercive_bound),
            format!("tau = {}, 2 beta_tilde eps = {cocoercive_bound}", p.tau),
        ),
        line(
            Inequality::LambdaInterval,
            report.lambda_interval.contains(lambda),
            format!("lambda = {lambda}, interval ]0, {}[", report.lambda_interval.hi),
        ),
        line(
            Inequality::AlphaInterval,
            report.alpha_bound.feasible && cfg.alpha < report.alpha_bound.value,
            if report.alpha_bound.feasible {
                format!("alpha = {}, alpha_bar = {}", cfg.alpha, report.alpha_bound.value)
            } else {
                format!("no admissible alpha for lambda = {lambda} >= psi = {}", cert.psi)
            },
        ),
        line(Inequality::RhoNonnegative, report.rho >= 0.0, format!("rho = {}", report.rho)),
        line(Inequality::DeltaPositive, report.delta_hat > 0.0, format!("delta_hat = {}", report.delta_hat)),
    ]);
    let primary = report.violated.or_else(|| eval.checks.iter().find(|l| l.status == Status::Fail).map(|l| l.inequality));
    if let Some(ineq) = primary {
        let detail = eval.checks.iter().find(|l| l.inequality == ineq).map(|l| l.detail.clone()).unwrap_or_default();
        eval.violated = Some((ineq, detail));
    }
    Ok(eval)
}

fn resolve_constants(cfg: &ParamCheckConfig, ctx: &Context) -> CliResult<(Constants, Vec<String>)> {
    match cfg.source.as_str() {
        "constants" => Ok((Constants { beta: cfg.beta, zeta: cfg.zeta, norm_l: cfg.norm_l }, Vec::new())),
        "qp" => {
            let [n, m, p] = cfg.dims;
            let inst = gen_qp::<f64>(QpDims { n, m, p }, cfg.seed)?;
            let note = format!("constants from qp instance N={n} m={m} p={p} seed={}", inst.seed);
            Ok((Constants { beta: inst.beta(), zeta: inst.zeta(), norm_l: 0.0 }, vec![note]))
        }
        "restore" => {
            let rcfg: RestoreConfig = config::section(&ctx.table, super::restore::SECTION, ctx.seed)?;
            let inst = gen_restore::<f64>(&rcfg)?;
            let pr = &inst.problem;
            let note = format!("constants from restoration instance {}x{} kernel {}", inst.width(), inst.height(), rcfg.kernel.name());
            Ok((Constants { beta: pr.beta(), zeta: pr.zeta(), norm_l: pr.norm_l() }, vec![note]))
        }
        other => Err(CliError::Config(format!("source must be constants, qp or restore, got '{other}'"))),
    }
}

fn json_number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or_else(|| Value::String(v.to_string()))
}

pub fn run(ctx: &Context) -> CliResult<()> {
    let cfg: ParamCheckConfig = config::section(&ctx.table, SECTION, ctx.seed)?;
    let (constants, mut provenance) = resolve_constants(&cfg, ctx)?;
    let eval = evaluate(&cfg, constants)?;
    provenance.push("eps = t eps_bar, tau = kappa1 chi, sigma = kappa2 (1 - tau / chi) / (tau ||L||^2)".into());
    let meta = Meta::new("param-check", SECTION, cfg.seed, &cfg, provenance);

    let c = eval.constants;
    println!("{:<14}{}", "method", eval.method);
    println!("{:<14}{}", "beta", c.beta);
    println!("{:<14}{}", "zeta", c.zeta);
    println!("{:<14}{}", "norm_L", c.norm_l);
    println!("{:<14}{:?}", "nu_mode", eval.nu_mode);
    for (name, v) in &eval.values {
        println!("{name:<14}{v}");
    }
    if let Some(hi) = eval.value("lambda_max") {
        println!("{:<14}]0, {hi}[", "lambda_range");
    }
    for n in &eval.notes {
        println!("note: {n}");
    }
    for l in &eval.checks {
        let tag = match l.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        println!("{tag}  {}  ({})", l.name, l.detail);
    }

    let out = OutDir::create(&ctx.out)?;
    out.write_config(&meta, SECTION, &cfg)?;
    let values: Map<String, Value> = eval.values.iter().map(|&(k, v)| (k.to_string(), json_number(v))).collect();
    let constants: Map<String, Value> =
        [("beta", c.beta), ("zeta", c.zeta), ("norm_l", c.norm_l)].iter().map(|&(k, v)| (k.to_string(), json_number(v))).collect();
    let doc = serde_json::json!({
        "meta": meta,
        "method": eval.method,
        "constants": constants,
        "nu_mode": eval.nu_mode,
        "values": values,
        "checks": eval.checks,
        "notes": eval.notes,
        "feasible": eval.feasible(),
        "violated": eval.violated.as_ref().map(|(i, _)| i.name()),
    });
    out.write_json("param_check.json", &doc)?;

    match eval.violated {
        None => {
            println!("feasible");
            Ok(())
        }
        Some((ineq, detail)) => Err(Error::infeasible(ineq, detail).into()),
    }
}
