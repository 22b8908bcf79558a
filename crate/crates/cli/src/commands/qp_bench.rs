//! Iteration counts and timings of FBHF variants on random constrained least-squares instances.

use serde::{Deserialize, Serialize};

use nfb_core::experiments::{
    bench_csv, default_variants, run_qp_bench, AlphaChoice, LambdaChoice, QpDims, QpRunSettings, QpVariant,
};

use crate::config::{self, Meta, OutDir};
use crate::error::{CliError, CliResult};
use crate::Context;

pub const SECTION: &str = "qp_bench";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumOrStr {
    Num(f64),
    Str(String),
}

impl NumOrStr {
    fn text(&self) -> String {
        match self {
            NumOrStr::Num(v) => v.to_string(),
            NumOrStr::Str(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantConfig {
    pub label: String,
    /// A schedule name (`const:a`, `nondec:a`, `dec1`..`dec3`, `custom:c0,c1,e`) or `bar:c` for `c alpha_bar`.
    pub alpha: String,
    /// A number or `psi:c` for `c psi`.
    pub lambda: NumOrStr,
    pub t: f64,
}

impl VariantConfig {
    pub fn resolve(&self) -> CliResult<QpVariant> {
        if !(self.t > 0.0 && self.t < 1.0) {
            return Err(CliError::Config(format!("variant '{}': t = {} outside ]0, 1[", self.label, self.t)));
        }
        Ok(QpVariant {
            label: self.label.clone(),
            alpha: AlphaChoice::parse(&self.alpha)?,
            lambda: LambdaChoice::parse(&self.lambda.text())?,
            t: self.t,
        })
    }

    fn from_variant(v: &QpVariant) -> Self {
        let lambda = match v.lambda {
            LambdaChoice::Value(x) => NumOrStr::Num(x),
            LambdaChoice::PsiFraction(_) => NumOrStr::Str(v.lambda.label()),
        };
        Self { label: v.label.clone(), alpha: v.alpha.label(), lambda, t: v.t }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QpBenchConfig {
    pub seed: u64,
    /// `(N, m, p)` cells.
    pub dims: Vec<[usize; 3]>,
    pub realizations: usize,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub variants: Vec<VariantConfig>,
}

impl Default for QpBenchConfig {
    fn default() -> Self {
        let s = QpRunSettings::default();
        Self {
            seed: 0,
            dims: vec![[200, 100, 20]],
            realizations: 5,
            max_iters: s.max_iters,
            rel_tol: s.rel_tol,
            variants: default_variants().iter().map(VariantConfig::from_variant).collect(),
        }
    }
}

pub fn run(ctx: &Context) -> CliResult<()> {
    let cfg: QpBenchConfig = config::section(&ctx.table, SECTION, ctx.seed)?;
    let grid: Vec<QpDims> = cfg.dims.iter().map(|&[n, m, p]| QpDims { n, m, p }).collect();
    let variants: Vec<QpVariant> = cfg.variants.iter().map(VariantConfig::resolve).collect::<CliResult<_>>()?;
    let settings = QpRunSettings { max_iters: cfg.max_iters, rel_tol: cfg.rel_tol };
    let rows = run_qp_bench(&grid, &variants, cfg.realizations, cfg.seed, &settings)?;

    let provenance = vec![
        "M, R with i.i.d. N(0, 1) entries; b = (N / sqrt(m)) g, g ~ N(0, I); ChaCha8 with ziggurat normals".into(),
        format!("realization k uses seed {} + 1000 k; rank-deficient M is redrawn from the next seed", cfg.seed),
        "eps = t eps_bar, tau = t chi; alpha and lambda certified before each run".into(),
        format!("stop at relative error < {} or {} iterations; failures = runs stopped at the cap", cfg.rel_tol, cfg.max_iters),
    ];
    let meta = Meta::new("qp-bench", SECTION, cfg.seed, &cfg, provenance);
    let out = OutDir::create(&ctx.out)?;
    out.write_config(&meta, SECTION, &cfg)?;
    let csv = bench_csv(&rows);
    let path = out.write_csv("qp_bench.csv", &meta, &csv)?;
    print!("{csv}");
    eprintln!("wrote {}", path.display());

    let diverged: Vec<String> =
        rows.iter().filter(|r| r.diverged > 0).map(|r| format!("{} at ({}, {}, {})", r.algorithm, r.n, r.m, r.p)).collect();
    if !diverged.is_empty() {
        return Err(CliError::Diverged(diverged.join(", ")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_variants_round_trip_through_config() {
        let cfg = QpBenchConfig::default();
        let resolved: Vec<QpVariant> = cfg.variants.iter().map(|v| v.resolve().unwrap()).collect();
        let expected = default_variants();
        assert_eq!(resolved.len(), expected.len());
        for (a, b) in resolved.iter().zip(&expected) {
            assert_eq!(a.label, b.label);
            assert_eq!(a.alpha, b.alpha);
            assert_eq!(a.lambda, b.lambda);
            assert_eq!(a.t, b.t);
        }
    }

    #[test]
    fn variant_validation() {
        let v = VariantConfig { label: "x".into(), alpha: "bar:1.5".into(), lambda: NumOrStr::Num(1.0), t: 0.9 };
        assert!(v.resolve().is_err());
        let v = VariantConfig { label: "x".into(), alpha: "dec1".into(), lambda: NumOrStr::Str("psi:0.5".into()), t: 1.0 };
        assert!(v.resolve().is_err());
    }
}
