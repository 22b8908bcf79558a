//! Acceptance criteria, run sequentially so the runtime budgets are measured
//! without interference. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::{parts, problem, qp_natural_residual, qp_saddle_oracle, start, Part, DUAL, PRIMAL};
use nfb_core::certificates::{
    alpha_bound, alpha_quadratic, phi_value, psi_value, Certificate, FejerMonitor, NuMode, StepParams,
};
use nfb_core::engine::{run_nfb, MethodKernel, Nfb, RunConfig, RunStatus};
use nfb_core::experiments::{
    gen_qp, normal_vector, qp_parameters, rng_from_seed, run_restore, AlphaChoice, LambdaChoice, QpDims, QpInstance,
    QpVariant, RestoreConfig,
};
use nfb_core::linalg::{
    discrete_divergence, discrete_gradient, haar_inverse, haar_transform, DenseVector, GradientPair, GrayImage,
};
use nfb_core::methods::{
    chi_value, epsilon_bar, kernel_chambolle_pock, kernel_condat_vu, kernel_cp_fbf, kernel_fb, kernel_fbf,
    kernel_fbhf, kernel_fpdhf, kernel_nfb_product,
};
use nfb_core::schedules::{schedule_report, validate_schedule, AlphaFamily, ScheduleSpec, DEC1, DEC2, DEC3};
use rand::Rng;

const QP_DIMS: QpDims = QpDims { n: 200, m: 100, p: 20 };
const QP_SEEDS: [u64; 5] = [0, 1, 2, 3, 4];
const QP_CAP: usize = 100_000;
const QP_TOL: f64 = 1e-6;
/// Tolerance of the runs whose limits are compared; see criterion 5.
const QP_SOLUTION_TOL: f64 = 1e-10;

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn run(id: usize, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t0 = Instant::now();
    let out = f();
    let elapsed = t0.elapsed();
    let in_time = elapsed <= budget;
    let ok = out.ok && in_time;
    println!(
        "criterion {id} [{name}]: {} ({}; {:.2} s of {} s{})",
        if ok { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        budget.as_secs(),
        if in_time { "" } else { ", over budget" }
    );
    ok
}

fn certificate_suite() -> Outcome {
    let mut psi_ok = true;
    for i in 0..100 {
        let zeta = 0.99 * i as f64 / 100.0;
        for j in 1..=100 {
            let eps = (1.0 - zeta * zeta) * j as f64 / 101.0;
            for mode in [NuMode::Monotone, NuMode::General] {
                let psi = psi_value(zeta, eps, mode).unwrap();
                psi_ok &= psi > 1.0 && psi < 2.0;
            }
        }
    }
    let grid: Vec<f64> = (0..10_000).map(|k| k as f64 / 10_000.0).collect();
    let phi_decreasing = grid.windows(2).all(|w| phi_value(w[1]).unwrap() < phi_value(w[0]).unwrap());
    let mut rng = rng_from_seed(2024);
    let mut worst_root: f64 = 0.0;
    for _ in 0..1000 {
        let psi: f64 = rng.random_range(1.0001..1.9999);
        let lambda = psi * rng.random_range(0.001..0.999);
        let ab = alpha_bound(psi, lambda).value;
        worst_root = worst_root.max(alpha_quadratic(psi, lambda, ab).abs());
    }
    let phi0: f64 = phi_value(0.0).unwrap();
    let psi: f64 = 1.5;
    let near_a0 = alpha_bound(psi, psi / (2.0 + 1e-9)).value;
    let ok = psi_ok && phi_decreasing && worst_root < 1e-10 && (phi0 - 1.0).abs() < 1e-6 && (near_a0 - 1.0 / 3.0).abs() < 1e-6;
    check(
        ok,
        format!(
            "psi in ]1,2[: {psi_ok}, phi decreasing: {phi_decreasing}, max root residual {worst_root:.1e}, phi(0) = {phi0}, alpha_bar(a -> 0) = {near_a0:.9}"
        ),
    )
}

fn initialization_identity() -> Outcome {
    let mut rng = rng_from_seed(7);
    let (mut worst_sq, mut worst_chi, mut worst_direct): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..1000 {
        let beta: f64 = rng.random_range(0.01..100.0);
        let zeta: f64 = rng.random_range(0.01..100.0);
        let eb = epsilon_bar(beta, zeta);
        let chi = chi_value(beta, zeta);
        // (1 - eps_bar) = (2 beta zeta eps_bar)^2 is the squared identity; it avoids
        // the cancellation in sqrt(1 - eps_bar) when beta zeta is small.
        worst_sq = worst_sq.max(((1.0 - eb) - (2.0 * beta * zeta * eb).powi(2)).abs());
        worst_direct = worst_direct.max(((1.0 - eb).sqrt() / zeta - 2.0 * beta * eb).abs() / (2.0 * beta * eb));
        worst_chi = worst_chi.max((chi - 2.0 * beta * eb).abs() / chi);
    }
    let cv = (epsilon_bar(1.0, 0.0), chi_value(1.0, 0.0));
    let fbf = (epsilon_bar(f64::INFINITY, 4.0), chi_value(f64::INFINITY, 4.0));
    let degenerate = cv == (1.0, 2.0) && fbf == (0.0, 0.25);
    let ok = worst_sq < 1e-12 && worst_chi < 1e-12 && degenerate;
    check(
        ok,
        format!(
            "max |(1 - eps_bar) - (2 beta zeta eps_bar)^2| = {worst_sq:.1e}, max rel chi gap {worst_chi:.1e}, max rel gap of the unsquared form {worst_direct:.1e}, zeta = 0 -> {cv:?}, beta = inf -> {fbf:?}"
        ),
    )
}

fn iterate<K: MethodKernel<f64> + ?Sized>(k: &K, z0: &DenseVector<f64>, iters: usize) -> Vec<DenseVector<f64>> {
    let mut it = Nfb::new(k, z0.clone(), z0.clone(), ScheduleSpec::constant(0.25, 0.9).unwrap()).unwrap();
    (0..iters).map(|_| it.step().clone()).collect()
}

fn gap(a: &[DenseVector<f64>], b: &[DenseVector<f64>], block: usize) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.split_at(block).0.max_abs_diff(&y.split_at(block).0)).fold(0.0, f64::max)
}

fn structural_identities() -> Outcome {
    use Part::*;
    let mut worst = [0.0f64; 5];
    for seed in 0..5 {
        let p = parts(seed);
        let tau = 0.5 / (p.norm_m * p.norm_m + p.norm_k);
        let sigma = 0.9 / (tau * p.norm_l * p.norm_l);
        let z0 = start(seed, PRIMAL + DUAL);
        let (x0, _) = z0.split_at(PRIMAL);
        let n = PRIMAL + DUAL;
        let pairs = [
            gap(
                &iterate(&kernel_fpdhf(&problem(&p, Real, Zero, Real), tau, sigma).unwrap(), &z0, 100),
                &iterate(&kernel_condat_vu(&problem(&p, Real, Absent, Real), tau, sigma).unwrap(), &z0, 100),
                n,
            ),
            gap(
                &iterate(&kernel_fpdhf(&problem(&p, Zero, Zero, Real), tau, sigma).unwrap(), &z0, 100),
                &iterate(&kernel_chambolle_pock(&problem(&p, Absent, Absent, Real), tau, sigma).unwrap(), &z0, 100),
                n,
            )
            .max(gap(
                &iterate(&kernel_fpdhf(&problem(&p, Zero, Real, Real), tau, sigma).unwrap(), &z0, 100),
                &iterate(&kernel_cp_fbf(&problem(&p, Absent, Real, Real), tau, sigma).unwrap(), &z0, 100),
                n,
            )),
            gap(
                &iterate(&kernel_fpdhf(&problem(&p, Real, Real, Zero), tau, 1.0).unwrap(), &z0, 100),
                &iterate(&kernel_fbhf(&problem(&p, Real, Real, Absent), tau).unwrap(), &x0, 100),
                PRIMAL,
            ),
            gap(
                &iterate(&kernel_fpdhf(&problem(&p, Zero, Real, Zero), tau, 1.0).unwrap(), &z0, 100),
                &iterate(&kernel_fbf(&problem(&p, Absent, Real, Absent), tau).unwrap(), &x0, 100),
                PRIMAL,
            ),
            gap(
                &iterate(&kernel_fpdhf(&problem(&p, Real, Zero, Zero), tau, 1.0).unwrap(), &z0, 100),
                &iterate(&kernel_fb(&problem(&p, Real, Absent, Absent), tau).unwrap(), &x0, 100),
                PRIMAL,
            ),
        ];
        for (w, g) in worst.iter_mut().zip(pairs) {
            *w = w.max(g);
        }
    }
    let ok = worst.iter().all(|&g| g < 1e-12);
    check(ok, format!("max gaps cv {:.1e}, cp {:.1e}, fbhf {:.1e}, fbf {:.1e}, fb {:.1e}", worst[0], worst[1], worst[2], worst[3], worst[4]))
}

fn product_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let p = parts(seed);
        let tau = 0.5 / (p.norm_m * p.norm_m + p.norm_k);
        let sigma = 0.9 / (tau * p.norm_l * p.norm_l);
        let prob = common::full(&p);
        let z0 = start(seed, PRIMAL + DUAL);
        let a = iterate(&kernel_fpdhf(&prob, tau, sigma).unwrap(), &z0, 200);
        let b = iterate(&kernel_nfb_product(&prob, tau, sigma).unwrap(), &z0, 200);
        worst = worst.max(gap(&a, &b, PRIMAL + DUAL));
    }
    check(worst < 1e-9, format!("max deviation {worst:.2e} over 10 seeds x 200 iterations"))
}

fn qp_variants() -> [QpVariant; 3] {
    let lam = LambdaChoice::Value(1.0);
    [
        QpVariant { label: "alpha=0".into(), alpha: AlphaChoice::Schedule(AlphaFamily::Constant { alpha: 0.0 }), lambda: lam, t: 0.999 },
        QpVariant { label: "alpha=0.99 alpha_bar".into(), alpha: AlphaChoice::BarFraction(0.99), lambda: lam, t: 0.999 },
        QpVariant { label: "alpha_n^2".into(), alpha: AlphaChoice::Schedule(DEC2), lambda: lam, t: 0.999 },
    ]
}

struct QpCase {
    seed: u64,
    variant: usize,
    iters_to_tol: Option<usize>,
    fejer_checks: usize,
    fejer_violations: usize,
    validated_from: Option<usize>,
    last_dz_sq: f64,
    x_loose: DenseVector<f64>,
    x_tight: DenseVector<f64>,
    kkt_lib: f64,
    kkt_test: f64,
    oracle_dist: f64,
}

fn qp_case(inst: &QpInstance<f64>, oracle: &DenseVector<f64>, seed: u64, vi: usize, v: &QpVariant) -> QpCase {
    let (init, schedule) = qp_parameters(inst, v).unwrap();
    let kernel = kernel_fbhf(&inst.problem, init.tau).unwrap();
    let cert: Certificate<f64> = init.certificate();
    let report = schedule_report(&schedule, &cert, QP_CAP).unwrap();
    let zero = DenseVector::zeros(inst.dim());
    let cfg = RunConfig::certified(schedule, cert, QP_CAP, QP_TOL).with_monitor(FejerMonitor::new(oracle.clone()));
    let (z, trace, monitor) = run_nfb(&kernel, zero.clone(), zero.clone(), cfg).unwrap();
    let monitor = monitor.unwrap();
    let cfg = RunConfig::certified(schedule, cert, QP_CAP, QP_SOLUTION_TOL);
    let (zt, trace_t, _) = run_nfb(&kernel, zero.clone(), zero, cfg).unwrap();
    let n = QP_DIMS.n;
    QpCase {
        seed,
        variant: vi,
        iters_to_tol: (trace.status == RunStatus::Converged).then_some(trace.iterations),
        fejer_checks: monitor.checks(),
        fejer_violations: monitor.violations().len(),
        validated_from: report.validated_from,
        last_dz_sq: trace.records.last().map_or(f64::NAN, |r| r.dz_sq),
        x_loose: z.split_at(n).0,
        x_tight: zt.split_at(n).0,
        kkt_lib: if trace_t.status == RunStatus::Converged { inst.kkt_residual(&zt, init.tau) } else { f64::INFINITY },
        kkt_test: qp_natural_residual(&inst.m, &inst.b, &inst.r, &zt),
        oracle_dist: zt.split_at(n).0.max_abs_diff(&oracle.split_at(n).0),
    }
}

fn qp_cases() -> Vec<QpCase> {
    let mut cases = Vec::new();
    for &seed in &QP_SEEDS {
        let inst = gen_qp::<f64>(QP_DIMS, seed).unwrap();
        let (oracle, _) = qp_saddle_oracle(&inst.m, &inst.b, &inst.r, 1e-15, 2_000_000);
        for (vi, v) in qp_variants().iter().enumerate() {
            cases.push(qp_case(&inst, &oracle, seed, vi, v));
        }
    }
    cases
}

fn convergence_and_agreement(cases: &[QpCase]) -> Outcome {
    let labels = qp_variants().map(|v| v.label);
    let mut all_converged = true;
    let mut max_iters = [0usize; 3];
    let (mut worst_pair, mut worst_pair_loose, mut worst_kkt, mut worst_kkt_test, mut worst_oracle) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for c in cases {
        match c.iters_to_tol {
            Some(n) => max_iters[c.variant] = max_iters[c.variant].max(n),
            None => all_converged = false,
        }
        worst_kkt = worst_kkt.max(c.kkt_lib);
        worst_kkt_test = worst_kkt_test.max(c.kkt_test);
        worst_oracle = worst_oracle.max(c.oracle_dist);
    }
    for &seed in &QP_SEEDS {
        let same: Vec<&QpCase> = cases.iter().filter(|c| c.seed == seed).collect();
        for i in 0..same.len() {
            for j in i + 1..same.len() {
                worst_pair = worst_pair.max(same[i].x_tight.max_abs_diff(&same[j].x_tight));
                worst_pair_loose = worst_pair_loose.max(same[i].x_loose.max_abs_diff(&same[j].x_loose));
            }
        }
    }
    let ok = all_converged && worst_pair < 1e-4 && worst_kkt < 1e-4 && worst_kkt_test < 1e-4 && worst_oracle < 1e-4;
    check(
        ok,
        format!(
            "max iterations to 1e-6: {} {}, {} {}, {} {}; pairwise gap {worst_pair:.1e} (at the 1e-6 stop {worst_pair_loose:.1e}); KKT residual {worst_kkt:.1e} (test-side {worst_kkt_test:.1e}); distance to oracle {worst_oracle:.1e}",
            labels[0], max_iters[0], labels[1], max_iters[1], labels[2], max_iters[2]
        ),
    )
}

fn fejer_monitor(cases: &[QpCase]) -> Outcome {
    let violations: usize = cases.iter().map(|c| c.fejer_violations).sum();
    let checks: Vec<usize> = (0..3).map(|v| cases.iter().filter(|c| c.variant == v).map(|c| c.fejer_checks).sum()).collect();
    let worst_tail = cases.iter().map(|c| c.last_dz_sq).fold(0.0, f64::max);
    let latest_validation = cases
        .iter()
        .filter(|c| c.variant == 2)
        .map(|c| c.validated_from.map_or("beyond horizon".to_string(), |n| n.to_string()))
        .next()
        .unwrap_or_default();
    let ok = violations == 0 && worst_tail < 1e-8 && checks[0] > 0 && checks[1] > 0;
    check(
        ok,
        format!(
            "{violations} violations; checked steps per variant {checks:?}; alpha_n^2 validated from n = {latest_validation}; max final ||dz||_S^2 {worst_tail:.1e}"
        ),
    )
}

fn image_restoration() -> Outcome {
    let cfg = RestoreConfig { size: 64, kappa1: 0.17, kappa2: 0.99, t: 0.999, max_iters: 50_000, rel_tol: 1e-6, ..Default::default() };
    let out = run_restore::<f64>(&cfg).unwrap();
    let s = &out.summary;
    let converged = s.status == RunStatus::Converged || s.iterations == cfg.max_iters;
    let gain = s.psnr_restored - s.psnr_observed;

    let mut rng = rng_from_seed(64);
    let img = GrayImage::new(64, 64, normal_vector::<f64>(&mut rng, 4096).into_vec()).unwrap();
    let other = GrayImage::new(64, 64, normal_vector::<f64>(&mut rng, 4096).into_vec()).unwrap();
    let (wi, wo) = (haar_transform(&img, 3).unwrap(), haar_transform(&other, 3).unwrap());
    let haar_gap = (wi.dot(&wo) - img.dot(&other)).abs().max(
        haar_inverse(&wi, 3).unwrap().pixels().iter().zip(img.pixels()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
    );
    let p = GradientPair::from_vector(64, 64, &normal_vector(&mut rng, 2 * 4096)).unwrap();
    let adj_gap = (discrete_gradient(&img).dot(&p) + img.dot(&discrete_divergence(&p).unwrap())).abs();

    let ok = converged && gain >= 1.0 && haar_gap < 1e-10 && adj_gap < 1e-10;
    check(
        ok,
        format!(
            "{:?} after {} iterations; PSNR {:.2} -> {:.2} dB (+{gain:.2}); tau {:.4}, sigma {:.4}; Haar gap {haar_gap:.1e}, adjoint gap {adj_gap:.1e}",
            s.status, s.iterations, s.psnr_observed, s.psnr_restored, s.tau, s.sigma
        ),
    )
}

fn schedule_feasibility() -> Outcome {
    let qp = gen_qp::<f64>(QP_DIMS, 0).unwrap();
    let (qp_init, _) = qp_parameters(&qp, &qp_variants()[0]).unwrap();
    let certs = [
        qp_init.certificate(),
        Certificate::new(StepParams::forward_backward(1.0, 1.0, None).unwrap()).unwrap(),
        Certificate::new(StepParams::forward_backward(1.0, 0.2, None).unwrap()).unwrap(),
    ];
    let mut decreasing_ok = true;
    let mut above_rejected = true;
    let mut mismatches = 0usize;
    let mut compared = 0usize;
    for cert in &certs {
        let psi = cert.psi;
        for lambda in [0.5 * psi, 0.9 * psi, 1.0_f64.min(0.999 * psi)] {
            for fam in [DEC1, DEC2, DEC3] {
                decreasing_ok &= validate_schedule(&ScheduleSpec::new(fam, lambda).unwrap(), cert, 1000).is_ok();
            }
            let ab = alpha_bound(psi, lambda).value;
            if ab + 0.01 < 1.0 {
                above_rejected &= validate_schedule(&ScheduleSpec::constant(ab + 0.01, lambda).unwrap(), cert, 1000).is_err();
            }
        }
        for i in 0..200 {
            let alpha = i as f64 / 200.0;
            for j in 1..=60 {
                let lambda = psi * j as f64 / 50.0;
                let closed = phi_value(alpha).unwrap() * psi > lambda;
                let got = validate_schedule(&ScheduleSpec::constant(alpha, lambda).unwrap(), cert, 10).is_ok();
                compared += 1;
                mismatches += usize::from(closed != got);
            }
        }
    }
    let ok = decreasing_ok && above_rejected && mismatches == 0;
    check(
        ok,
        format!(
            "decreasing families accepted: {decreasing_ok}; alpha_bar + 0.01 rejected: {above_rejected}; {mismatches} mismatches with phi(alpha) psi > lambda over {compared} constant schedules"
        ),
    )
}

#[allow(clippy::vec_init_then_push)]
fn main() {
    let mut results = Vec::new();
    results.push(run(1, "certificate suite", Duration::from_secs(5), certificate_suite));
    results.push(run(2, "initialization identity", Duration::from_secs(1), initialization_identity));
    results.push(run(3, "structural identities", Duration::from_secs(5), structural_identities));
    results.push(run(4, "product-space oracle", Duration::from_secs(5), product_oracle));
    let mut cases = Vec::new();
    let qp_budget = Duration::from_secs(60);
    let t0 = Instant::now();
    results.push(run(5, "convergence and agreement", qp_budget, || {
        cases = qp_cases();
        convergence_and_agreement(&cases)
    }));
    let remaining = qp_budget.saturating_sub(t0.elapsed());
    results.push(run(6, "Fejer monitor, on the runs of criterion 5", remaining, || fejer_monitor(&cases)));
    results.push(run(7, "image restoration", Duration::from_secs(120), image_restoration));
    results.push(run(8, "schedule feasibility", Duration::from_secs(2), schedule_feasibility));
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
