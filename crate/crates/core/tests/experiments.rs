mod common;

use common::{qp_natural_residual, qp_saddle_oracle};
use nfb_core::engine::RunStatus;
use nfb_core::experiments::{
    default_variants, gen_qp, run_restore, solve_qp, AlphaChoice, LambdaChoice, QpDims, QpRunSettings, QpVariant,
    RestoreConfig,
};
use nfb_core::linalg::BlurKernel;
use nfb_core::schedules::DEC2;

#[test]
fn small_qp_matches_long_run_oracle() {
    let inst = gen_qp::<f64>(QpDims { n: 20, m: 10, p: 4 }, 1).unwrap();
    let (oracle, _) = qp_saddle_oracle(&inst.m, &inst.b, &inst.r, 1e-15, 1_000_000);
    assert!(qp_natural_residual(&inst.m, &inst.b, &inst.r, &oracle) < 1e-10);
    let (xo, _) = oracle.split_at(20);
    let settings = QpRunSettings { max_iters: 1_000_000, rel_tol: 1e-10 };
    let variants = [
        default_variants()[0].clone(),
        QpVariant { label: "inertial".into(), alpha: AlphaChoice::BarFraction(0.99), lambda: LambdaChoice::Value(1.0), t: 0.999 },
        QpVariant { label: "decreasing".into(), alpha: AlphaChoice::Schedule(DEC2), lambda: LambdaChoice::Value(1.0), t: 0.999 },
    ];
    for v in &variants {
        let (z, trace, _) = solve_qp(&inst, v, &settings).unwrap();
        assert_eq!(trace.status, RunStatus::Converged, "{}", v.label);
        let (x, _) = z.split_at(20);
        assert!(x.max_abs_diff(&xo) < 1e-4, "{}: {}", v.label, x.max_abs_diff(&xo));
    }
}

#[test]
fn qp_pipeline_is_bitwise_reproducible() {
    let dims = QpDims { n: 30, m: 15, p: 5 };
    let v = &default_variants()[3];
    let s = QpRunSettings { max_iters: 2000, rel_tol: 1e-8 };
    let (z1, t1, _) = solve_qp(&gen_qp::<f64>(dims, 9).unwrap(), v, &s).unwrap();
    let (z2, t2, _) = solve_qp(&gen_qp::<f64>(dims, 9).unwrap(), v, &s).unwrap();
    assert_eq!(z1, z2);
    assert_eq!(t1.iterations, t2.iterations);
    assert_eq!(t1.final_rel_err.to_bits(), t2.final_rel_err.to_bits());
}

#[test]
fn restoration_beats_observation_for_every_kernel() {
    for kernel in [BlurKernel::Avg3, BlurKernel::Avg9, BlurKernel::Gauss3] {
        let cfg = RestoreConfig { size: 32, kernel, max_iters: 5000, ..Default::default() };
        let out = run_restore::<f64>(&cfg).unwrap();
        let s = &out.summary;
        assert!(s.psnr_restored > s.psnr_observed, "{kernel:?}: {} vs {}", s.psnr_restored, s.psnr_observed);
        assert!(s.objective_restored <= s.objective_observed);
        assert!(out.restored.pixels().iter().all(|v| (0.0..=1.0).contains(v)));
    }
}

#[test]
fn restoration_runs_in_single_precision() {
    let cfg = RestoreConfig { size: 16, max_iters: 2000, rel_tol: 1e-5, ..Default::default() };
    let out = run_restore::<f32>(&cfg).unwrap();
    assert!(out.summary.psnr_restored > out.summary.psnr_observed);
}
