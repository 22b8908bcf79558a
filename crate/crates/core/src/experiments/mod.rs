//! Problem generators and pipelines for the two numerical studies.

pub mod qp;
pub mod restore;
mod rng;

pub use qp::{
    bench_csv, default_variants, gen_qp, qp_parameters, run_qp_bench, solve_qp, AlphaChoice, LambdaChoice,
    QpBenchRow, QpDims, QpInstance, QpRun, QpRunSettings, QpVariant,
};
pub use restore::{
    gen_restore, psnr, restore_parameters, run_restore, synthetic_image, BlurDataFit, RestoreConfig,
    RestoreInstance, RestoreOutcome, RestoreSummary, WaveletHuberGradient, GRADIENT_NORM_BOUND, HAAR_LEVEL,
};
pub use rng::{normal, normal_matrix, normal_vector, rng_from_seed, ExperimentRng};
