//! Total-variation deblurring with a wavelet Huber penalty:
//!
//! ```text
//! min_{x in [0,1]^{N x N}}  mu1 ||grad x||_1 + 1/2 ||T x - z||^2 + mu2 H_delta(W x)
//! ```
//!
//! with `T` a blur, `W` the orthonormal Haar transform (3 levels) and
//! `z = T x_true + noise`. In split form: `A = N_box`, `B = d(mu1 ||.||_1)`,
//! `L = grad`, `C = T^T (T . - z)` and `D = mu2 W^T H_delta'(W .)`.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::engine::{run_nfb, IterateTrace, RunConfig, RunStatus};
use crate::error::{Error, Result};
use crate::linalg::{
    discrete_gradient, pgm::load_pgm, BlurKernel, BlurOperator, DenseVector, GradientOperator, GrayImage,
    HaarOperator, LinearOperator,
};
use crate::methods::{build_kernel, initialize_fpdhf, InitInput, InitResult, MethodName, Scenario};
use crate::operators::{
    huber_gradient, huber_value, BoxProjection, DualBlock, L1Prox, MoreauInverse, SmoothConstant, SmoothMap,
    SplitProblem,
};
use crate::schedules::{AlphaFamily, ScheduleSpec};
use crate::Scalar;

use super::rng::{normal, rng_from_seed};

/// Decomposition depth of the wavelet penalty; image sides must be multiples of `2^HAAR_LEVEL`.
pub const HAAR_LEVEL: u32 = 3;
/// Upper bound on `||grad||` for forward differences with Neumann boundary.
pub const GRADIENT_NORM_BOUND: f64 = std::f64::consts::SQRT_2 * 2.0;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RestoreConfig {
    /// PGM file; a synthetic `size x size` test image is used when absent.
    pub image: Option<PathBuf>,
    pub size: usize,
    pub kernel: BlurKernel,
    pub noise_std: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub delta: f64,
    pub seed: u64,
    pub method: String,
    pub schedule: String,
    pub lambda: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub t: f64,
    pub max_iters: usize,
    pub rel_tol: f64,
}

impl Default for RestoreConfig {
    fn default() -> Self {
        Self {
            image: None,
            size: 64,
            kernel: BlurKernel::Avg3,
            noise_std: 1e-3,
            mu1: 1e-2,
            mu2: 1e-3,
            delta: 1e-2,
            seed: 0,
            method: "fpdhf".into(),
            schedule: "const:0".into(),
            lambda: 1.0,
            kappa1: 0.17,
            kappa2: 0.99,
            t: 0.999,
            max_iters: 50_000,
            rel_tol: 1e-6,
        }
    }
}

impl RestoreConfig {
    pub fn validate(&self) -> Result<()> {
        let block = 1usize << HAAR_LEVEL;
        if self.image.is_none() && (self.size < block || !self.size.is_power_of_two()) {
            return Err(Error::invalid(format!("size = {} must be a power of 2 >= {block}", self.size)));
        }
        for (name, v) in [("noise_std", self.noise_std), ("mu1", self.mu1), ("mu2", self.mu2), ("delta", self.delta)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} = {v} must be finite and nonnegative")));
            }
        }
        if !(self.delta > 0.0) {
            return Err(Error::invalid("delta must be positive"));
        }
        if self.max_iters == 0 || !(self.rel_tol > 0.0) {
            return Err(Error::invalid("max_iters and rel_tol must be positive"));
        }
        Ok(())
    }
}

/// Piecewise-constant test image with a smooth ramp, values in `[0, 1]`.
pub fn synthetic_image<T: Scalar>(size: usize) -> GrayImage<T> {
    let s = size as f64;
    GrayImage::from_fn(size, size, |r, c| {
        let (y, x) = ((r as f64 + 0.5) / s, (c as f64 + 0.5) / s);
        let mut v = 0.1 + 0.3 * x;
        if (0.15..0.55).contains(&x) && (0.1..0.45).contains(&y) {
            v = 0.85;
        }
        if (x - 0.68).powi(2) + (y - 0.65).powi(2) < 0.2f64.powi(2) {
            v = 0.55;
        }
        if (0.2..0.4).contains(&x) && (0.6..0.9).contains(&y) && ((x - 0.2) * 20.0).floor() as i64 % 2 == 0 {
            v = 1.0;
        }
        T::lit(v)
    })
}

/// `x -> T^T (T x - z)`; `T` is a normalized nonnegative symmetric blur with
/// symmetric boundary, so `||T|| = 1` and the map is 1-cocoercive.
pub struct BlurDataFit<T: Scalar> {
    pub blur: BlurOperator<T>,
    pub observation: DenseVector<T>,
}

impl<T: Scalar> SmoothMap<T> for BlurDataFit<T> {
    fn eval(&self, x: &DenseVector<T>) -> DenseVector<T> {
        let mut r = self.blur.apply(x);
        r -= &self.observation;
        self.blur.adjoint_apply(&r)
    }
    fn constant(&self) -> SmoothConstant<T> {
        SmoothConstant::Cocoercive(T::one())
    }
}

/// `x -> mu2 W^T H_delta'(W x)`, `mu2 / delta`-Lipschitz.
pub struct WaveletHuberGradient<T> {
    pub haar: HaarOperator,
    pub mu2: T,
    pub delta: T,
}

impl<T: Scalar> SmoothMap<T> for WaveletHuberGradient<T> {
    fn eval(&self, x: &DenseVector<T>) -> DenseVector<T> {
        let coeffs = LinearOperator::<T>::apply(&self.haar, x);
        LinearOperator::<T>::adjoint_apply(&self.haar, &huber_gradient(&coeffs, self.delta)).scaled(self.mu2)
    }
    fn constant(&self) -> SmoothConstant<T> {
        SmoothConstant::Lipschitz(self.mu2 / self.delta)
    }
}

pub struct RestoreInstance<T: Scalar> {
    pub original: GrayImage<T>,
    pub observation: GrayImage<T>,
    pub blur: BlurOperator<T>,
    pub haar: HaarOperator,
    pub mu1: T,
    pub mu2: T,
    pub delta: T,
    pub problem: SplitProblem<T>,
}

impl<T: Scalar> RestoreInstance<T> {
    pub fn width(&self) -> usize {
        self.original.width()
    }
    pub fn height(&self) -> usize {
        self.original.height()
    }

    /// Objective value at `x` (the box indicator is not included).
    pub fn objective(&self, x: &GrayImage<T>) -> T {
        let v = x.to_vector();
        let g = discrete_gradient(x).to_vector();
        let mut r = self.blur.apply(&v);
        r -= &self.observation.to_vector();
        let w = LinearOperator::<T>::apply(&self.haar, &v);
        self.mu1 * g.norm_l1() + T::lit(0.5) * r.norm_sq() + self.mu2 * huber_value(&w, self.delta)
    }
}

/// Builds the observation and the split problem. Image sides must be multiples of 8.
pub fn gen_restore<T: Scalar>(cfg: &RestoreConfig) -> Result<RestoreInstance<T>> {
    cfg.validate()?;
    let original: GrayImage<T> = match &cfg.image {
        Some(path) => load_pgm(path)?,
        None => synthetic_image(cfg.size),
    };
    let (w, h) = (original.width(), original.height());
    let block = 1usize << HAAR_LEVEL;
    if w % block != 0 || h % block != 0 {
        return Err(Error::invalid(format!("image is {w}x{h}; sides must be multiples of {block}")));
    }
    let blur = BlurOperator::new(w, h, cfg.kernel.matrix())?;
    let haar = HaarOperator::new(w, h, HAAR_LEVEL)?;

    let mut rng = rng_from_seed(cfg.seed);
    let noise_std = T::lit(cfg.noise_std);
    let mut z = blur.apply(&original.to_vector());
    for v in z.as_mut_slice() {
        *v += noise_std * normal::<T>(&mut rng);
    }
    let observation = GrayImage::from_vector(w, h, z.clone())?;

    let (mu1, mu2, delta) = (T::lit(cfg.mu1), T::lit(cfg.mu2), T::lit(cfg.delta));
    let dual = DualBlock {
        resolvent_b_inv: Arc::new(MoreauInverse { inner: Arc::new(L1Prox { weight: mu1 }) }),
        linear: Arc::new(GradientOperator { width: w, height: h }),
        norm_l: T::lit(GRADIENT_NORM_BOUND),
    };
    let mut problem = SplitProblem::new(w * h, Arc::new(BoxProjection { lo: T::zero(), hi: T::one() }))
        .with_dual(dual)?
        .with_cocoercive(Arc::new(BlurDataFit { blur: blur.clone(), observation: z }))?;
    if cfg.mu2 > 0.0 {
        problem = problem.with_lipschitz(Arc::new(WaveletHuberGradient { haar, mu2, delta }))?;
    }
    Ok(RestoreInstance { original, observation, blur, haar, mu1, mu2, delta, problem })
}

/// Peak signal-to-noise ratio in dB with peak 1; `+inf` for identical images.
pub fn psnr<T: Scalar>(restored: &GrayImage<T>, original: &GrayImage<T>) -> Result<f64> {
    restored.check_same_shape(original)?;
    let n = original.len() as f64;
    let sse: f64 = restored
        .pixels()
        .iter()
        .zip(original.pixels())
        .map(|(a, b)| (a.to_f64_lossy() - b.to_f64_lossy()).powi(2))
        .sum();
    if sse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (n / sse).log10())
}

#[derive(Debug, Clone, Serialize)]
pub struct RestoreSummary {
    pub width: usize,
    pub height: usize,
    pub kernel: BlurKernel,
    pub method: String,
    pub schedule: String,
    pub status: RunStatus,
    pub iterations: usize,
    pub final_rel_err: f64,
    pub elapsed_s: f64,
    pub psnr_observed: f64,
    pub psnr_restored: f64,
    pub objective_observed: f64,
    pub objective_restored: f64,
    pub tau: f64,
    pub sigma: f64,
    pub alpha0: f64,
    pub lambda: f64,
    pub psi: f64,
}

pub struct RestoreOutcome<T: Scalar> {
    pub instance: RestoreInstance<T>,
    pub restored: GrayImage<T>,
    pub init: InitResult<T>,
    pub trace: IterateTrace,
    pub summary: RestoreSummary,
}

/// Step sizes from `(t, kappa1, kappa2)`; the certificate is issued for the
/// limit of the inertia schedule and the configured relaxation.
pub fn restore_parameters<T: Scalar>(
    instance: &RestoreInstance<T>,
    cfg: &RestoreConfig,
) -> Result<(InitResult<T>, ScheduleSpec)> {
    let family: AlphaFamily = cfg.schedule.parse()?;
    let schedule = ScheduleSpec::new(family, cfg.lambda)?;
    let input = InitInput::for_problem(&instance.problem, T::lit(cfg.t), T::lit(cfg.kappa1), T::lit(cfg.kappa2))
        .scenario(Scenario::PickAlphaThenLambda, Some(T::lit(family.limit())), Some(T::lit(cfg.lambda)));
    Ok((initialize_fpdhf(&input)?, schedule))
}

/// Generates the instance and runs the configured method from `x_0 = z`, `v_0 = 0`.
pub fn run_restore<T: Scalar>(cfg: &RestoreConfig) -> Result<RestoreOutcome<T>> {
    let instance = gen_restore::<T>(cfg)?;
    let method: MethodName = cfg.method.parse()?;
    if !method.is_primal_dual() {
        return Err(Error::invalid(format!("restoration needs a primal-dual method, got {method}")));
    }
    let (init, schedule) = restore_parameters(&instance, cfg)?;
    let kernel = build_kernel(method, &instance.problem, init.tau, init.sigma)?;
    let (w, h) = (instance.width(), instance.height());
    let dual_dim = instance.problem.dual_dim();
    let z0 = DenseVector::concat(&instance.observation.to_vector(), &DenseVector::zeros(dual_dim));
    let run_cfg = RunConfig::certified(schedule, init.certificate(), cfg.max_iters, cfg.rel_tol);
    let start = Instant::now();
    let (z, trace, _) = run_nfb(kernel.as_ref(), z0.clone(), z0, run_cfg)?;
    let elapsed_s = start.elapsed().as_secs_f64();
    let (x, _) = z.split_at(w * h);
    let restored = GrayImage::from_vector(w, h, x)?;
    let summary = RestoreSummary {
        width: w,
        height: h,
        kernel: cfg.kernel,
        method: method.to_string(),
        schedule: schedule.name(),
        status: trace.status,
        iterations: trace.iterations,
        final_rel_err: trace.final_rel_err,
        elapsed_s,
        psnr_observed: psnr(&instance.observation, &instance.original)?,
        psnr_restored: psnr(&restored, &instance.original)?,
        objective_observed: instance.objective(&instance.observation).to_f64_lossy(),
        objective_restored: instance.objective(&restored).to_f64_lossy(),
        tau: init.tau.to_f64_lossy(),
        sigma: init.sigma.to_f64_lossy(),
        alpha0: schedule.alpha.at(0),
        lambda: schedule.lambda,
        psi: init.psi.to_f64_lossy(),
    };
    Ok(RestoreOutcome { instance, restored, init, trace, summary })
}
