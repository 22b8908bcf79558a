use nalgebra::DMatrix;
use nfb_core::experiments::{normal_matrix, normal_vector, rng_from_seed};
use nfb_core::linalg::{
    discrete_divergence, discrete_gradient, haar_inverse, haar_transform, op_norm_estimate, BlurKernel, BlurOperator,
    DenseMatrix, DenseVector, GradientOperator, GradientPair, GrayImage, HaarOperator, LinearOperator,
};

/// Column-by-column dense form of a linear operator.
fn dense(op: &dyn LinearOperator<f64>) -> DMatrix<f64> {
    let (n, m) = (op.domain_dim(), op.codomain_dim());
    let mut out = DMatrix::zeros(m, n);
    for j in 0..n {
        let col = op.apply(&DenseVector::basis(n, j));
        for i in 0..m {
            out[(i, j)] = col[i];
        }
    }
    out
}

fn top_singular_value(a: &DMatrix<f64>) -> f64 {
    a.clone().svd(false, false).singular_values.max()
}

fn adjoint_gap(op: &dyn LinearOperator<f64>, seed: u64) -> f64 {
    let mut rng = rng_from_seed(seed);
    let x = normal_vector(&mut rng, op.domain_dim());
    let y = normal_vector(&mut rng, op.codomain_dim());
    (op.apply(&x).dot(&y) - x.dot(&op.adjoint_apply(&y))).abs() / (x.norm() * y.norm())
}

#[test]
fn matvec_agrees_with_nalgebra() {
    let mut rng = rng_from_seed(1);
    let a: DenseMatrix<f64> = normal_matrix(&mut rng, 7, 11);
    let x = normal_vector(&mut rng, 11);
    let y = normal_vector(&mut rng, 7);
    let na = DMatrix::from_row_slice(7, 11, a.as_slice());
    let ax = &na * nalgebra::DVector::from_column_slice(x.as_slice());
    let aty = na.transpose() * nalgebra::DVector::from_column_slice(y.as_slice());
    assert!(a.matvec(&x).unwrap().as_slice().iter().zip(ax.iter()).all(|(p, q)| (p - q).abs() < 1e-12));
    assert!(a.matvec_t(&y).unwrap().as_slice().iter().zip(aty.iter()).all(|(p, q)| (p - q).abs() < 1e-12));
}

#[test]
fn power_method_matches_svd() {
    for seed in 0..4 {
        let mut rng = rng_from_seed(seed);
        let a: DenseMatrix<f64> = normal_matrix(&mut rng, 30, 50);
        let est = op_norm_estimate(&a, 50, 20_000, seed).unwrap();
        let exact = top_singular_value(&DMatrix::from_row_slice(30, 50, a.as_slice()));
        assert!(est <= exact * (1.0 + 1e-12));
        assert!((est - exact).abs() < 1e-6 * exact, "{est} vs {exact}");
    }
}

#[test]
fn blur_norms_are_one() {
    for kernel in [BlurKernel::Avg3, BlurKernel::Avg9, BlurKernel::Gauss3] {
        let op = BlurOperator::new(16, 16, kernel.matrix()).unwrap();
        let s = top_singular_value(&dense(&op));
        assert!((s - 1.0).abs() < 1e-10, "{kernel:?}: {s}");
        let t = dense(&op);
        assert!((&t - t.transpose()).amax() < 1e-14, "{kernel:?} not symmetric");
    }
}

#[test]
fn gradient_norm_below_bound() {
    let op = GradientOperator { width: 12, height: 12 };
    let s = top_singular_value(&dense(&op));
    assert!(s <= 8f64.sqrt());
    assert!(s > 2.7);
}

#[test]
fn operators_are_adjoint_consistent() {
    let ops: Vec<Box<dyn LinearOperator<f64>>> = vec![
        Box::new(GradientOperator { width: 16, height: 8 }),
        Box::new(HaarOperator::new(16, 8, 3).unwrap()),
        Box::new(BlurOperator::new(16, 8, BlurKernel::Avg9.matrix()).unwrap()),
        Box::new(BlurOperator::new(16, 8, BlurKernel::Gauss3.matrix()).unwrap()),
    ];
    for (i, op) in ops.iter().enumerate() {
        for seed in 0..5 {
            assert!(adjoint_gap(op.as_ref(), seed) < 1e-10, "operator {i}");
        }
    }
}

#[test]
fn gradient_divergence_duality() {
    let mut rng = rng_from_seed(9);
    let img = GrayImage::new(24, 16, normal_vector::<f64>(&mut rng, 24 * 16).into_vec()).unwrap();
    let p = GradientPair::from_vector(24, 16, &normal_vector(&mut rng, 2 * 24 * 16)).unwrap();
    let lhs = discrete_gradient(&img).dot(&p);
    let rhs = -img.dot(&discrete_divergence(&p).unwrap());
    assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
}

#[test]
fn haar_is_orthogonal() {
    let op = HaarOperator::new(16, 16, 3).unwrap();
    let w = dense(&op);
    let eye = DMatrix::<f64>::identity(256, 256);
    assert!((w.transpose() * &w - eye).amax() < 1e-10);
    let mut rng = rng_from_seed(2);
    let img = GrayImage::new(32, 16, normal_vector::<f64>(&mut rng, 512).into_vec()).unwrap();
    let back = haar_inverse(&haar_transform(&img, 3).unwrap(), 3).unwrap();
    assert!(back.pixels().iter().zip(img.pixels()).all(|(a, b)| (a - b).abs() < 1e-12));
    assert!((haar_transform(&img, 3).unwrap().norm_sq() - img.norm_sq()).abs() < 1e-10 * img.norm_sq());
    assert!(HaarOperator::new(12, 16, 3).is_err());
}

#[test]
fn single_precision_tracks_double() {
    let mut rng = rng_from_seed(3);
    let a: DenseMatrix<f64> = normal_matrix(&mut rng, 10, 10);
    let x = normal_vector::<f64>(&mut rng, 10);
    let a32 = DenseMatrix::<f32>::from_fn(10, 10, |i, j| a.get(i, j) as f32);
    let y32 = a32.matvec(&x.cast()).unwrap();
    let y = a.matvec(&x).unwrap();
    assert!(y.iter().zip(y32.iter()).all(|(p, q)| (p - *q as f64).abs() < 1e-4 * (1.0 + p.abs())));
}
