//! Resolvents, smooth maps and the split problem they assemble into.

mod problem;
mod prox;
mod smooth;

pub use problem::{DualBlock, LinearHandle, SplitProblem};
pub use prox::{
    project_box, project_nonneg, resolvent_of_inverse, soft_threshold, BlockResolvent,
    BoxProjection, IdentityResolvent, L1Prox, LInfBallProjection, MoreauInverse,
    NonnegProjection, Resolvent, ResolventHandle,
};
pub use smooth::{
    huber_gradient, huber_value, least_squares_gradient, skew_constraint_map, FnMap,
    LeastSquaresGradient, PrimalLeastSquares, SkewConstraintMap, SmoothConstant, SmoothMap,
    SmoothMapHandle, ZeroMap,
};
