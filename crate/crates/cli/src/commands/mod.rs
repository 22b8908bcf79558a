pub mod equiv;
pub mod param_check;
pub mod qp_bench;
pub mod restore;
pub mod sweep;
