//! Kernel SVMs trained by SMO, the angle-threshold spinor rule, and feature
//! construction on the complex-plane embedding.

mod angle;
mod kernel;
mod model_io;
mod smo;

pub use angle::{
    hyperbolic_distance, plane_features, spinor_features, ssm_angle_predict, AngleClassifier,
    SpinorFeatures,
};
pub use kernel::{kernel_eval, KernelSpec};
pub use model_io::{read_model, write_model};
pub use smo::{smo_solve, smo_train, svm_predict, SmoParams, SmoSolution, SvmModel};
