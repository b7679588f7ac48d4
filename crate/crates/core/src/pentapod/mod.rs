//! Linear pentapod model: architecture, poses, Jacobian, minors and the
//! singularity polynomial `F` with its quadric specializations.

mod architecture;
mod jacobian;
mod model;

pub use architecture::{normalize_frame, Architecture, Configuration, SimilarityTransform};
pub use jacobian::{
    is_singular, jacobian, jacobian_symbolic, minors_at, minors_symbolic, normalized_minors_at, pose_vars, Jacobian,
    SingularityCheck, DEFAULT_SIGMA_TOL, POSE_VARS,
};
pub use model::{
    extract_f, extract_f_with_pair, Derivatives, QuadricForm, SingularityModel, DEFAULT_F_TOL, SUPPORT_TEMPLATE,
};
