//! Second-order rate approximation, finite-blocklength bounds and exact
//! small tensor powers.

pub mod bounds;
pub mod normal;
pub mod tensor;

pub use bounds::{
    achievability_lower, build_joint_pair, converse_upper, rate_curve, BoundValue, CurveConstants,
    CurveInputs, CurvePoint, JointCQPair, VariantChoice,
};
pub use normal::{phi, phi_inv, second_order};
pub use tensor::{iid_dh_exact, TENSOR_BUDGET};
