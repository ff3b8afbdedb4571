//! Entropies, relative-entropy moments, hypothesis testing and the brackets
//! relating the quantum and classical pictures.

pub mod bracket;
pub mod classical;
pub mod hypothesis;
pub mod quantum;

pub use bracket::{
    f1, f2, product_dh_bracket, q_to_cl_bracket, xi, BracketConstants, BracketVariant, CopyMoments,
    DhBracket,
};
pub use classical::{
    classical_beta, classical_dh, info_spectrum, kl_divergence, llr_variance, shannon_entropy,
    third_abs_moment, ClassicalDistribution, JointLogLikelihood, LlrAtom,
};
pub use hypothesis::{dh, dh_blocks, quantum_beta, quantum_beta_blocks, NpBlock, NpOutcome};
pub use quantum::{
    entropy, ns_moments, nussbaum_skola, relative_entropy, relative_entropy_variance,
};
