//! Divergence radius, its center, peripheral sets, dispersion ranges and
//! finite nets of states.

pub mod center;
pub mod dispersion;
pub mod lp;
pub mod net;
mod polish;
pub mod sphere;
pub mod state_set;

pub use center::{
    cluster_peripheral, divergence_center, divergence_center_with, peripheral_set, CenterOptions,
    Init, RadiusReport, RadiusSummary,
};
pub use dispersion::{
    caratheodory_prune, dispersion_range, prune_range, solve_dispersion, DispersionRange,
    PrunedDecomposition,
};
pub use net::{gamma_net, GammaNet, NetSummary};
pub use sphere::symmetric_bloch_grid;
pub use state_set::{holevo_quantity, StateSet};
