//! Holevo capacity, channel dispersion and finite-blocklength rate bounds for
//! classical-quantum channels, computed from the geometry of the channel image.
//!
//! The pipeline runs bottom-up:
//!
//! - [`operator`]: Hermitian operators, density matrices, spectra.
//! - [`divergences`]: entropies, relative-entropy moments, hypothesis testing
//!   and the brackets between quantum and classical information spectra.
//! - [`geometry`]: divergence radius and center of a finite state set,
//!   peripheral states, dispersion ranges and nets of states.
//! - [`channels`]: Kraus channels and the discretized channel image.
//! - [`blocklength`]: second-order approximation and rigorous bounds.
//! - [`cli`]: the `cqrate` command-line front end.
//!
//! All quantities are in nats unless a function says otherwise.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blocklength;
pub mod channels;
pub mod cli;
pub mod divergences;
pub mod error;
pub mod geometry;
pub mod operator;
pub mod sampling;

pub use error::{Error, Result};
pub use operator::{DensityMatrix, HermitianOperator};
