//! Absolute dimension of quantum ensembles.
//!
//! The absolute dimension of an ensemble `{ρ_x}` is the smallest `r` such that
//! the ensemble is a mixture of ensembles each confined to some rank-`r`
//! subspace. This crate bounds it from below with linear witnesses and
//! optimal discrimination ([`witness`], [`discrimination`]) and from above
//! with explicit simulations, either in closed form ([`analytic`]) or from a
//! semidefinite program over a family of subspaces ([`simulate_sdp`]).
//! [`oracle`] holds independent checks and [`io`] / [`cli`] the file formats
//! and command-line front end.

pub mod analytic;
pub mod cli;
pub mod discrimination;
pub mod ensemble;
pub mod error;
pub mod haar;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod sdp;
pub mod simulate_sdp;
pub mod simulation;
pub mod stats;
pub mod witness;

pub use error::{Error, Result};
