//! Kinetic Monte Carlo engine for two-opinion spin dynamics on block
//! hypergraphs of the integer lattice, together with the exact geometric
//! and probabilistic identities that the dynamics satisfy.
//!
//! The crate is organized around one simulation engine and four analysis
//! toolboxes:
//!
//! - [`lattice`]: finite lattice windows and tori, bit configurations,
//!   and the family of `n^d` block hyperedges.
//! - [`dynamics`]: exact event-driven simulation (one rate-one Poisson
//!   clock per hyperedge), the majority update rule with ties favoring
//!   opinion 1, a per-vertex voter baseline, and a replayable event log.
//! - [`dual1d`]: one-dimensional front and backward center-path analysis.
//! - [`contour2d`]: dual-lattice contours of finite 2D clusters, corner
//!   censuses, and the corner-counting identity for regular clusters.
//! - [`slice2d`]: the height-three slice process for 2x2 blocks, its
//!   exact update catalog, and drift identities.
//! - [`stats`]: replica estimators (densities, disagreement, occupation
//!   time, extinction time).
//!
//! Everything is deterministic given a seed: replicas own independent
//! counter-based RNG streams, so results do not depend on scheduling.
//!
//! The crate is `no_std` (with `alloc`); file and thread concerns live in
//! the companion CLI crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod contour2d;
pub mod dual1d;
pub mod dynamics;
pub mod lattice;
pub mod rng;
pub mod slice2d;
pub mod stats;

pub use lattice::{Boundary, Configuration, Coord, HyperedgeFamily, LatticeGeometry};
pub use rng::RngStream;
