//! Anisotropic d-dimensional bootstrap percolation.
//!
//! The `𝒩ᵣ^{a₁,…,a_d}` model infects a healthy site once at least `r` of its
//! neighbours are infected, where the neighbourhood of a site is the `aᵢ`
//! nearest sites in each of the `±eᵢ` directions. This crate provides:
//!
//! * [`lattice`]: neighbourhoods, blocks and bit-packed configurations on
//!   the cube `[L]^d` or the torus.
//! * [`engine`]: exact closure dynamics, with a counting fast path for
//!   `𝒩ᵣ` families and a generic fixed-point path for arbitrary families.
//! * [`families`]: stable directions and the supercritical / critical /
//!   subcritical classification.
//! * [`spanning`]: strong connectivity, diameters, internally filled and
//!   internally spanned blocks, the components process and
//!   Aizenman–Lebowitz witnesses.
//! * [`experiments`]: Monte Carlo estimators for percolation probability,
//!   critical lengths, cluster statistics and scaling fits.

pub mod engine;
pub mod error;
pub mod experiments;
pub mod families;
pub mod grid_file;
pub mod lattice;
pub mod spanning;

pub use engine::{closure, make_nr_family, percolates, step, UpdateFamily};
pub use error::{Error, Result};
pub use families::{classify_nr, CriticalityLabel, Direction, StableSetDescriptor};
pub use lattice::{Block, Configuration, Geometry, NeighborhoodSpec, Site};
pub use spanning::{ComponentCollection, StrongGraphParam};
