//! Hyperbolic fundamental polygons, Bowen–Series style boundary maps, and
//! their entropies.
//!
//! The crate covers the disk model and its Möbius maps, canonical
//! `(8g-4)`-gons with side pairings, Maskit's genus-2 coordinates, Markov
//! partitions of the boundary maps, Perron eigendata, constant-slope
//! conjugacies, and geodesic-current quadrature.

pub mod boundary;
pub mod current;
pub mod disk;
pub mod error;
pub mod format;
pub mod maskit;
pub mod parry;
pub mod polygon;
pub mod quadrature;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
