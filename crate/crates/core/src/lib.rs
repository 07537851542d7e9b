//! Phase-field minimization of the Modica-Mortola perimeter with a diffuse
//! connectedness penalty built from geodesic distances between the
//! components of the high phase.
//!
//! The crate is organized bottom-up:
//!
//! - [`grid`] and [`pgm`]: the uniform grid on the unit square, nodal
//!   fields, stencils, quadrature and raster I/O.
//! - [`energetics`]: the double-well potential, Modica-Mortola energy and
//!   the fidelity term.
//! - [`topology`]: profile functions, component labeling, Dijkstra
//!   geodesics and the connectedness energy with its subgradient.
//! - [`flow`]: explicit gradient-flow time stepping and experiment config.
//! - [`oracle`]: sharp-interface reference values (perimeter, Steiner trees).
//! - [`presets`]: analytically generated experiment inputs.
//!
//! Inner loops run on rayon when the `parallel` feature is enabled (the
//! default). Results do not depend on the thread count.

pub mod energetics;
pub mod error;
pub mod flow;
pub mod grid;
pub mod oracle;
pub mod par;
pub mod pgm;
pub mod presets;
pub mod topology;

pub use error::{Error, Result};
pub use grid::{BinaryMask, BoundaryMode, Grid2D, ScalarField};
