//! Well-balanced, entropy-controlled Gauss-Lobatto DGSEM for the shallow water
//! equations with bathymetry, friction and Coriolis forces.
//!
//! The crate is organised bottom-up: [`quadrature`] builds the nodal basis,
//! [`physics`] holds the pointwise model, [`equilibria`] computes analytical
//! and discrete steady states, [`solver`] and [`solver2d`] assemble and
//! integrate the semi-discrete schemes, and [`harness`] runs the numerical
//! experiments whose results [`output`] writes to CSV.

pub mod equilibria;
pub mod error;
pub mod harness;
pub mod mesh;
pub mod output;
pub mod physics;
pub mod quadrature;
pub mod solver;
pub mod solver2d;

pub use error::{Error, Result};
pub use mesh::{Field1D, Field2D, Mesh1D, Mesh2D};
pub use physics::{EntropyMode, PhysParams, SourceVariant, State};
pub use quadrature::GLBasis;
pub use solver::{Scheme1D, SchemeConfig};
