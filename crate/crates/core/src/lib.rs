//! Correspondences on K3 surfaces: the tangent-line correspondence on
//! quartic surfaces, the tangent-plane correspondence on (2,3) complete
//! intersections, and certificates for torsion divisor classes built from
//! them.

pub mod config;
pub mod corr_j;
pub mod corr_t;
pub mod divisor;
pub mod error;
pub mod geom;
pub mod homotopy;
pub mod linalg;
pub mod poly;
pub mod suite;
pub mod surfaces;
pub mod torsion;

pub use error::{Error, Result};
