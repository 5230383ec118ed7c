//! Fluid flows read as Riemannian metrics on 3-manifolds.
//!
//! Velocity and stress fields are mapped to a curvature-operator field,
//! which is tested for definiteness, checked against the second Bianchi
//! identity, realized by explicit isometric embeddings, and used to locate
//! the onset of laminar-turbulent transition in shear flows.

// `!(x > y)` is how validation rejects NaN alongside out-of-range values,
// and index loops mirror tensor index notation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod continuum_map;
pub mod dynamics;
pub mod embedding;
pub mod exec;
pub mod fields;
pub mod geometry;
pub mod linalg;
pub mod onset;

pub use error::{Error, Result};
