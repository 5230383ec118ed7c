//! Metric tensor calculus on grids: inverse metric, Christoffel symbols,
//! Riemann and Ricci tensors, the second Bianchi residual, and the
//! normal-coordinate metric jet.
//!
//! Tensor indices in accessors are 1-based. Storage of symmetric 2-tensors
//! ([`crate::fields::SymTensor2Field`], [`crate::linalg::SymMat3`]) stays 0-based.

mod curvature;
mod jet;
mod metric;
mod symmetry;

pub use curvature::{
    christoffel, ricci, ricci_from_curvature, riemann_curvature, second_bianchi_residual, BianchiResidual,
    Christoffel3, ChristoffelPoint, Curvature3,
};
pub use jet::{jet_radius, jet_value, normal_jet_metric, JetMetric};
pub use metric::{inverse_metric, Metric3, MetricFn, GHOST_LAYERS, METRIC_DET_FLOOR};
pub use symmetry::{canonical_component, CurvaturePoint, CurvatureSlot, MATRIX_ENTRY_MAP, MATRIX_PAIRS};
