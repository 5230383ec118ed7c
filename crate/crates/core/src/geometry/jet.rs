//! Quadratic metric jet in normal coordinates with prescribed curvature at
//! the origin: `g_ij(x) = δ_ij − (1/3) R0_ikjl x_k x_l`.

use super::curvature::riemann_curvature;
use super::metric::Metric3;
use super::symmetry::CurvaturePoint;
use crate::error::{Error, Result};
use crate::fields::Grid3;
use crate::linalg::SymMat3;

#[derive(Debug, Clone)]
pub struct JetMetric {
    pub metric: Metric3,
    /// Radius of the ball around the origin on which the jet is guaranteed
    /// positive definite; infinite when the curvature operator is negative
    /// semidefinite.
    pub radius: f64,
    /// Flat index of the origin in the metric grid.
    pub origin: usize,
    pub curvature: CurvaturePoint,
}

/// Jet value at `x` for curvature `r0`.
pub fn jet_value(r0: &CurvaturePoint, x: [f64; 3]) -> SymMat3 {
    SymMat3(std::array::from_fn(|s| {
        let (i, j) = crate::linalg::SYM_PAIRS[s];
        let mut q = 0.0;
        for k in 0..3 {
            for l in 0..3 {
                q += r0.get(i + 1, k + 1, j + 1, l + 1) * x[k] * x[l];
            }
        }
        let delta = if i == j { 1.0 } else { 0.0 };
        delta - q / 3.0
    }))
}

/// Radius `sqrt(3 / λ_max)` of the curvature operator on bivectors. Since
/// `v·Q(x)v = R(v, x, v, x) <= λ_max |v|² |x|²`, the jet stays positive
/// definite inside it.
pub fn jet_radius(r0: &CurvaturePoint) -> f64 {
    let lmax = r0.bivector_operator().eigenvalues()[0];
    if lmax > 0.0 {
        (3.0 / lmax).sqrt()
    } else {
        f64::INFINITY
    }
}

/// Builds the jet over `grid`, which must contain the origin as a node.
pub fn normal_jet_metric(r0: &CurvaturePoint, grid: Grid3) -> Result<JetMetric> {
    if !r0.is_finite() {
        return Err(Error::Domain("curvature at the origin must be finite".into()));
    }
    let h = grid.spacing();
    let o = grid.origin();
    let ijk: [f64; 3] = std::array::from_fn(|a| -o[a] / h[a]);
    let near: [usize; 3] = std::array::from_fn(|a| ijk[a].round().max(0.0) as usize);
    let on_node = (0..3).all(|a| (ijk[a] - near[a] as f64).abs() < 1e-9 && near[a] < grid.dims()[a]);
    if !on_node {
        return Err(Error::Domain("grid has no node at the origin".into()));
    }
    let radius = jet_radius(r0);
    let nearest = h.iter().cloned().fold(f64::INFINITY, f64::min);
    if radius <= nearest {
        return Err(Error::NeighborhoodTooSmall { radius });
    }
    let r = *r0;
    let metric = Metric3::analytic(grid, move |x| jet_value(&r, x))?;
    Ok(JetMetric { metric, radius, origin: grid.index(near), curvature: *r0 })
}

impl JetMetric {
    /// Finite-difference curvature of the jet at the origin.
    pub fn curvature_at_origin(&self) -> Result<CurvaturePoint> {
        Ok(riemann_curvature(&self.metric)?.at(self.origin))
    }

    /// Largest deviation of the recovered curvature from the prescribed one.
    pub fn round_trip_error(&self) -> Result<f64> {
        let got = self.curvature_at_origin()?;
        Ok((0..6).fold(0.0_f64, |a, s| a.max((got.0[s] - self.curvature.0[s]).abs())))
    }
}
