use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exec;
use crate::fields::{Boundary, Grid3, SymTensor2Field};
use crate::linalg::SymMat3;

/// Determinant below which a metric is treated as singular.
pub const METRIC_DET_FLOOR: f64 = 1e-14;

/// Ghost layers added on clamped axes when sampling analytic metrics, so
/// that the three nested derivatives behind the Bianchi residual all use
/// central stencils on the requested nodes.
pub const GHOST_LAYERS: usize = 3;

pub type MetricFn = Arc<dyn Fn([f64; 3]) -> SymMat3 + Send + Sync>;

/// Riemannian metric sampled on a grid, optionally backed by an exact formula.
///
/// When a formula is present the metric is also sampled on a padded copy of
/// the grid; derivatives are taken there and cropped back, which removes
/// one-sided stencils from every requested node.
#[derive(Clone)]
pub struct Metric3 {
    grid: Grid3,
    values: SymTensor2Field,
    closure: Option<MetricFn>,
    work: SymTensor2Field,
    offset: [usize; 3],
}

impl fmt::Debug for Metric3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Metric3")
            .field("grid", &self.grid)
            .field("analytic", &self.closure.is_some())
            .finish_non_exhaustive()
    }
}

fn validate_spd(field: &SymTensor2Field) -> Result<()> {
    field.check_finite()?;
    let grid = *field.grid();
    let bad = exec::try_collect_indexed(grid.len(), |idx| {
        let m = field.at(idx);
        if m.leading_minors().iter().all(|&d| d > 0.0) {
            Ok(())
        } else {
            Err(Error::NotPositiveDefinite { index: grid.coords(idx) })
        }
    });
    bad.map(|_| ())
}

impl Metric3 {
    /// Metric from gridded components; every node must be positive definite.
    pub fn from_field(values: SymTensor2Field) -> Result<Self> {
        validate_spd(&values)?;
        Ok(Self { grid: *values.grid(), work: values.clone(), values, closure: None, offset: [0; 3] })
    }

    /// Metric given by an exact formula, sampled on `grid` plus ghost layers.
    /// Error indices from validation refer to the padded sampling grid.
    pub fn analytic(grid: Grid3, f: impl Fn([f64; 3]) -> SymMat3 + Send + Sync + 'static) -> Result<Self> {
        let closure: MetricFn = Arc::new(f);
        let (padded, offset) = grid.padded(GHOST_LAYERS);
        let c = closure.clone();
        let work = SymTensor2Field::from_fn(padded, move |x| c(x));
        validate_spd(&work)?;
        let values = work.crop(grid, offset);
        Ok(Self { grid, values, closure: Some(closure), work, offset })
    }

    /// The identity metric on `grid`.
    pub fn euclidean(grid: Grid3) -> Self {
        Self::analytic(grid, |_| SymMat3::IDENTITY).expect("identity is positive definite")
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn components(&self) -> &SymTensor2Field {
        &self.values
    }

    pub fn is_analytic(&self) -> bool {
        self.closure.is_some()
    }

    /// Evaluates the exact formula, if any, at an arbitrary point.
    pub fn eval(&self, x: [f64; 3]) -> Option<SymMat3> {
        self.closure.as_ref().map(|f| f(x))
    }

    /// Sampling grid used for derivatives and the offset of `grid` inside it.
    pub(crate) fn work(&self) -> (&SymTensor2Field, [usize; 3]) {
        (&self.work, self.offset)
    }

    /// Boundary layers whose values rely on one-sided stencils and are left
    /// out of third-derivative checks. Zero for analytic metrics.
    pub fn unresolved_layers(&self) -> usize {
        let clamped = self.grid.boundary().contains(&Boundary::Clamped);
        if self.closure.is_none() && clamped {
            GHOST_LAYERS
        } else {
            0
        }
    }
}

pub(crate) fn inverse_nodes(metric: &SymTensor2Field) -> Result<Vec<SymMat3>> {
    let grid = *metric.grid();
    exec::try_collect_indexed(grid.len(), |idx| {
        let m = metric.at(idx);
        match m.inverse(METRIC_DET_FLOOR) {
            Some((inv, _)) => Ok(inv),
            None => Err(Error::SingularMetric { index: grid.coords(idx), det: m.det() }),
        }
    })
}

/// Pointwise inverse `g^{kl}` by adjugate over determinant.
pub fn inverse_metric(g: &Metric3) -> Result<SymTensor2Field> {
    let nodes = inverse_nodes(g.components())?;
    Ok(SymTensor2Field::from_nodes(*g.grid(), &nodes))
}
