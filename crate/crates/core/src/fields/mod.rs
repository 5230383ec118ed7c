//! Uniform structured 3D grids and the fields sampled on them.
//!
//! Storage is row-major with `x1` fastest: the flat index of node
//! `(i, j, k)` is `i + nx * (j + ny * k)`. Binary payloads written by the
//! CLI rely on this order.

mod diff;
mod poisson;
mod profile;

pub(crate) use diff::line_derivative;
pub use diff::{derivative_at, partial_derivative, partial_derivative_with, FdOrder};
pub use poisson::{
    laplacian_periodic, pressure_rhs, solve_periodic_poisson, solve_pressure_poisson,
    solve_pressure_poisson_with, Gauge, PoissonConfig, PoissonSolution,
};
pub use profile::{cumulative_integral, Profile1D};

use crate::error::{Error, Result};
use crate::exec;
use crate::linalg::{Mat3, SymMat3};

/// Smallest admissible node count per axis.
pub const MIN_DIM: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    Clamped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X1,
    X2,
    X3,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X1, Axis::X2, Axis::X3];

    /// 0-based position.
    #[inline]
    pub const fn index(self) -> usize {
        match self {
            Axis::X1 => 0,
            Axis::X2 => 1,
            Axis::X3 => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Axis> {
        Self::ALL.get(i).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid3 {
    dims: [usize; 3],
    spacing: [f64; 3],
    origin: [f64; 3],
    boundary: [Boundary; 3],
}

impl Grid3 {
    pub fn new(dims: [usize; 3], spacing: [f64; 3], origin: [f64; 3], boundary: [Boundary; 3]) -> Result<Self> {
        for a in 0..3 {
            if dims[a] < MIN_DIM {
                return Err(Error::InvalidGrid(format!(
                    "axis {} has {} nodes, need at least {MIN_DIM}",
                    a + 1,
                    dims[a]
                )));
            }
            if !(spacing[a].is_finite() && spacing[a] > 0.0) {
                return Err(Error::InvalidGrid(format!("axis {} spacing {} is not positive", a + 1, spacing[a])));
            }
            if !origin[a].is_finite() {
                return Err(Error::InvalidGrid(format!("axis {} origin is not finite", a + 1)));
            }
        }
        dims[0]
            .checked_mul(dims[1])
            .and_then(|v| v.checked_mul(dims[2]))
            .ok_or_else(|| Error::InvalidGrid("node count overflows".into()))?;
        Ok(Self { dims, spacing, origin, boundary })
    }

    /// Periodic grid on `[0, L_a)` with `n_a` nodes per axis.
    pub fn periodic(n: [usize; 3], lengths: [f64; 3]) -> Result<Self> {
        let spacing = std::array::from_fn(|a| lengths[a] / n[a] as f64);
        Self::new(n, spacing, [0.0; 3], [Boundary::Periodic; 3])
    }

    /// Clamped grid with nodes on both ends of `[lo_a, hi_a]`.
    pub fn clamped(n: [usize; 3], lo: [f64; 3], hi: [f64; 3]) -> Result<Self> {
        let spacing = std::array::from_fn(|a| (hi[a] - lo[a]) / (n[a].max(2) - 1) as f64);
        Self::new(n, spacing, lo, [Boundary::Clamped; 3])
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }
    pub fn spacing(&self) -> [f64; 3] {
        self.spacing
    }
    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }
    pub fn boundary(&self) -> [Boundary; 3] {
        self.boundary
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest spacing, the `h` used in convergence statements.
    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().fold(0.0_f64, |a, &b| a.max(b))
    }

    #[inline]
    pub fn index(&self, ijk: [usize; 3]) -> usize {
        ijk[0] + self.dims[0] * (ijk[1] + self.dims[1] * ijk[2])
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.dims[0];
        let rest = idx / self.dims[0];
        [i, rest % self.dims[1], rest / self.dims[1]]
    }

    #[inline]
    pub fn stride(&self, axis: Axis) -> usize {
        match axis {
            Axis::X1 => 1,
            Axis::X2 => self.dims[0],
            Axis::X3 => self.dims[0] * self.dims[1],
        }
    }

    #[inline]
    pub fn position(&self, ijk: [usize; 3]) -> [f64; 3] {
        std::array::from_fn(|a| self.origin[a] + ijk[a] as f64 * self.spacing[a])
    }

    #[inline]
    pub fn point(&self, idx: usize) -> [f64; 3] {
        self.position(self.coords(idx))
    }

    /// Grid extended by `layers` ghost nodes on both ends of every clamped
    /// axis, together with the index offset of the original nodes.
    pub fn padded(&self, layers: usize) -> (Grid3, [usize; 3]) {
        let mut dims = self.dims;
        let mut origin = self.origin;
        let mut offset = [0; 3];
        for a in 0..3 {
            if self.boundary[a] == Boundary::Clamped {
                dims[a] += 2 * layers;
                origin[a] -= layers as f64 * self.spacing[a];
                offset[a] = layers;
            }
        }
        (Grid3 { dims, spacing: self.spacing, origin, boundary: self.boundary }, offset)
    }

    /// Distance of node `ijk` to the nearest clamped boundary, in nodes.
    /// Periodic axes never constrain it.
    pub fn clamped_depth(&self, ijk: [usize; 3]) -> usize {
        (0..3)
            .filter(|&a| self.boundary[a] == Boundary::Clamped)
            .map(|a| ijk[a].min(self.dims[a] - 1 - ijk[a]))
            .min()
            .unwrap_or(usize::MAX)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid3,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid3, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_vec_unchecked(grid: Grid3, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn constant(grid: Grid3, value: f64) -> Self {
        Self { grid, values: vec![value; grid.len()] }
    }

    pub fn zeros(grid: Grid3) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Samples `f` at every node position.
    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> f64 + Send + Sync) -> Self {
        let values = exec::collect_indexed(grid.len(), |idx| f(grid.point(idx)));
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn at_ijk(&self, ijk: [usize; 3]) -> f64 {
        self.values[self.grid.index(ijk)]
    }

    /// First non-finite value, reported by grid index.
    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(idx) => Err(Error::NonFinite { index: self.grid.coords(idx) }),
            None => Ok(()),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .fold(0.0_f64, |a, (x, y)| a.max((x - y).abs()))
    }

    /// Maximum of `|self|` over nodes at least `depth` nodes from every
    /// clamped boundary.
    pub fn max_abs_interior(&self, depth: usize) -> f64 {
        let g = self.grid;
        exec::max_indexed(g.len(), |idx| {
            if g.clamped_depth(g.coords(idx)) >= depth {
                self.values[idx].abs()
            } else {
                0.0
            }
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Send + Sync) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(other.values.iter()).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { grid: self.grid, values })
    }

    /// Restricts a field on a padded grid back to `target`, whose first node
    /// sits at `offset` inside `self`.
    pub fn crop(&self, target: Grid3, offset: [usize; 3]) -> Self {
        let values = exec::collect_indexed(target.len(), |idx| {
            let c = target.coords(idx);
            self.at_ijk([c[0] + offset[0], c[1] + offset[1], c[2] + offset[2]])
        });
        Self { grid: target, values }
    }
}

fn ensure_same_grid(fields: &[&ScalarField]) -> Result<Grid3> {
    let grid = fields[0].grid;
    if fields.iter().any(|f| f.grid != grid) {
        return Err(Error::GridMismatch);
    }
    Ok(grid)
}

/// Turns per-node arrays into one field per array slot.
pub(crate) fn split_nodes<const N: usize>(grid: Grid3, nodes: &[[f64; N]]) -> [ScalarField; N] {
    std::array::from_fn(|c| ScalarField::from_vec_unchecked(grid, nodes.iter().map(|v| v[c]).collect()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    comps: [ScalarField; 3],
}

impl VectorField {
    pub fn new(comps: [ScalarField; 3]) -> Result<Self> {
        ensure_same_grid(&[&comps[0], &comps[1], &comps[2]])?;
        Ok(Self { comps })
    }

    pub fn zeros(grid: Grid3) -> Self {
        Self { comps: std::array::from_fn(|_| ScalarField::zeros(grid)) }
    }

    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> [f64; 3] + Send + Sync) -> Self {
        let nodes = exec::collect_indexed(grid.len(), |idx| f(grid.point(idx)));
        Self::from_nodes(grid, &nodes)
    }

    pub fn from_nodes(grid: Grid3, nodes: &[[f64; 3]]) -> Self {
        Self {
            comps: std::array::from_fn(|c| {
                ScalarField::from_vec_unchecked(grid, nodes.iter().map(|v| v[c]).collect())
            }),
        }
    }

    pub fn grid(&self) -> &Grid3 {
        self.comps[0].grid()
    }

    pub fn component(&self, axis: Axis) -> &ScalarField {
        &self.comps[axis.index()]
    }

    pub fn components(&self) -> &[ScalarField; 3] {
        &self.comps
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [f64; 3] {
        [self.comps[0].at(idx), self.comps[1].at(idx), self.comps[2].at(idx)]
    }

    pub fn check_finite(&self) -> Result<()> {
        self.comps.iter().try_for_each(|c| c.check_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0_f64, |a, c| a.max(c.max_abs()))
    }

    pub fn max_abs_diff(&self, other: &VectorField) -> f64 {
        (0..3).fold(0.0_f64, |a, c| a.max(self.comps[c].max_abs_diff(&other.comps[c])))
    }

    pub fn max_abs_interior(&self, depth: usize) -> f64 {
        self.comps.iter().fold(0.0_f64, |a, c| a.max(c.max_abs_interior(depth)))
    }

    /// Discrete divergence with the given stencil order.
    pub fn divergence(&self, order: FdOrder) -> Result<ScalarField> {
        let mut out = partial_derivative_with(&self.comps[0], Axis::X1, order)?;
        for axis in [Axis::X2, Axis::X3] {
            let d = partial_derivative_with(&self.comps[axis.index()], axis, order)?;
            out = out.zip_with(&d, |a, b| a + b)?;
        }
        Ok(out)
    }
}

/// Symmetric rank-2 tensor field, components in `(11, 22, 33, 12, 13, 23)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor2Field {
    comps: [ScalarField; 6],
}

impl SymTensor2Field {
    pub fn new(comps: [ScalarField; 6]) -> Result<Self> {
        let refs: Vec<&ScalarField> = comps.iter().collect();
        ensure_same_grid(&refs)?;
        Ok(Self { comps })
    }

    pub fn from_nodes(grid: Grid3, nodes: &[SymMat3]) -> Self {
        Self {
            comps: std::array::from_fn(|c| {
                ScalarField::from_vec_unchecked(grid, nodes.iter().map(|m| m.0[c]).collect())
            }),
        }
    }

    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> SymMat3 + Send + Sync) -> Self {
        let nodes = exec::collect_indexed(grid.len(), |idx| f(grid.point(idx)));
        Self::from_nodes(grid, &nodes)
    }

    pub fn constant(grid: Grid3, m: SymMat3) -> Self {
        Self { comps: std::array::from_fn(|c| ScalarField::constant(grid, m.0[c])) }
    }

    pub fn grid(&self) -> &Grid3 {
        self.comps[0].grid()
    }

    /// Component `(i, j)`, 0-based; `(j, i)` returns the same field.
    pub fn component(&self, i: usize, j: usize) -> &ScalarField {
        &self.comps[crate::linalg::sym_slot(i, j)]
    }

    pub fn components(&self) -> &[ScalarField; 6] {
        &self.comps
    }

    #[inline]
    pub fn at(&self, idx: usize) -> SymMat3 {
        SymMat3(std::array::from_fn(|c| self.comps[c].at(idx)))
    }

    pub fn check_finite(&self) -> Result<()> {
        self.comps.iter().try_for_each(|c| c.check_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0_f64, |a, c| a.max(c.max_abs()))
    }

    pub fn max_abs_diff(&self, other: &SymTensor2Field) -> f64 {
        (0..6).fold(0.0_f64, |a, c| a.max(self.comps[c].max_abs_diff(&other.comps[c])))
    }

    pub fn max_abs_interior(&self, depth: usize) -> f64 {
        self.comps.iter().fold(0.0_f64, |a, c| a.max(c.max_abs_interior(depth)))
    }

    pub fn crop(&self, target: Grid3, offset: [usize; 3]) -> Self {
        Self { comps: std::array::from_fn(|c| self.comps[c].crop(target, offset)) }
    }
}

/// General (non-symmetric) rank-2 tensor field, row-major components.
/// Used for deformation gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor2Field {
    comps: [ScalarField; 9],
}

impl Tensor2Field {
    pub fn new(comps: [ScalarField; 9]) -> Result<Self> {
        let refs: Vec<&ScalarField> = comps.iter().collect();
        ensure_same_grid(&refs)?;
        Ok(Self { comps })
    }

    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> Mat3 + Send + Sync) -> Self {
        let nodes = exec::collect_indexed(grid.len(), |idx| f(grid.point(idx)));
        Self {
            comps: std::array::from_fn(|c| {
                ScalarField::from_vec_unchecked(grid, nodes.iter().map(|m| m[c / 3][c % 3]).collect())
            }),
        }
    }

    pub fn grid(&self) -> &Grid3 {
        self.comps[0].grid()
    }

    pub fn components(&self) -> &[ScalarField; 9] {
        &self.comps
    }

    #[inline]
    pub fn at(&self, idx: usize) -> Mat3 {
        std::array::from_fn(|i| std::array::from_fn(|j| self.comps[3 * i + j].at(idx)))
    }

    pub fn check_finite(&self) -> Result<()> {
        self.comps.iter().try_for_each(|c| c.check_finite())
    }
}
