//! Pressure Poisson equation `Δp = -∂i∂j(ui uj)` on fully periodic grids.
//!
//! The right-hand side nests first-derivative stencils; the Laplacian is
//! the compact 7-point operator. Conjugate gradients run on `-Δ`, which is
//! SPD on zero-mean fields, and every residual/search direction is
//! re-projected onto that subspace.

use super::diff::{derivative_at, FdOrder};
use super::{Axis, Boundary, Grid3, ScalarField, VectorField};
use crate::error::{Error, Result};
use crate::exec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Gauge {
    /// Fix the free constant by `mean(p) = 0`.
    #[default]
    ZeroMean,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonConfig {
    /// Relative residual `‖r‖₂ / ‖b‖₂` at which CG stops.
    pub tolerance: f64,
    /// Iteration cap as a multiple of the node count.
    pub max_iter_factor: usize,
    /// Stencil order for the right-hand side.
    pub order: FdOrder,
}

impl Default for PoissonConfig {
    fn default() -> Self {
        Self { tolerance: 1e-10, max_iter_factor: 10, order: FdOrder::Second }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonSolution {
    pub pressure: ScalarField,
    pub rhs: ScalarField,
    pub iterations: usize,
    pub relative_residual: f64,
}

fn require_periodic(grid: &Grid3) -> Result<()> {
    if grid.boundary().iter().any(|&b| b != Boundary::Periodic) {
        return Err(Error::Config("pressure Poisson solve requires a grid periodic in every axis".into()));
    }
    Ok(())
}

/// Discrete `-∂i∂j(ui uj)`.
pub fn pressure_rhs(u: &VectorField, order: FdOrder) -> Result<ScalarField> {
    u.check_finite()?;
    let grid = *u.grid();
    let n = grid.len();
    // flux_j = Σ_i ∂i (ui uj), then rhs = -Σ_j ∂j flux_j
    let products: Vec<Vec<f64>> = (0..6)
        .map(|slot| {
            let (i, j) = crate::linalg::SYM_PAIRS[slot];
            let (a, b) = (u.components()[i].values(), u.components()[j].values());
            a.iter().zip(b).map(|(x, y)| x * y).collect()
        })
        .collect();
    let prod = |i: usize, j: usize| &products[crate::linalg::sym_slot(i, j)];
    let flux: Vec<Vec<f64>> = (0..3)
        .map(|j| {
            exec::collect_indexed(n, |idx| {
                (0..3)
                    .map(|i| derivative_at(&grid, prod(i, j), Axis::ALL[i], idx, order))
                    .sum::<f64>()
            })
        })
        .collect();
    let rhs = exec::collect_indexed(n, |idx| {
        -(0..3)
            .map(|j| derivative_at(&grid, &flux[j], Axis::ALL[j], idx, order))
            .sum::<f64>()
    });
    Ok(ScalarField::from_vec_unchecked(grid, rhs))
}

/// 7-point Laplacian with periodic wraparound.
pub fn laplacian_periodic(p: &ScalarField) -> Result<ScalarField> {
    let grid = *p.grid();
    require_periodic(&grid)?;
    Ok(ScalarField::from_vec_unchecked(grid, apply_laplacian(&grid, p.values())))
}

fn apply_laplacian(grid: &Grid3, v: &[f64]) -> Vec<f64> {
    let dims = grid.dims();
    let h = grid.spacing();
    let inv_h2 = [1.0 / (h[0] * h[0]), 1.0 / (h[1] * h[1]), 1.0 / (h[2] * h[2])];
    exec::collect_indexed(grid.len(), |idx| {
        let c = grid.coords(idx);
        let mut acc = 0.0;
        for a in 0..3 {
            let stride = grid.stride(Axis::ALL[a]);
            let base = idx - c[a] * stride;
            let up = base + ((c[a] + 1) % dims[a]) * stride;
            let down = base + ((c[a] + dims[a] - 1) % dims[a]) * stride;
            acc += (v[up] - 2.0 * v[idx] + v[down]) * inv_h2[a];
        }
        acc
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn remove_mean(v: &mut [f64]) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= m);
}

/// Solves `Δ_h p = rhs` for zero-mean `p` on a periodic grid.
pub fn solve_periodic_poisson(rhs: &ScalarField, config: &PoissonConfig) -> Result<PoissonSolution> {
    let grid = *rhs.grid();
    require_periodic(&grid)?;
    rhs.check_finite()?;
    let n = grid.len();
    let scale = rhs.max_abs();
    let mean = rhs.mean();
    if mean.abs() > config.tolerance * scale.max(f64::MIN_POSITIVE) && scale > 0.0 {
        return Err(Error::IncompatibleRhs { mean });
    }

    // CG on A = -Δ_h, A x = -rhs
    let mut b: Vec<f64> = rhs.values().iter().map(|v| -v).collect();
    remove_mean(&mut b);
    let b_norm = dot(&b, &b).sqrt();
    if b_norm == 0.0 {
        return Ok(PoissonSolution {
            pressure: ScalarField::zeros(grid),
            rhs: rhs.clone(),
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let mut d = r.clone();
    let mut rr = dot(&r, &r);
    let max_iter = config.max_iter_factor.saturating_mul(n).max(1);
    let mut iterations = 0;
    let mut rel = rr.sqrt() / b_norm;
    while rel > config.tolerance {
        if iterations >= max_iter {
            return Err(Error::NotConverged { iterations, residual: rel });
        }
        let mut ad: Vec<f64> = apply_laplacian(&grid, &d).into_iter().map(|v| -v).collect();
        remove_mean(&mut ad);
        let dad = dot(&d, &ad);
        if !(dad > 0.0) {
            return Err(Error::NotConverged { iterations, residual: rel });
        }
        let alpha = rr / dad;
        x.iter_mut().zip(&d).for_each(|(xi, di)| *xi += alpha * di);
        r.iter_mut().zip(&ad).for_each(|(ri, ai)| *ri -= alpha * ai);
        remove_mean(&mut r);
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        d.iter_mut().zip(&r).for_each(|(di, ri)| *di = ri + beta * *di);
        rr = rr_new;
        iterations += 1;
        rel = rr.sqrt() / b_norm;
    }
    remove_mean(&mut x);
    Ok(PoissonSolution {
        pressure: ScalarField::from_vec_unchecked(grid, x),
        rhs: rhs.clone(),
        iterations,
        relative_residual: rel,
    })
}

/// Pressure from velocity under the default solver settings.
pub fn solve_pressure_poisson(u: &VectorField, gauge: Gauge) -> Result<ScalarField> {
    solve_pressure_poisson_with(u, gauge, &PoissonConfig::default()).map(|s| s.pressure)
}

pub fn solve_pressure_poisson_with(u: &VectorField, gauge: Gauge, config: &PoissonConfig) -> Result<PoissonSolution> {
    require_periodic(u.grid())?;
    let Gauge::ZeroMean = gauge;
    let rhs = pressure_rhs(u, config.order)?;
    solve_periodic_poisson(&rhs, config)
}
