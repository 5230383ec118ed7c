//! Explicit embeddings of plane shear flows into six-dimensional Euclidean
//! space, their induced and target metrics, fundamental forms, and the
//! shortness and energy functionals.
//!
//! The height profile `f` solves `−f″ = u1² √(B² + f′²)`, `f(0) = f′(0) = 0`,
//! whose closed form is `f′ = −B sinh(∫₀ˢ u1²)`.

use crate::error::{Error, Result};
use crate::exec;
use crate::fields::{derivative_at, partial_derivative, line_derivative, Axis, Boundary, FdOrder, Grid3, Profile1D, ScalarField, SymTensor2Field};
use crate::geometry::{riemann_curvature, Metric3};
use crate::linalg::SymMat3;

/// Tolerance for shortness and frame orthonormality.
pub const EMBEDDING_TOL: f64 = 1e-10;

/// Coordinate the shear profile depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileAxis {
    /// `u1 = u1(x2)`.
    X2,
    /// `u1 = u1(x3)`, the channel between plates.
    X3,
}

impl ProfileAxis {
    pub fn axis(self) -> Axis {
        match self {
            ProfileAxis::X2 => Axis::X2,
            ProfileAxis::X3 => Axis::X3,
        }
    }
}

/// Shear embedding data: the profile it realises and the integrated height
/// function with its first two derivatives on the same nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ShearEmbedding {
    b: f64,
    axis: ProfileAxis,
    u1: Profile1D,
    f: Profile1D,
    fp: Profile1D,
    fpp: Profile1D,
    step_error: f64,
}

type State = [f64; 2];

fn rhs(b: f64, u1sq: f64, y: State) -> State {
    [y[1], -u1sq * (b * b + y[1] * y[1]).sqrt()]
}

fn rk4_step(b: f64, y: State, h: f64, u1sq: [f64; 3]) -> State {
    let add = |y: State, k: State, s: f64| [y[0] + s * k[0], y[1] + s * k[1]];
    let k1 = rhs(b, u1sq[0], y);
    let k2 = rhs(b, u1sq[1], add(y, k1, 0.5 * h));
    let k3 = rhs(b, u1sq[1], add(y, k2, 0.5 * h));
    let k4 = rhs(b, u1sq[2], add(y, k3, h));
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Integrates from the node at 0 outwards in both directions with
/// `substeps` RK4 steps per node interval. Returns `(f, f′)` at the nodes.
fn integrate(b: f64, u1: &Profile1D, origin: usize, substeps: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = u1.len();
    let h = u1.spacing();
    let sq = |x: f64| u1.sample(x).map(|v| v * v);
    let mut f = vec![0.0; n];
    let mut fp = vec![0.0; n];
    for dir in [1isize, -1] {
        let mut y: State = [0.0, 0.0];
        let mut k = origin as isize;
        while (0..n as isize).contains(&(k + dir)) {
            let x0 = u1.position(k as usize);
            let step = dir as f64 * h / substeps as f64;
            for s in 0..substeps {
                let a = if s == 0 { x0 } else { x0 + s as f64 * step };
                let c = if s + 1 == substeps { u1.position((k + dir) as usize) } else { x0 + (s + 1) as f64 * step };
                let m = 0.5 * (a + c);
                let y_next = rk4_step(b, y, step, [sq(a)?, sq(m)?, sq(c)?]);
                if !(y_next[0].is_finite() && y_next[1].is_finite()) {
                    return Err(Error::Integrator { x: a, value: y[1] });
                }
                y = y_next;
            }
            k += dir;
            f[k as usize] = y[0];
            fp[k as usize] = y[1];
        }
    }
    Ok((f, fp))
}

/// Builds the embedding realising the shear profile `u1`. The profile must
/// be uniformly sampled with a node at 0.
pub fn build_shear_embedding(u1: &Profile1D, b: f64, axis: ProfileAxis) -> Result<ShearEmbedding> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::Config(format!("B must be positive, got {b}")));
    }
    let origin = u1
        .node_at(0.0)
        .ok_or_else(|| Error::Domain("velocity profile must have a node at 0".into()))?;
    let (f, fp) = integrate(b, u1, origin, 1)?;
    let (f_half, fp_half) = integrate(b, u1, origin, 2)?;
    let step_error = f
        .iter()
        .zip(&f_half)
        .chain(fp.iter().zip(&fp_half))
        .fold(0.0_f64, |a, (x, y)| a.max((x - y).abs()));
    let fpp: Vec<f64> = u1.values().iter().zip(&fp).map(|(u, d)| -u * u * (b * b + d * d).sqrt()).collect();
    let mk = |v: Vec<f64>| Profile1D::new(u1.start(), u1.spacing(), v);
    Ok(ShearEmbedding { b, axis, u1: u1.clone(), f: mk(f)?, fp: mk(fp)?, fpp: mk(fpp)?, step_error })
}

impl ShearEmbedding {
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn axis(&self) -> ProfileAxis {
        self.axis
    }
    pub fn velocity(&self) -> &Profile1D {
        &self.u1
    }
    pub fn height(&self) -> &Profile1D {
        &self.f
    }
    pub fn slope(&self) -> &Profile1D {
        &self.fp
    }
    /// `f″` from the defining relation at the nodes.
    pub fn curvature_profile(&self) -> &Profile1D {
        &self.fpp
    }
    /// Largest change in `f` or `f′` when the RK4 step is halved.
    pub fn step_error(&self) -> f64 {
        self.step_error
    }

    /// The six embedding coordinates at `x`.
    pub fn map(&self, x: [f64; 3]) -> Result<[f64; 6]> {
        let b = self.b;
        Ok(match self.axis {
            ProfileAxis::X2 => [b * x[1], b * x[0], self.f.sample(x[1])?, b * x[2], 0.0, 0.0],
            ProfileAxis::X3 => [b * x[2], self.f.sample(x[2])?, b * x[1], b * x[0], 0.0, 0.0],
        })
    }

    pub fn target(&self) -> TargetMetric {
        TargetMetric { b: self.b, axis: self.axis, fp: self.fp.clone() }
    }

    /// Unit normal spanning the profile direction's bend, as a 6-vector.
    pub fn bending_normal(&self, fp: f64) -> [f64; 6] {
        let n = (self.b * self.b + fp * fp).sqrt();
        match self.axis {
            ProfileAxis::X2 => [fp / n, 0.0, -self.b / n, 0.0, 0.0, 0.0],
            ProfileAxis::X3 => [fp / n, -self.b / n, 0.0, 0.0, 0.0, 0.0],
        }
    }

    /// Tangent vectors `∂_i y` at a point with slope `fp`.
    pub fn tangents(&self, fp: f64) -> [[f64; 6]; 3] {
        let b = self.b;
        match self.axis {
            ProfileAxis::X2 => [
                [0.0, b, 0.0, 0.0, 0.0, 0.0],
                [b, 0.0, fp, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, b, 0.0, 0.0],
            ],
            ProfileAxis::X3 => [
                [0.0, 0.0, 0.0, b, 0.0, 0.0],
                [0.0, 0.0, b, 0.0, 0.0, 0.0],
                [b, fp, 0.0, 0.0, 0.0, 0.0],
            ],
        }
    }
}

/// The metric `g*` pulled back by a shear embedding:
/// `B²` on the diagonal plus `f′²` on the profile axis.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetMetric {
    pub b: f64,
    pub axis: ProfileAxis,
    pub fp: Profile1D,
}

impl TargetMetric {
    pub fn new(b: f64, axis: ProfileAxis, fp: Profile1D) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::Config(format!("B must be positive, got {b}")));
        }
        Ok(Self { b, axis, fp })
    }

    pub fn value_with_slope(&self, fp: f64) -> SymMat3 {
        let b2 = self.b * self.b;
        match self.axis {
            ProfileAxis::X2 => SymMat3::diag(b2, b2 + fp * fp, b2),
            ProfileAxis::X3 => SymMat3::diag(b2, b2, b2 + fp * fp),
        }
    }

    pub fn eval(&self, x: [f64; 3]) -> Result<SymMat3> {
        let s = x[self.axis.axis().index()];
        Ok(self.value_with_slope(self.fp.sample(s)?))
    }

    fn check_covers(&self, grid: &Grid3) -> Result<()> {
        let a = self.axis.axis().index();
        let lo = grid.origin()[a];
        let hi = lo + (grid.dims()[a] - 1) as f64 * grid.spacing()[a];
        if !(self.fp.contains(lo) && self.fp.contains(hi)) {
            return Err(Error::Domain(format!(
                "profile range [{}, {}] does not cover the grid extent [{lo}, {hi}] on the profile axis",
                self.fp.start(),
                self.fp.end()
            )));
        }
        Ok(())
    }

    /// `g*` sampled at the grid nodes.
    pub fn to_field(&self, grid: Grid3) -> Result<SymTensor2Field> {
        self.check_covers(&grid)?;
        let nodes = exec::try_collect_indexed(grid.len(), |idx| self.eval(grid.point(idx)))?;
        Ok(SymTensor2Field::from_nodes(grid, &nodes))
    }

    pub fn to_metric(&self, grid: Grid3) -> Result<Metric3> {
        Metric3::from_field(self.to_field(grid)?)
    }
}

/// Metric induced on a grid by finite differences of the embedding.
#[derive(Debug, Clone)]
pub struct InducedMetric {
    pub metric: Metric3,
    /// `max |∂_i y · ∂_j y − g*_ij|` over nodes and index pairs.
    pub residual: f64,
}

pub fn induced_metric(e: &ShearEmbedding, grid: Grid3) -> Result<InducedMetric> {
    let target = e.target();
    let gstar = target.to_field(grid)?;
    let y = exec::try_collect_indexed(grid.len(), |idx| e.map(grid.point(idx)))?;
    let comps: Vec<Vec<f64>> = (0..6).map(|c| y.iter().map(|v| v[c]).collect()).collect();
    let nodes = exec::collect_indexed(grid.len(), |idx| {
        let d: [[f64; 6]; 3] = std::array::from_fn(|a| {
            std::array::from_fn(|c| derivative_at(&grid, &comps[c], Axis::ALL[a], idx, FdOrder::Second))
        });
        SymMat3(std::array::from_fn(|s| {
            let (i, j) = crate::linalg::SYM_PAIRS[s];
            (0..6).map(|c| d[i][c] * d[j][c]).sum()
        }))
    });
    let induced = SymTensor2Field::from_nodes(grid, &nodes);
    let residual = induced.max_abs_diff(&gstar);
    Ok(InducedMetric { metric: Metric3::from_field(induced)?, residual })
}

/// Second fundamental forms, normal connection and the Gauss and Codazzi
/// residuals of a shear embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalForms {
    /// Normal frame `(N4, N5, N6)` at each profile node.
    pub normals: Vec<[[f64; 6]; 3]>,
    /// The one nonzero second fundamental form component, on the profile
    /// axis, `−f″ / √(B² + f′²)` with `f″` differentiated from `f′`.
    pub bending: Profile1D,
    /// `max |κ^ν_{μi}|` from second-order differences of the normals; zero
    /// up to O(h²) since the bending normal stays a unit vector.
    pub normal_connection_max: f64,
    /// `max |N_μ·N_ν − δ_μν|` and `max |N_μ·∂_i y|`.
    pub frame_residual: f64,
    /// Largest Gauss left side `Σ_μ (H_ik H_jl − H_il H_jk)`.
    pub gauss_lhs_max: f64,
    /// `max |Gauss left side − R_ijkl(g*)|`.
    pub gauss_residual: f64,
    /// `max |∂_1 H|` on the grid.
    pub codazzi_residual: f64,
    /// `max |H − u1²|` over profile nodes.
    pub round_trip_residual: f64,
}

/// Evaluates the forms on the profile nodes and the curvature of `g*` on
/// `grid`, which must lie within the profile range on the profile axis.
pub fn fundamental_forms(e: &ShearEmbedding, grid: Grid3) -> Result<FundamentalForms> {
    let b = e.b;
    let fpp = e.fp.derivative(FdOrder::Fourth)?;
    let bending = Profile1D::new(
        e.fp.start(),
        e.fp.spacing(),
        e.fp.values().iter().zip(fpp.values()).map(|(d, dd)| -dd / (b * b + d * d).sqrt()).collect(),
    )?;
    let round_trip_residual = bending
        .values()
        .iter()
        .zip(e.u1.values())
        .fold(0.0_f64, |a, (h, u)| a.max((h - u * u).abs()));

    let normals: Vec<[[f64; 6]; 3]> = e
        .fp
        .values()
        .iter()
        .map(|&d| {
            let mut n5 = [0.0; 6];
            let mut n6 = [0.0; 6];
            n5[4] = 1.0;
            n6[5] = 1.0;
            [e.bending_normal(d), n5, n6]
        })
        .collect();
    let dot = |a: &[f64; 6], c: &[f64; 6]| (0..6).map(|k| a[k] * c[k]).sum::<f64>();
    let mut frame_residual = 0.0_f64;
    for (frame, &d) in normals.iter().zip(e.fp.values()) {
        let tangents = e.tangents(d);
        for m in 0..3 {
            for n in 0..3 {
                let want = if m == n { 1.0 } else { 0.0 };
                frame_residual = frame_residual.max((dot(&frame[m], &frame[n]) - want).abs());
            }
            for t in &tangents {
                frame_residual = frame_residual.max(dot(&frame[m], t).abs());
            }
        }
    }
    // κ^ν_{μi} = ∂_i N_μ · N_ν; only the profile derivative can be nonzero
    let np = normals.len();
    let mut normal_connection_max = 0.0_f64;
    for k in 0..np {
        for m in 0..3 {
            let dn: [f64; 6] = std::array::from_fn(|c| {
                line_derivative(|i| normals[i][m][c], k, np, e.fp.spacing(), false, FdOrder::Second)
            });
            for n in 0..3 {
                normal_connection_max = normal_connection_max.max(dot(&dn, &normals[k][n]).abs());
            }
        }
    }

    // the single nonzero H sits on the diagonal of the profile axis, so every
    // product H_ik H_jl − H_il H_jk cancels
    let p = e.axis.axis().index();
    let mut gauss_lhs_max = 0.0_f64;
    for &h in bending.values() {
        let hh = |i: usize, j: usize| if i == p && j == p { h } else { 0.0 };
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let v = hh(i, k) * hh(j, l) - hh(i, l) * hh(j, k);
                        gauss_lhs_max = gauss_lhs_max.max(v.abs());
                    }
                }
            }
        }
    }
    let curvature = riemann_curvature(&e.target().to_metric(grid)?)?;
    let gauss_residual = gauss_lhs_max + curvature.max_abs();

    let h_field = ScalarField::new(
        grid,
        exec::try_collect_indexed(grid.len(), |idx| bending.sample(grid.point(idx)[p]))?,
    )?;
    let codazzi_residual = partial_derivative(&h_field, Axis::X1)?.max_abs();

    Ok(FundamentalForms {
        normals,
        bending,
        normal_connection_max,
        frame_residual,
        gauss_lhs_max,
        gauss_residual,
        codazzi_residual,
        round_trip_residual,
    })
}

/// Pointwise comparison `g ≤ g*` as quadratic forms.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortnessReport {
    /// Smallest eigenvalue of `g* − g` per node.
    pub margin: Vec<f64>,
    pub short: Vec<bool>,
    pub min_margin: f64,
    pub all_short: bool,
}

pub fn is_short(g: &Metric3, gstar: &TargetMetric) -> Result<ShortnessReport> {
    let grid = *g.grid();
    let target = gstar.to_field(grid)?;
    let margin = exec::collect_indexed(grid.len(), |idx| target.at(idx).sub(&g.components().at(idx)).eigenvalues()[2]);
    let short: Vec<bool> = margin.iter().map(|&m| m >= -EMBEDDING_TOL).collect();
    Ok(ShortnessReport {
        min_margin: margin.iter().copied().fold(f64::INFINITY, f64::min),
        all_short: short.iter().all(|&s| s),
        margin,
        short,
    })
}

/// `∫ tr(g*) dx` over the grid box by the trapezoid rule on clamped axes
/// and the rectangle rule on periodic axes.
pub fn energy(gstar: &TargetMetric, grid: Grid3) -> Result<f64> {
    let field = gstar.to_field(grid)?;
    let dims = grid.dims();
    let h = grid.spacing();
    let weight = |a: usize, i: usize| {
        let end = grid.boundary()[a] == Boundary::Clamped && (i == 0 || i + 1 == dims[a]);
        if end {
            0.5 * h[a]
        } else {
            h[a]
        }
    };
    let total = (0..grid.len())
        .map(|idx| {
            let c = grid.coords(idx);
            weight(0, c[0]) * weight(1, c[1]) * weight(2, c[2]) * field.at(idx).trace()
        })
        .sum();
    Ok(total)
}
