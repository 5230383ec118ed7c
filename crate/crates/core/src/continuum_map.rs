//! Constitutive models and the map from continuum fields to a prescribed
//! curvature operator, with degeneracy and definiteness diagnostics.

use crate::error::{Error, Result};
use crate::exec;
use crate::fields::{partial_derivative_with, Axis, FdOrder, ScalarField, SymTensor2Field, Tensor2Field, VectorField};
use crate::geometry::{canonical_component, Curvature3, CurvaturePoint};
use crate::linalg::{det3, gram_rows, SymMat3};

/// Scale-normalised tolerance for degeneracy and definiteness decisions.
pub const DEFINITENESS_TOL: f64 = 1e-10;

/// Smallest admissible `|det F|`.
pub const DEFORMATION_DET_FLOOR: f64 = 1e-12;

/// Largest admissible `|ρ − 1|` for incompressible models.
pub const UNIT_DENSITY_TOL: f64 = 1e-12;

/// Barotropic pressure law given by a table, interpolated linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureLaw {
    density: Vec<f64>,
    pressure: Vec<f64>,
}

impl PressureLaw {
    /// Requires at least two rows, strictly increasing density, strictly
    /// positive and nondecreasing pressure.
    pub fn new(density: Vec<f64>, pressure: Vec<f64>) -> Result<Self> {
        if density.len() != pressure.len() || density.len() < 2 {
            return Err(Error::Config("pressure law needs at least two (density, pressure) rows".into()));
        }
        if density.iter().chain(&pressure).any(|v| !v.is_finite()) {
            return Err(Error::Config("pressure law has non-finite entries".into()));
        }
        if density.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("pressure law densities must be strictly increasing".into()));
        }
        if pressure.iter().any(|&p| p <= 0.0) || pressure.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config("pressure law must be positive and monotone in density".into()));
        }
        Ok(Self { density, pressure })
    }

    pub fn eval(&self, rho: f64) -> Result<f64> {
        let (lo, hi) = (self.density[0], *self.density.last().unwrap());
        if !(rho >= lo && rho <= hi) {
            return Err(Error::Domain(format!("density {rho} outside pressure-law table [{lo}, {hi}]")));
        }
        let k = self.density.partition_point(|&d| d <= rho).clamp(1, self.density.len() - 1);
        let (d0, d1) = (self.density[k - 1], self.density[k]);
        let t = (rho - d0) / (d1 - d0);
        Ok(self.pressure[k - 1] * (1.0 - t) + self.pressure[k] * t)
    }

    pub fn rows(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.density.iter().copied().zip(self.pressure.iter().copied())
    }
}

/// Constitutive law closing the momentum balance.
// built once per evaluation, so the size spread between variants is harmless
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq)]
pub enum StressModel {
    /// `T = −p(ρ) δ`.
    EulerCompressible { law: PressureLaw },
    /// `T = −p δ`, unit density.
    EulerIncompressible { pressure: ScalarField },
    /// `T = −p δ + 2γ D`, unit density, `γ > 0`.
    NavierStokes { pressure: ScalarField, gamma: f64 },
    /// `T = ρ F Fᵀ`.
    NeoHookean { deformation: Tensor2Field },
}

/// Model selector without attached data, for assembling a model from
/// optionally supplied inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    EulerCompressible,
    EulerIncompressible,
    NavierStokes,
    NeoHookean,
}

impl StressModel {
    /// Assembles a model, reporting any required input that is missing.
    pub fn from_parts(
        kind: ModelKind,
        law: Option<PressureLaw>,
        pressure: Option<ScalarField>,
        gamma: Option<f64>,
        deformation: Option<Tensor2Field>,
    ) -> Result<Self> {
        let missing = |what: &str| Error::Config(format!("{kind:?} model requires {what}"));
        let model = match kind {
            ModelKind::EulerCompressible => StressModel::EulerCompressible { law: law.ok_or_else(|| missing("a pressure law"))? },
            ModelKind::EulerIncompressible => {
                StressModel::EulerIncompressible { pressure: pressure.ok_or_else(|| missing("a pressure field"))? }
            }
            ModelKind::NavierStokes => StressModel::NavierStokes {
                pressure: pressure.ok_or_else(|| missing("a pressure field"))?,
                gamma: gamma.ok_or_else(|| missing("a viscosity"))?,
            },
            ModelKind::NeoHookean => {
                StressModel::NeoHookean { deformation: deformation.ok_or_else(|| missing("a deformation gradient"))? }
            }
        };
        model.validate()?;
        Ok(model)
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            StressModel::EulerCompressible { .. } => ModelKind::EulerCompressible,
            StressModel::EulerIncompressible { .. } => ModelKind::EulerIncompressible,
            StressModel::NavierStokes { .. } => ModelKind::NavierStokes,
            StressModel::NeoHookean { .. } => ModelKind::NeoHookean,
        }
    }

    pub fn is_incompressible(&self) -> bool {
        matches!(self, StressModel::EulerIncompressible { .. } | StressModel::NavierStokes { .. })
    }

    fn validate(&self) -> Result<()> {
        if let StressModel::NavierStokes { gamma, .. } = self {
            if !(gamma.is_finite() && *gamma > 0.0) {
                return Err(Error::Config(format!("viscosity must be positive, got {gamma}")));
            }
        }
        Ok(())
    }
}

/// `T = −p δ` from a pressure field.
pub fn euler_stress(pressure: &ScalarField) -> SymTensor2Field {
    let grid = *pressure.grid();
    let nodes: Vec<SymMat3> = pressure.values().iter().map(|&p| SymMat3::diag(-p, -p, -p)).collect();
    SymTensor2Field::from_nodes(grid, &nodes)
}

/// Rate of strain `D_ij = ½(∂_i u_j + ∂_j u_i)`.
pub fn rate_of_strain(u: &VectorField, order: FdOrder) -> Result<SymTensor2Field> {
    let grid = *u.grid();
    // grad[i][j] = ∂_i u_j
    let mut grad: Vec<Vec<ScalarField>> = Vec::with_capacity(3);
    for axis in Axis::ALL {
        let row = u.components().iter().map(|c| partial_derivative_with(c, axis, order)).collect::<Result<Vec<_>>>()?;
        grad.push(row);
    }
    let nodes = exec::collect_indexed(grid.len(), |idx| {
        SymMat3(std::array::from_fn(|s| {
            let (i, j) = crate::linalg::SYM_PAIRS[s];
            0.5 * (grad[i][j].at(idx) + grad[j][i].at(idx))
        }))
    });
    Ok(SymTensor2Field::from_nodes(grid, &nodes))
}

fn same_grid(a: &crate::fields::Grid3, b: &crate::fields::Grid3) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// Cauchy stress of the selected constitutive law.
pub fn cauchy_stress(model: &StressModel, rho: &ScalarField, u: &VectorField) -> Result<SymTensor2Field> {
    model.validate()?;
    same_grid(rho.grid(), u.grid())?;
    rho.check_finite()?;
    u.check_finite()?;
    let grid = *rho.grid();
    match model {
        StressModel::EulerCompressible { law } => {
            let p = exec::try_collect_indexed(grid.len(), |idx| law.eval(rho.at(idx)))?;
            Ok(euler_stress(&ScalarField::new(grid, p)?))
        }
        StressModel::EulerIncompressible { pressure } => {
            same_grid(pressure.grid(), &grid)?;
            pressure.check_finite()?;
            Ok(euler_stress(pressure))
        }
        StressModel::NavierStokes { pressure, gamma } => {
            same_grid(pressure.grid(), &grid)?;
            pressure.check_finite()?;
            let d = rate_of_strain(u, FdOrder::Second)?;
            let nodes = exec::collect_indexed(grid.len(), |idx| {
                let p = pressure.at(idx);
                let dm = d.at(idx);
                SymMat3(std::array::from_fn(|s| {
                    let diag = if s < 3 { -p } else { 0.0 };
                    diag + 2.0 * gamma * dm.0[s]
                }))
            });
            Ok(SymTensor2Field::from_nodes(grid, &nodes))
        }
        StressModel::NeoHookean { deformation } => {
            same_grid(deformation.grid(), &grid)?;
            deformation.check_finite()?;
            let nodes = exec::collect_indexed(grid.len(), |idx| {
                let ff = gram_rows(&deformation.at(idx));
                let r = rho.at(idx);
                SymMat3(ff.0.map(|v| r * v))
            });
            Ok(SymTensor2Field::from_nodes(grid, &nodes))
        }
    }
}

/// Current density `ρ = ρ₀ / det F`.
pub fn density_from_deformation(rho0: &ScalarField, f: &Tensor2Field) -> Result<ScalarField> {
    same_grid(rho0.grid(), f.grid())?;
    rho0.check_finite()?;
    f.check_finite()?;
    let grid = *rho0.grid();
    let values = exec::try_collect_indexed(grid.len(), |idx| {
        let det = det3(&f.at(idx));
        if det.abs() > DEFORMATION_DET_FLOOR {
            Ok(rho0.at(idx) / det)
        } else {
            Err(Error::SingularDeformation { index: grid.coords(idx), det })
        }
    })?;
    ScalarField::new(grid, values)
}

/// Density, velocity and stress on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumState {
    pub rho: ScalarField,
    pub u: VectorField,
    pub stress: SymTensor2Field,
    pub rho0: Option<ScalarField>,
}

/// Discrete `div u` summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceReport {
    pub max_abs: f64,
    pub tolerance: f64,
    pub flagged: bool,
}

impl ContinuumState {
    pub fn new(rho: ScalarField, u: VectorField, stress: SymTensor2Field) -> Result<Self> {
        same_grid(rho.grid(), u.grid())?;
        same_grid(rho.grid(), stress.grid())?;
        rho.check_finite()?;
        u.check_finite()?;
        stress.check_finite()?;
        Ok(Self { rho, u, stress, rho0: None })
    }

    /// State whose stress follows `model`. Incompressible models require
    /// unit density.
    pub fn from_model(model: &StressModel, rho: ScalarField, u: VectorField) -> Result<Self> {
        if model.is_incompressible() {
            let dev = rho.values().iter().fold(0.0_f64, |a, r| a.max((r - 1.0).abs()));
            if !(dev <= UNIT_DENSITY_TOL) {
                return Err(Error::Config(format!(
                    "incompressible model requires unit density, max |ρ − 1| = {dev:e}"
                )));
            }
        }
        let stress = cauchy_stress(model, &rho, &u)?;
        let mut state = Self::new(rho, u, stress)?;
        if let StressModel::NeoHookean { deformation } = model {
            let det = exec::collect_indexed(state.rho.grid().len(), |idx| det3(&deformation.at(idx)));
            state.rho0 = Some(ScalarField::new(*state.rho.grid(), det)?.zip_with(&state.rho, |d, r| d * r)?);
        }
        Ok(state)
    }

    pub fn with_reference_density(mut self, rho0: ScalarField) -> Result<Self> {
        same_grid(rho0.grid(), self.rho.grid())?;
        self.rho0 = Some(rho0);
        Ok(self)
    }

    pub fn grid(&self) -> &crate::fields::Grid3 {
        self.rho.grid()
    }

    /// Reports, but does not enforce, incompressibility.
    pub fn divergence_report(&self, tolerance: f64) -> Result<DivergenceReport> {
        let max_abs = self.u.divergence(FdOrder::Second)?.max_abs();
        Ok(DivergenceReport { max_abs, tolerance, flagged: max_abs > tolerance })
    }
}

/// The six named relations `R_ijkl = ρ u_a u_b − T_ab`, as
/// `(i, j, k, l, a, b)` with 1-based indices.
pub const NAMED_RELATIONS: [([usize; 4], (usize, usize)); 6] = [
    ([2, 3, 2, 3], (1, 1)),
    ([1, 3, 1, 3], (2, 2)),
    ([1, 2, 1, 2], (3, 3)),
    ([3, 1, 2, 3], (1, 2)),
    ([1, 2, 2, 3], (1, 3)),
    ([3, 1, 1, 2], (2, 3)),
];

/// Curvature prescribed by density, velocity and stress at one point.
pub fn rhat_point(rho: f64, u: [f64; 3], t: &SymMat3) -> CurvaturePoint {
    let mut out = [0.0; 6];
    for ([i, j, k, l], (a, b)) in NAMED_RELATIONS {
        let flux = rho * u[a - 1] * u[b - 1] - t.get(a - 1, b - 1);
        let (slot, sign) = canonical_component(i, j, k, l).expect("named relations never vanish");
        out[slot.index()] = sign * flux;
    }
    CurvaturePoint(out)
}

/// The curvature matrix written directly in terms of the fluid fields.
pub fn rhat_matrix_entries(rho: f64, u: [f64; 3], t: &SymMat3) -> SymMat3 {
    let [u1, u2, u3] = u;
    let m11 = rho * u3 * u3 - t.get(2, 2);
    let m22 = rho * u1 * u1 - t.get(0, 0);
    let m33 = rho * u2 * u2 - t.get(1, 1);
    let m12 = rho * u1 * u3 - t.get(0, 2);
    let m13 = -rho * u2 * u3 + t.get(1, 2);
    let m23 = -rho * u1 * u2 + t.get(0, 1);
    SymMat3([m11, m22, m33, m12, m13, m23])
}

/// Matrix and tensor views of the prescribed curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct RhatField {
    pub matrix: SymTensor2Field,
    pub curvature: Curvature3,
}

pub fn build_rhat(state: &ContinuumState) -> Result<RhatField> {
    same_grid(state.rho.grid(), state.u.grid())?;
    same_grid(state.rho.grid(), state.stress.grid())?;
    let grid = *state.grid();
    let points = exec::collect_indexed(grid.len(), |idx| {
        rhat_point(state.rho.at(idx), state.u.at(idx), &state.stress.at(idx))
    });
    let curvature = Curvature3::from_points(grid, &points);
    let matrix = curvature.to_matrix_field();
    Ok(RhatField { matrix, curvature })
}

/// Definiteness diagnostics of one curvature matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeDefiniteness {
    pub det: f64,
    pub minor1: f64,
    pub minor2: f64,
    pub nondegenerate: bool,
    pub positive_definite: bool,
    /// Descending.
    pub eigenvalues: [f64; 3],
}

pub fn node_definiteness(m: &SymMat3) -> NodeDefiniteness {
    let [minor1, minor2, det] = m.leading_minors();
    let scale = m.max_abs();
    let nondegenerate = scale > 0.0 && det.abs() > DEFINITENESS_TOL * scale.powi(3);
    let positive_definite = scale > 0.0
        && minor1 > DEFINITENESS_TOL * scale
        && minor2 > DEFINITENESS_TOL * scale * scale
        && det > DEFINITENESS_TOL * scale.powi(3);
    NodeDefiniteness { det, minor1, minor2, nondegenerate, positive_definite, eigenvalues: m.eigenvalues() }
}

/// Per-node report plus grid-wide aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct DefinitenessReport {
    pub nodes: Vec<NodeDefiniteness>,
    pub all_positive_definite: bool,
    pub degenerate_nodes: usize,
    pub min_eigenvalue: f64,
    pub max_abs_det: f64,
}

pub fn definiteness_report(m: &SymTensor2Field) -> Result<DefinitenessReport> {
    m.check_finite()?;
    let grid = *m.grid();
    let nodes = exec::collect_indexed(grid.len(), |idx| node_definiteness(&m.at(idx)));
    Ok(DefinitenessReport {
        all_positive_definite: nodes.iter().all(|n| n.positive_definite),
        degenerate_nodes: nodes.iter().filter(|n| !n.nondegenerate).count(),
        min_eigenvalue: nodes.iter().map(|n| n.eigenvalues[2]).fold(f64::INFINITY, f64::min),
        max_abs_det: nodes.iter().fold(0.0_f64, |a, n| a.max(n.det.abs())),
        nodes,
    })
}

/// Curvature matrix of plane shear `u = (u1(x3), 0, 0)` with unit density
/// and Navier–Stokes stress at constant pressure `p0`.
pub fn couette_rhat_matrix(u1: f64, u1p: f64, p0: f64, gamma: f64) -> SymMat3 {
    let c = -gamma * u1p;
    SymMat3::from_rows(&[[p0, c, 0.0], [c, u1 * u1 + p0, 0.0], [0.0, 0.0, p0]])
}

/// Closed-form eigenvalues `(λ1, λ2, λ3)` of [`couette_rhat_matrix`], with
/// `λ1 ≥ λ2` the pair from the shear block and `λ3 = p0`.
///
/// `λ2` is computed as `det / λ1` so its sign is accurate near the
/// crossing where `p0² + p0 u1² = γ² u1′²`.
pub fn shear_eigenvalues(u1: f64, u1p: f64, p0: f64, gamma: f64) -> (f64, f64, f64) {
    let u2 = u1 * u1;
    let c = gamma * u1p;
    let root = (u2 * u2 + 4.0 * c * c).sqrt();
    let l1 = 0.5 * (u2 + 2.0 * p0 + root);
    let det = p0 * (p0 + u2) - c * c;
    let l2 = if l1 != 0.0 { det / l1 } else { 0.5 * (u2 + 2.0 * p0 - root) };
    (l1, l2, p0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> Grid3 {
        Grid3::clamped([5; 3], [0.0; 3], [1.0; 3]).unwrap()
    }

    #[test]
    fn incompressible_euler_constant_pressure() {
        let g = grid();
        let model = StressModel::EulerIncompressible { pressure: ScalarField::constant(g, 2.0) };
        let t = cauchy_stress(&model, &ScalarField::constant(g, 1.0), &VectorField::zeros(g)).unwrap();
        assert_eq!(t.max_abs_diff(&SymTensor2Field::constant(g, SymMat3::diag(-2.0, -2.0, -2.0))), 0.0);
    }

    #[test]
    fn navier_stokes_linear_shear() {
        // u = (V x3, 0, 0): D13 = V/2, so T13 = γV and the diagonal is −p0
        let g = grid();
        let (v, gamma, p0) = (0.7, 0.3, 1.25);
        let model = StressModel::NavierStokes { pressure: ScalarField::constant(g, p0), gamma };
        let u = VectorField::from_fn(g, |x| [v * x[2], 0.0, 0.0]);
        let t = cauchy_stress(&model, &ScalarField::constant(g, 1.0), &u).unwrap();
        let want = SymTensor2Field::constant(g, SymMat3([-p0, -p0, -p0, 0.0, gamma * v, 0.0]));
        assert!(t.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn neo_hookean_identity() {
        let g = grid();
        let f = Tensor2Field::from_fn(g, |_| [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let model = StressModel::NeoHookean { deformation: f };
        let t = cauchy_stress(&model, &ScalarField::constant(g, 3.5), &VectorField::zeros(g)).unwrap();
        assert_eq!(t.max_abs_diff(&SymTensor2Field::constant(g, SymMat3::diag(3.5, 3.5, 3.5))), 0.0);
    }

    #[test]
    fn missing_inputs_are_config_errors() {
        assert!(matches!(
            StressModel::from_parts(ModelKind::NavierStokes, None, Some(ScalarField::zeros(grid())), None, None),
            Err(Error::Config(_))
        ));
        assert!(matches!(StressModel::from_parts(ModelKind::NeoHookean, None, None, None, None), Err(Error::Config(_))));
        assert!(matches!(
            StressModel::from_parts(ModelKind::NavierStokes, None, Some(ScalarField::zeros(grid())), Some(0.0), None),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn pressure_law_validation_and_interpolation() {
        assert!(PressureLaw::new(vec![1.0, 2.0], vec![2.0, 1.0]).is_err());
        assert!(PressureLaw::new(vec![1.0, 2.0], vec![0.0, 1.0]).is_err());
        let law = PressureLaw::new(vec![0.5, 1.0, 2.0], vec![1.0, 2.0, 4.0]).unwrap();
        assert_eq!(law.eval(1.5).unwrap(), 3.0);
        assert_eq!(law.eval(2.0).unwrap(), 4.0);
        assert!(law.eval(2.5).is_err());
    }

    #[test]
    fn density_from_deformation_cases() {
        let g = grid();
        let rho0 = ScalarField::constant(g, 2.0);
        let eye = |s: f64| Tensor2Field::from_fn(g, move |_| [[s, 0.0, 0.0], [0.0, s, 0.0], [0.0, 0.0, s]]);
        assert_eq!(density_from_deformation(&rho0, &eye(1.0)).unwrap().max_abs_diff(&rho0), 0.0);
        let quarter = ScalarField::constant(g, 0.25);
        assert_eq!(density_from_deformation(&rho0, &eye(2.0)).unwrap().max_abs_diff(&quarter), 0.0);
        assert!(matches!(density_from_deformation(&rho0, &eye(1e-5)), Err(Error::SingularDeformation { .. })));
    }

    #[test]
    fn random_deformation_matches_leibniz_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = grid();
        let mats: Vec<[[f64; 3]; 3]> = (0..g.len())
            .map(|_| std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-2.0..2.0))))
            .collect();
        let leibniz = |m: &[[f64; 3]; 3]| {
            m[0][0] * m[1][1] * m[2][2] + m[0][1] * m[1][2] * m[2][0] + m[0][2] * m[1][0] * m[2][1]
                - m[0][2] * m[1][1] * m[2][0]
                - m[0][0] * m[1][2] * m[2][1]
                - m[0][1] * m[1][0] * m[2][2]
        };
        let ms = mats.clone();
        let f = Tensor2Field::from_fn(g, move |x| {
            let h = 0.25;
            let ijk = [(x[0] / h).round() as usize, (x[1] / h).round() as usize, (x[2] / h).round() as usize];
            ms[ijk[0] + 5 * (ijk[1] + 5 * ijk[2])]
        });
        let rho = density_from_deformation(&ScalarField::constant(g, 1.0), &f).unwrap();
        for (idx, m) in mats.iter().enumerate() {
            let want = 1.0 / leibniz(m);
            assert!((rho.at(idx) - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
    }

    #[test]
    fn incompressible_models_require_unit_density() {
        let g = grid();
        let model = StressModel::EulerIncompressible { pressure: ScalarField::constant(g, 1.0) };
        let err = ContinuumState::from_model(&model, ScalarField::constant(g, 1.1), VectorField::zeros(g));
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn divergence_is_reported_not_enforced() {
        let g = grid();
        let model = StressModel::EulerIncompressible { pressure: ScalarField::constant(g, 1.0) };
        let u = VectorField::from_fn(g, |x| [x[0], 0.0, 0.0]);
        let s = ContinuumState::from_model(&model, ScalarField::constant(g, 1.0), u).unwrap();
        let r = s.divergence_report(1e-8).unwrap();
        assert!(r.flagged && (r.max_abs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rest_state_gives_pressure_times_identity() {
        let g = grid();
        let model = StressModel::EulerIncompressible { pressure: ScalarField::constant(g, 0.8) };
        let s = ContinuumState::from_model(&model, ScalarField::constant(g, 1.0), VectorField::zeros(g)).unwrap();
        let r = build_rhat(&s).unwrap();
        assert_eq!(r.matrix.max_abs_diff(&SymTensor2Field::constant(g, SymMat3::diag(0.8, 0.8, 0.8))), 0.0);
    }

    #[test]
    fn euler_example_matrix_and_determinant() {
        let t = SymMat3::diag(-2.0, -2.0, -2.0);
        let m = rhat_point(1.0, [1.0, 2.0, 3.0], &t).to_matrix();
        assert_eq!(m.to_rows(), [[11.0, 3.0, -6.0], [3.0, 3.0, -2.0], [-6.0, -2.0, 6.0]]);
        let rep = node_definiteness(&m);
        assert_eq!(rep.det, 64.0);
        assert!(rep.positive_definite && rep.nondegenerate);
    }

    #[test]
    fn couette_matrix_from_state() {
        let (u1, u1p, p0, gamma) = (0.6, 1.7, 0.4, 0.05);
        let t = SymMat3([-p0, -p0, -p0, 0.0, gamma * u1p, 0.0]);
        let m = rhat_point(1.0, [u1, 0.0, 0.0], &t).to_matrix();
        assert_eq!(m, couette_rhat_matrix(u1, u1p, p0, gamma));
    }

    #[test]
    fn shear_with_zero_pressure_is_degenerate() {
        let m = rhat_point(1.0, [0.9, 0.0, 0.0], &SymMat3::ZERO).to_matrix();
        let rep = node_definiteness(&m);
        assert_eq!(rep.det, 0.0);
        assert!(!rep.nondegenerate && !rep.positive_definite);
    }

    #[test]
    fn shear_eigenvalue_examples() {
        let (l1, l2, l3) = shear_eigenvalues(1.0, 0.3, 0.5, 0.0);
        assert_eq!((l1, l2, l3), (1.5, 0.5, 0.5));
        let (l1, l2, l3) = shear_eigenvalues(1.0, 2.0, 1.0, 0.1);
        assert!((l1 - 2.0385164807134504).abs() < 1e-15);
        assert!((l2 - 0.9614835192865496).abs() < 1e-15);
        assert_eq!(l3, 1.0);
    }

    #[test]
    fn eigenvalues_converge_in_gamma_squared() {
        let (u1, u1p, p0) = (0.8, 1.3, 0.2);
        let dev = |g: f64| {
            let (a, b, _) = shear_eigenvalues(u1, u1p, p0, g);
            (a - (u1 * u1 + p0)).abs().max((b - p0).abs())
        };
        let ratio = dev(1e-2) / dev(5e-3);
        assert!((ratio - 4.0).abs() < 0.01, "{ratio}");
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn matrix_and_tensor_views_are_bijective(rho in 0.1f64..10.0, u in proptest::array::uniform3(-5.0f64..5.0),
                                                 t in proptest::array::uniform6(-5.0f64..5.0)) {
            let p = rhat_point(rho, u, &SymMat3(t));
            let m = p.to_matrix();
            prop_assert_eq!(m, rhat_matrix_entries(rho, u, &SymMat3(t)));
            prop_assert_eq!(CurvaturePoint::from_matrix(&m), p);
        }

        #[test]
        fn euler_determinant_closed_form(rho in 1e-3f64..10.0, p in -5.0f64..5.0, u in proptest::array::uniform3(-5.0f64..5.0)) {
            let m = rhat_point(rho, u, &SymMat3::diag(-p, -p, -p)).to_matrix();
            let q2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
            let closed = p * p * (p + rho * q2);
            let scale = m.max_abs().powi(3);
            prop_assert!((m.det() - closed).abs() <= 1e-12 * closed.abs().max(scale));
        }

        #[test]
        fn minors_agree_with_eigenvalues(rho in 1e-3f64..10.0, u in proptest::array::uniform3(-5.0f64..5.0),
                                         t in proptest::array::uniform6(-5.0f64..5.0)) {
            let m = rhat_point(rho, u, &SymMat3(t)).to_matrix();
            let rep = node_definiteness(&m);
            let by_eigen = rep.eigenvalues[2] > DEFINITENESS_TOL * m.max_abs();
            // decisions may legitimately differ only inside the tolerance band
            if (rep.eigenvalues[2]).abs() > 1e-6 * m.max_abs() {
                prop_assert_eq!(rep.positive_definite, by_eigen);
            }
        }

        #[test]
        fn lambda2_sign_matches_criterion(u1 in -3.0f64..3.0, u1p in -5.0f64..5.0, p0 in 0.0f64..2.0, gamma in 0.0f64..1.0) {
            let (_, l2, _) = shear_eigenvalues(u1, u1p, p0, gamma);
            let crit = p0 * p0 + p0 * u1 * u1 - gamma * gamma * u1p * u1p;
            if crit.abs() > 1e-10 {
                prop_assert_eq!(l2 > 0.0, crit > 0.0);
            }
        }
    }
}
