use super::metric::{inverse_nodes, Metric3};
use super::symmetry::{CurvaturePoint, CurvatureSlot};
use crate::error::{Error, Result};
use crate::exec;
use crate::fields::{derivative_at, split_nodes, Axis, FdOrder, Grid3, ScalarField, SymTensor2Field};
use crate::linalg::{sym_slot, SymMat3};

/// Flat index of `Γ^k_ij` (0-based) in an 18-slot array.
#[inline]
const fn gidx(k: usize, i: usize, j: usize) -> usize {
    k * 6 + sym_slot(i, j)
}

/// Connection coefficients at one point. Accessors take 1-based indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChristoffelPoint(pub [f64; 18]);

impl ChristoffelPoint {
    /// `Γ^k_ij`, symmetric in `i, j`.
    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.0[gidx(k - 1, i - 1, j - 1)]
    }
}

/// Christoffel symbols of the second kind, 18 independent fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel3 {
    comps: [ScalarField; 18],
}

impl Christoffel3 {
    pub fn from_points(grid: Grid3, nodes: &[ChristoffelPoint]) -> Self {
        let raw: Vec<[f64; 18]> = nodes.iter().map(|p| p.0).collect();
        Self { comps: split_nodes(grid, &raw) }
    }

    /// Builds the field from a per-point formula.
    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> ChristoffelPoint + Send + Sync) -> Self {
        let raw = exec::collect_indexed(grid.len(), |idx| f(grid.point(idx)).0);
        Self { comps: split_nodes(grid, &raw) }
    }

    pub fn grid(&self) -> &Grid3 {
        self.comps[0].grid()
    }

    /// `Γ^k_ij` as a field, 1-based indices; `(k, j, i)` is the same field.
    pub fn component(&self, k: usize, i: usize, j: usize) -> &ScalarField {
        &self.comps[gidx(k - 1, i - 1, j - 1)]
    }

    #[inline]
    pub fn at(&self, idx: usize) -> ChristoffelPoint {
        ChristoffelPoint(std::array::from_fn(|c| self.comps[c].at(idx)))
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0_f64, |a, c| a.max(c.max_abs()))
    }

    pub fn max_abs_diff(&self, other: &Christoffel3) -> f64 {
        (0..18).fold(0.0_f64, |a, c| a.max(self.comps[c].max_abs_diff(&other.comps[c])))
    }

    /// Field-wise sum, for superposition checks.
    pub fn add(&self, other: &Christoffel3) -> Result<Christoffel3> {
        let mut comps = self.comps.clone();
        for (c, o) in comps.iter_mut().zip(other.comps.iter()) {
            *c = c.zip_with(o, |a, b| a + b)?;
        }
        Ok(Self { comps })
    }

    fn crop(&self, target: Grid3, offset: [usize; 3]) -> Self {
        Self { comps: std::array::from_fn(|c| self.comps[c].crop(target, offset)) }
    }
}

/// Covariant Riemann tensor stored as its six independent components.
#[derive(Debug, Clone, PartialEq)]
pub struct Curvature3 {
    comps: [ScalarField; 6],
}

impl Curvature3 {
    pub fn new(comps: [ScalarField; 6]) -> Result<Self> {
        let grid = *comps[0].grid();
        if comps.iter().any(|c| *c.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { comps })
    }

    pub fn from_points(grid: Grid3, nodes: &[CurvaturePoint]) -> Self {
        let raw: Vec<[f64; 6]> = nodes.iter().map(|p| p.0).collect();
        Self { comps: split_nodes(grid, &raw) }
    }

    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> CurvaturePoint + Send + Sync) -> Self {
        let raw = exec::collect_indexed(grid.len(), |idx| f(grid.point(idx)).0);
        Self { comps: split_nodes(grid, &raw) }
    }

    pub fn constant(grid: Grid3, r: CurvaturePoint) -> Self {
        Self { comps: std::array::from_fn(|c| ScalarField::constant(grid, r.0[c])) }
    }

    pub fn grid(&self) -> &Grid3 {
        self.comps[0].grid()
    }

    pub fn slot(&self, s: CurvatureSlot) -> &ScalarField {
        &self.comps[s.index()]
    }

    pub fn components(&self) -> &[ScalarField; 6] {
        &self.comps
    }

    #[inline]
    pub fn at(&self, idx: usize) -> CurvaturePoint {
        CurvaturePoint(std::array::from_fn(|c| self.comps[c].at(idx)))
    }

    /// `R_ijkl` at node `idx` for arbitrary 1-based indices.
    pub fn value(&self, idx: usize, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.at(idx).get(i, j, k, l)
    }

    pub fn check_finite(&self) -> Result<()> {
        self.comps.iter().try_for_each(|c| c.check_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0_f64, |a, c| a.max(c.max_abs()))
    }

    pub fn max_abs_diff(&self, other: &Curvature3) -> f64 {
        (0..6).fold(0.0_f64, |a, c| a.max(self.comps[c].max_abs_diff(&other.comps[c])))
    }

    pub fn max_abs_interior(&self, depth: usize) -> f64 {
        self.comps.iter().fold(0.0_f64, |a, c| a.max(c.max_abs_interior(depth)))
    }

    /// Matrix view, rows and columns indexed by (12, 23, 13).
    pub fn to_matrix_field(&self) -> SymTensor2Field {
        let grid = *self.grid();
        let nodes = exec::collect_indexed(grid.len(), |idx| self.at(idx).to_matrix());
        SymTensor2Field::from_nodes(grid, &nodes)
    }

    pub fn from_matrix_field(m: &SymTensor2Field) -> Self {
        let grid = *m.grid();
        let nodes = exec::collect_indexed(grid.len(), |idx| CurvaturePoint::from_matrix(&m.at(idx)).0);
        Self { comps: split_nodes(grid, &nodes) }
    }

    fn crop(&self, target: Grid3, offset: [usize; 3]) -> Self {
        Self { comps: std::array::from_fn(|c| self.comps[c].crop(target, offset)) }
    }
}

/// Everything derived from the metric on its (possibly padded) sampling grid.
struct Work {
    grid: Grid3,
    metric: SymTensor2Field,
    gamma: [ScalarField; 18],
}

const ORDER: FdOrder = FdOrder::Second;

fn christoffel_work(g: &Metric3) -> Result<Work> {
    let (metric, _) = g.work();
    let grid = *metric.grid();
    let inverse = inverse_nodes(metric)?;
    let comps = metric.components();
    let nodes = exec::collect_indexed(grid.len(), |idx| {
        // dg[a][slot] = ∂_a g_slot
        let dg: [[f64; 6]; 3] =
            std::array::from_fn(|a| std::array::from_fn(|s| derivative_at(&grid, comps[s].values(), Axis::ALL[a], idx, ORDER)));
        let d = |a: usize, i: usize, j: usize| dg[a][sym_slot(i, j)];
        let inv = &inverse[idx];
        let mut out = [0.0; 18];
        for k in 0..3 {
            for (s, &(i, j)) in crate::linalg::SYM_PAIRS.iter().enumerate() {
                let mut acc = 0.0;
                for l in 0..3 {
                    acc += inv.get(k, l) * (d(i, j, l) + d(j, i, l) - d(l, i, j));
                }
                out[k * 6 + s] = 0.5 * acc;
            }
        }
        out
    });
    Ok(Work { grid, metric: metric.clone(), gamma: split_nodes(grid, &nodes) })
}

impl Work {
    #[inline]
    fn gamma_at(&self, idx: usize) -> [f64; 18] {
        std::array::from_fn(|c| self.gamma[c].values()[idx])
    }

    /// `dgam[a][gidx(k,i,j)] = ∂_a Γ^k_ij`
    #[inline]
    fn gamma_derivs(&self, idx: usize) -> [[f64; 18]; 3] {
        std::array::from_fn(|a| {
            std::array::from_fn(|c| derivative_at(&self.grid, self.gamma[c].values(), Axis::ALL[a], idx, ORDER))
        })
    }

    fn riemann_nodes(&self) -> Vec<[f64; 6]> {
        exec::collect_indexed(self.grid.len(), |idx| {
            let gm = self.gamma_at(idx);
            let dg = self.gamma_derivs(idx);
            let g = self.metric.at(idx);
            let gam = |k: usize, i: usize, j: usize| gm[gidx(k, i, j)];
            // R^q_jkl = ∂_k Γ^q_lj − ∂_l Γ^q_kj + Γ^q_kp Γ^p_lj − Γ^q_lp Γ^p_kj
            let up = |q: usize, j: usize, k: usize, l: usize| {
                let mut v = dg[k][gidx(q, l, j)] - dg[l][gidx(q, k, j)];
                for p in 0..3 {
                    v += gam(q, k, p) * gam(p, l, j) - gam(q, l, p) * gam(p, k, j);
                }
                v
            };
            std::array::from_fn(|s| {
                let [i, j, k, l] = CurvatureSlot::ALL[s].indices().map(|x| x - 1);
                (0..3).map(|q| g.get(i, q) * up(q, j, k, l)).sum()
            })
        })
    }

    fn ricci_nodes(&self) -> Vec<SymMat3> {
        exec::collect_indexed(self.grid.len(), |idx| {
            let gm = self.gamma_at(idx);
            let dg = self.gamma_derivs(idx);
            let gam = |k: usize, i: usize, j: usize| gm[gidx(k, i, j)];
            // R_ij = ∂_p Γ^p_ij − ∂_j Γ^p_ip + Γ^q_ij Γ^p_pq − Γ^q_ip Γ^p_jq
            SymMat3(std::array::from_fn(|s| {
                let (i, j) = crate::linalg::SYM_PAIRS[s];
                let mut v = 0.0;
                for p in 0..3 {
                    v += dg[p][gidx(p, i, j)] - dg[j][gidx(p, i, p)];
                    for q in 0..3 {
                        v += gam(q, i, j) * gam(p, p, q) - gam(q, i, p) * gam(p, j, q);
                    }
                }
                v
            }))
        })
    }
}

/// Christoffel symbols `Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)`.
pub fn christoffel(g: &Metric3) -> Result<Christoffel3> {
    let w = christoffel_work(g)?;
    let (_, offset) = g.work();
    Ok(Christoffel3 { comps: w.gamma }.crop(*g.grid(), offset))
}

/// The six covariant Riemann components, from finite differences of the
/// Christoffel fields lowered with `g`.
pub fn riemann_curvature(g: &Metric3) -> Result<Curvature3> {
    let w = christoffel_work(g)?;
    let (_, offset) = g.work();
    Ok(Curvature3 { comps: split_nodes(w.grid, &w.riemann_nodes()) }.crop(*g.grid(), offset))
}

/// Ricci tensor by the direct connection formula.
pub fn ricci(g: &Metric3) -> Result<SymTensor2Field> {
    let w = christoffel_work(g)?;
    let (_, offset) = g.work();
    Ok(SymTensor2Field::from_nodes(w.grid, &w.ricci_nodes()).crop(*g.grid(), offset))
}

/// Ricci tensor as the contraction `R_ik = g^{jl} R_ijkl` of a curvature
/// field, an independent route to [`ricci`].
pub fn ricci_from_curvature(g: &Metric3, r: &Curvature3) -> Result<SymTensor2Field> {
    if g.grid() != r.grid() {
        return Err(Error::GridMismatch);
    }
    let inv = inverse_nodes(g.components())?;
    let grid = *g.grid();
    let nodes = exec::collect_indexed(grid.len(), |idx| {
        let rp = r.at(idx);
        let gi = &inv[idx];
        SymMat3(std::array::from_fn(|s| {
            let (i, k) = crate::linalg::SYM_PAIRS[s];
            let mut v = 0.0;
            for j in 0..3 {
                for l in 0..3 {
                    v += gi.get(j, l) * rp.get(i + 1, j + 1, k + 1, l + 1);
                }
            }
            v
        }))
    });
    Ok(SymTensor2Field::from_nodes(grid, &nodes))
}

/// Pointwise maximum of the cyclic covariant-derivative sum of the second
/// Bianchi identity over all index choices.
#[derive(Debug, Clone, PartialEq)]
pub struct BianchiResidual {
    /// Residual per node; nodes inside the excluded boundary layer hold 0.
    pub residual: ScalarField,
    /// Width of the clamped boundary layer left out of the check.
    pub excluded_layers: usize,
}

impl BianchiResidual {
    pub fn max(&self) -> f64 {
        self.residual.max_abs()
    }
}

/// Second Bianchi identity `∇_s R_ijkl + ∇_k R_ijls + ∇_l R_ijsk = 0`,
/// evaluated with nested first-derivative stencils.
pub fn second_bianchi_residual(g: &Metric3) -> Result<BianchiResidual> {
    let w = christoffel_work(g)?;
    let grid = w.grid;
    let curv = split_nodes(grid, &w.riemann_nodes());
    let values = exec::collect_indexed(grid.len(), |idx| {
        let r = CurvaturePoint(std::array::from_fn(|c| curv[c].values()[idx]));
        let dr: [CurvaturePoint; 3] = std::array::from_fn(|a| {
            CurvaturePoint(std::array::from_fn(|c| derivative_at(&grid, curv[c].values(), Axis::ALL[a], idx, ORDER)))
        });
        let gm = w.gamma_at(idx);
        let gam = |k: usize, i: usize, j: usize| gm[gidx(k - 1, i - 1, j - 1)];
        let cov = |s: usize, i: usize, j: usize, k: usize, l: usize| {
            let mut v = dr[s - 1].get(i, j, k, l);
            for m in 1..=3 {
                v -= gam(m, s, i) * r.get(m, j, k, l)
                    + gam(m, s, j) * r.get(i, m, k, l)
                    + gam(m, s, k) * r.get(i, j, m, l)
                    + gam(m, s, l) * r.get(i, j, k, m);
            }
            v
        };
        let mut worst = 0.0_f64;
        for i in 1..=3 {
            for j in 1..=3 {
                if i == j {
                    continue;
                }
                for k in 1..=3 {
                    for l in 1..=3 {
                        for s in 1..=3 {
                            let sum = cov(s, i, j, k, l) + cov(k, i, j, l, s) + cov(l, i, j, s, k);
                            worst = worst.max(sum.abs());
                        }
                    }
                }
            }
        }
        worst
    });
    let (_, offset) = g.work();
    let full = ScalarField::new(grid, values)?.crop(*g.grid(), offset);
    let layers = g.unresolved_layers();
    let target = *g.grid();
    let masked = exec::collect_indexed(target.len(), |idx| {
        if target.clamped_depth(target.coords(idx)) >= layers {
            full.at(idx)
        } else {
            0.0
        }
    });
    Ok(BianchiResidual { residual: ScalarField::new(target, masked)?, excluded_layers: layers })
}
