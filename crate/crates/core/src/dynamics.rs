//! Momentum right-hand sides contracted from connection and curvature, the
//! flux-divergence form, and the consistency checks linking them.
//!
//! For any metric the second Bianchi identity gives
//! `A_a = −Σ_b ∂_b F_ab`, where `F_ab` is the curvature component named by
//! the momentum flux `ρ u_a u_b − T_ab`. [`bianchi_consistency`] measures
//! `|A + div F|`, which vanishes at second order under refinement.

use crate::continuum_map::{ContinuumState, NAMED_RELATIONS};
use crate::error::{Error, Result};
use crate::exec;
use crate::fields::{derivative_at, Axis, FdOrder, ScalarField, VectorField};
use crate::geometry::{christoffel, riemann_curvature, Christoffel3, Curvature3, Metric3};

/// Placeholder for the summed index in [`MOMENTUM_TERMS`].
pub const LAMBDA: usize = 0;

/// One contraction `sign · Σ_λ Γ^λ_ab R_ijkl` contributing to row `row`,
/// where exactly one of `i, j, k, l` is [`LAMBDA`]. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContractionTerm {
    pub row: usize,
    pub lower: (usize, usize),
    pub curvature: [usize; 4],
    pub sign: i8,
}

const fn term(row: usize, lower: (usize, usize), curvature: [usize; 4]) -> ContractionTerm {
    ContractionTerm { row, lower, curvature, sign: -1 }
}

const L: usize = LAMBDA;

/// The momentum system, one entry per printed product with grouped
/// parentheses expanded.
pub const MOMENTUM_TERMS: [ContractionTerm; 18] = [
    term(1, (1, 2), [L, 3, 2, 3]),
    term(1, (2, 3), [1, 2, L, 3]),
    term(1, (2, 3), [3, 1, 2, L]),
    term(1, (1, 3), [2, L, 2, 3]),
    term(1, (2, 2), [3, 1, L, 3]),
    term(1, (3, 3), [1, 2, 2, L]),
    term(2, (1, 3), [L, 1, 2, 3]),
    term(2, (1, 3), [3, L, 1, 2]),
    term(2, (1, 1), [3, L, 2, 3]),
    term(2, (2, 1), [L, 3, 1, 3]),
    term(2, (2, 3), [1, L, 1, 3]),
    term(2, (3, 3), [L, 1, 1, 2]),
    term(3, (1, 2), [1, L, 2, 3]),
    term(3, (1, 2), [3, 1, L, 2]),
    term(3, (1, 1), [L, 2, 2, 3]),
    term(3, (2, 2), [3, 1, 1, L]),
    term(3, (3, 1), [L, 2, 1, 2]),
    term(3, (3, 2), [1, 2, 1, L]),
];

fn substitute(q: [usize; 4], lambda: usize) -> [usize; 4] {
    q.map(|x| if x == LAMBDA { lambda } else { x })
}

/// `A_a = Σ_terms sign · Σ_λ Γ^λ_bc R_...λ...` at every node.
pub fn momentum_rhs(gamma: &Christoffel3, rhat: &Curvature3) -> Result<VectorField> {
    if gamma.grid() != rhat.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = *gamma.grid();
    let nodes = exec::collect_indexed(grid.len(), |idx| {
        let g = gamma.at(idx);
        let r = rhat.at(idx);
        let mut a = [0.0; 3];
        for t in &MOMENTUM_TERMS {
            let mut s = 0.0;
            for lambda in 1..=3 {
                let [i, j, k, l] = substitute(t.curvature, lambda);
                s += g.get(lambda, t.lower.0, t.lower.1) * r.get(i, j, k, l);
            }
            a[t.row - 1] += f64::from(t.sign) * s;
        }
        a
    });
    Ok(VectorField::from_nodes(grid, &nodes))
}

/// Curvature quadruple named by the flux component `(a, b)`, symmetric in
/// `a, b`.
pub fn flux_curvature_index(a: usize, b: usize) -> [usize; 4] {
    let key = (a.min(b), a.max(b));
    NAMED_RELATIONS
        .iter()
        .find(|(_, ab)| *ab == key)
        .map(|(q, _)| *q)
        .expect("every symmetric index pair has a named relation")
}

/// Row divergences `Σ_b ∂_b (ρ u_a u_b − T_ab)` of the momentum flux.
pub fn flux_divergence(state: &ContinuumState) -> Result<VectorField> {
    let grid = *state.grid();
    let flux: Vec<Vec<f64>> = (0..6)
        .map(|s| {
            let (a, b) = crate::linalg::SYM_PAIRS[s];
            let (ua, ub) = (state.u.components()[a].values(), state.u.components()[b].values());
            let t = state.stress.components()[s].values();
            let rho = state.rho.values();
            (0..grid.len()).map(|n| rho[n] * ua[n] * ub[n] - t[n]).collect()
        })
        .collect();
    let nodes = exec::collect_indexed(grid.len(), |idx| {
        std::array::from_fn(|a| {
            (0..3)
                .map(|b| derivative_at(&grid, &flux[crate::linalg::sym_slot(a, b)], Axis::ALL[b], idx, FdOrder::Second))
                .sum()
        })
    });
    Ok(VectorField::from_nodes(grid, &nodes))
}

/// The same row divergences read off a curvature field through the named
/// relations, `Σ_b ∂_b R[flux(a, b)]`.
pub fn flux_divergence_of_curvature(rhat: &Curvature3) -> Result<VectorField> {
    rhat.check_finite()?;
    let grid = *rhat.grid();
    let entries: Vec<Vec<f64>> = (0..6)
        .map(|s| {
            let (a, b) = crate::linalg::SYM_PAIRS[s];
            let [i, j, k, l] = flux_curvature_index(a + 1, b + 1);
            (0..grid.len()).map(|n| rhat.value(n, i, j, k, l)).collect()
        })
        .collect();
    let nodes = exec::collect_indexed(grid.len(), |idx| {
        std::array::from_fn(|a| {
            (0..3)
                .map(|b| derivative_at(&grid, &entries[crate::linalg::sym_slot(a, b)], Axis::ALL[b], idx, FdOrder::Second))
                .sum()
        })
    });
    Ok(VectorField::from_nodes(grid, &nodes))
}

/// `∂_i A_i + ρ_tt`; zero when mass balance is consistent with `A`.
pub fn mass_consistency_residual(a: &VectorField, rho_tt: &ScalarField) -> Result<ScalarField> {
    if a.grid() != rho_tt.grid() {
        return Err(Error::GridMismatch);
    }
    rho_tt.check_finite()?;
    a.divergence(FdOrder::Second)?.zip_with(rho_tt, |d, r| d + r)
}

/// Result of checking the momentum contractions against the flux form.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub momentum: VectorField,
    pub flux_divergence: VectorField,
    /// Max over checked nodes of `|A + div F|`.
    pub residual: f64,
    /// Max of `|A|`, for scale.
    pub momentum_scale: f64,
    pub excluded_layers: usize,
}

/// Computes `A` from `Γ(g)` and `Riem(g)`, the curvature flux divergence,
/// and their discrepancy.
pub fn bianchi_consistency(g: &Metric3) -> Result<ConsistencyReport> {
    let gamma = christoffel(g)?;
    let r = riemann_curvature(g)?;
    let momentum = momentum_rhs(&gamma, &r)?;
    let div = flux_divergence_of_curvature(&r)?;
    let layers = g.unresolved_layers();
    let mut residual = 0.0_f64;
    for axis in Axis::ALL {
        let sum = momentum.component(axis).zip_with(div.component(axis), |x, y| x + y)?;
        residual = residual.max(sum.max_abs_interior(layers));
    }
    Ok(ConsistencyReport {
        momentum_scale: momentum.max_abs_interior(layers),
        momentum,
        flux_divergence: div,
        residual,
        excluded_layers: layers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuum_map::{build_rhat, euler_stress};
    use crate::fields::Grid3;
    use crate::geometry::{ChristoffelPoint, CurvaturePoint};
    use crate::linalg::SymMat3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// The three printed lines, typed in a plain notation: `G12` is
    /// `Γ^λ_12`, `R_L323` is `R_λ323`, and parentheses group products
    /// sharing one connection factor.
    const PRINTED: [&str; 3] = [
        "-G12 R_L323 - G23 (R_12L3 + R_312L) - G13 R_2L23 - G22 R_31L3 - G33 R_122L",
        "-G13 (R_L123 + R_3L12) - G11 R_3L23 - G21 R_L313 - G23 R_1L13 - G33 R_L112",
        "-G12 (R_1L23 + R_31L2) - G11 R_L223 - G22 R_311L - G31 R_L212 - G32 R_121L",
    ];

    fn parse_quad(s: &str) -> [usize; 4] {
        let digits: Vec<usize> =
            s.trim_start_matches("R_").chars().map(|c| if c == 'L' { LAMBDA } else { c.to_digit(10).unwrap() as usize }).collect();
        [digits[0], digits[1], digits[2], digits[3]]
    }

    fn parse_line(row: usize, line: &str) -> Vec<ContractionTerm> {
        let spaced = line.replace('(', " ( ").replace(')', " ) ");
        let mut out = Vec::new();
        let mut sign = 1i8;
        let mut lower = (0, 0);
        for tok in spaced.split_whitespace() {
            match tok {
                "-" => sign = -1,
                "+" | "(" | ")" => {}
                t if t.starts_with("-G") || t.starts_with('G') => {
                    if t.starts_with('-') {
                        sign = -1;
                    }
                    let d: Vec<usize> = t.trim_start_matches('-').trim_start_matches('G').chars().map(|c| c.to_digit(10).unwrap() as usize).collect();
                    lower = (d[0], d[1]);
                }
                t => out.push(ContractionTerm { row, lower, curvature: parse_quad(t), sign }),
            }
        }
        out
    }

    #[test]
    fn table_matches_printed_system() {
        let parsed: Vec<ContractionTerm> = PRINTED.iter().enumerate().flat_map(|(r, l)| parse_line(r + 1, l)).collect();
        assert_eq!(parsed.as_slice(), MOMENTUM_TERMS.as_slice());
        for t in &MOMENTUM_TERMS {
            assert_eq!(t.curvature.iter().filter(|&&x| x == LAMBDA).count(), 1);
        }
    }

    fn periodic(n: usize) -> Grid3 {
        Grid3::periodic([n; 3], [2.0 * PI; 3]).unwrap()
    }

    fn random_gamma(grid: Grid3, seed: u64) -> Christoffel3 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<ChristoffelPoint> =
            (0..grid.len()).map(|_| ChristoffelPoint(std::array::from_fn(|_| rng.random_range(-1.0..1.0)))).collect();
        Christoffel3::from_points(grid, &pts)
    }

    fn random_curvature(grid: Grid3, seed: u64) -> Curvature3 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<CurvaturePoint> =
            (0..grid.len()).map(|_| CurvaturePoint(std::array::from_fn(|_| rng.random_range(-1.0..1.0)))).collect();
        Curvature3::from_points(grid, &pts)
    }

    #[test]
    fn vanishing_inputs_give_zero() {
        let g = periodic(6);
        let zero_gamma = Christoffel3::from_points(g, &vec![ChristoffelPoint([0.0; 18]); g.len()]);
        let zero_r = Curvature3::constant(g, CurvaturePoint::ZERO);
        assert_eq!(momentum_rhs(&zero_gamma, &random_curvature(g, 1)).unwrap().max_abs(), 0.0);
        assert_eq!(momentum_rhs(&random_gamma(g, 2), &zero_r).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn superposition() {
        let g = periodic(6);
        let (g1, g2) = (random_gamma(g, 3), random_gamma(g, 4));
        let (r1, r2) = (random_curvature(g, 5), random_curvature(g, 6));
        let r12 = Curvature3::from_points(
            g,
            &(0..g.len()).map(|i| CurvaturePoint(std::array::from_fn(|s| r1.at(i).0[s] + r2.at(i).0[s]))).collect::<Vec<_>>(),
        );
        let lhs = momentum_rhs(&g1, &r12).unwrap();
        let a = momentum_rhs(&g1, &r1).unwrap();
        let b = momentum_rhs(&g1, &r2).unwrap();
        let sum = VectorField::from_nodes(g, &(0..g.len()).map(|i| {
            let (x, y) = (a.at(i), b.at(i));
            [x[0] + y[0], x[1] + y[1], x[2] + y[2]]
        }).collect::<Vec<_>>());
        assert!(lhs.max_abs_diff(&sum) < 1e-13);

        let lhs = momentum_rhs(&g1.add(&g2).unwrap(), &r1).unwrap();
        let b = momentum_rhs(&g2, &r1).unwrap();
        let sum = VectorField::from_nodes(g, &(0..g.len()).map(|i| {
            let (x, y) = (a.at(i), b.at(i));
            [x[0] + y[0], x[1] + y[1], x[2] + y[2]]
        }).collect::<Vec<_>>());
        assert!(lhs.max_abs_diff(&sum) < 1e-13);
    }

    #[test]
    fn constant_fields_have_zero_divergence() {
        let g = periodic(6);
        let r = Curvature3::constant(g, CurvaturePoint([0.3, -1.0, 2.0, 0.5, 0.1, -0.7]));
        assert_eq!(flux_divergence_of_curvature(&r).unwrap().max_abs(), 0.0);
        let s = ContinuumState::new(
            ScalarField::constant(g, 1.3),
            VectorField::from_fn(g, |_| [0.2, -0.4, 1.0]),
            crate::fields::SymTensor2Field::constant(g, SymMat3([1.0, 2.0, 3.0, 0.1, 0.2, 0.3])),
        )
        .unwrap();
        assert_eq!(flux_divergence(&s).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn steady_shear_flux_vanishes() {
        let g = Grid3::clamped([9, 17, 5], [0.0; 3], [1.0; 3]).unwrap();
        let u = VectorField::from_fn(g, |x| [(3.0 * x[1]).sin() + x[1] * x[1], 0.0, 0.0]);
        let p = ScalarField::zeros(g);
        let s = ContinuumState::new(ScalarField::constant(g, 1.0), u, euler_stress(&p)).unwrap();
        assert_eq!(flux_divergence(&s).unwrap().max_abs(), 0.0);
        let r = build_rhat(&s).unwrap().curvature;
        assert_eq!(flux_divergence_of_curvature(&r).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn state_and_curvature_divergences_agree() {
        let g = periodic(8);
        let u = VectorField::from_fn(g, |x| [x[1].sin(), (x[0] + x[2]).cos(), 0.3 * x[0].sin()]);
        let p = ScalarField::from_fn(g, |x| 1.0 + 0.5 * x[2].cos());
        let s = ContinuumState::new(ScalarField::from_fn(g, |x| 2.0 + x[0].sin()), u, euler_stress(&p)).unwrap();
        let r = build_rhat(&s).unwrap().curvature;
        assert!(flux_divergence(&s).unwrap().max_abs_diff(&flux_divergence_of_curvature(&r).unwrap()) < 1e-13);
    }

    #[test]
    fn taylor_green_is_steady() {
        let err = |n: usize| {
            let g = Grid3::periodic([n, n, 5], [2.0 * PI; 3]).unwrap();
            let u = VectorField::from_fn(g, |x| [x[0].sin() * x[1].cos(), -x[0].cos() * x[1].sin(), 0.0]);
            let p = ScalarField::from_fn(g, |x| ((2.0 * x[0]).cos() + (2.0 * x[1]).cos()) / 4.0);
            let s = ContinuumState::new(ScalarField::constant(g, 1.0), u, euler_stress(&p)).unwrap();
            (flux_divergence(&s).unwrap().max_abs(), g.spacing()[0])
        };
        // the discrete flux of this pair cancels to roundoff on uniform grids
        let (e1, h) = err(16);
        let (e2, _) = err(32);
        assert!(e1 <= h * h && e2 < 1e-12, "{e1} {e2}");
    }

    #[test]
    fn mass_residual_cases() {
        let g = periodic(6);
        assert_eq!(mass_consistency_residual(&VectorField::zeros(g), &ScalarField::zeros(g)).unwrap().max_abs(), 0.0);
        let a = VectorField::from_fn(g, |x| [x[1].sin(), x[2].cos(), x[0].sin()]);
        assert_eq!(mass_consistency_residual(&a, &ScalarField::zeros(g)).unwrap().max_abs(), 0.0);
    }

    fn perturbed(eps: f64) -> impl Fn([f64; 3]) -> SymMat3 + Send + Sync + 'static {
        move |x| SymMat3::diag(1.0 + eps * x[1].sin() * x[2].sin(), 1.0, 1.0)
    }

    #[test]
    fn bianchi_consistency_converges() {
        let res = |n: usize| bianchi_consistency(&Metric3::analytic(periodic(n), perturbed(0.01)).unwrap()).unwrap();
        // ratios approach 4 from below: 3.0 at 8→16, 3.7 at 16→32
        let (a, b) = (res(16), res(32));
        assert!(a.momentum_scale > 1e-6);
        assert!(a.residual / b.residual > 3.5, "{} {}", a.residual, b.residual);
    }

    #[test]
    fn mass_residual_tracks_divergence_of_flux() {
        // with ρ_tt := −div A the residual is zero by construction; with
        // ρ_tt := div div F it measures |div(A + div F)| = O(h²)
        let err = |n: usize| {
            let rep = bianchi_consistency(&Metric3::analytic(periodic(n), perturbed(0.01)).unwrap()).unwrap();
            let ddf = rep.flux_divergence.divergence(FdOrder::Second).unwrap();
            mass_consistency_residual(&rep.momentum, &ddf).unwrap().max_abs()
        };
        let (a, b) = (err(24), err(48));
        assert!(a / b > 3.5, "{a} {b}");
    }
}
