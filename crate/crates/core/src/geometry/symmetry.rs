//! Index algebra of the covariant Riemann tensor in dimension 3.
//!
//! Tensor indices in this module are 1-based, as in the usual notation.

use crate::linalg::SymMat3;

/// The six independent covariant curvature components, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurvatureSlot {
    R1212,
    R1313,
    R2323,
    R1213,
    R1223,
    R1323,
}

impl CurvatureSlot {
    pub const ALL: [CurvatureSlot; 6] = [
        CurvatureSlot::R1212,
        CurvatureSlot::R1313,
        CurvatureSlot::R2323,
        CurvatureSlot::R1213,
        CurvatureSlot::R1223,
        CurvatureSlot::R1323,
    ];

    pub const fn index(self) -> usize {
        self as usize
    }

    /// The index quadruple this slot stores.
    pub const fn indices(self) -> [usize; 4] {
        match self {
            CurvatureSlot::R1212 => [1, 2, 1, 2],
            CurvatureSlot::R1313 => [1, 3, 1, 3],
            CurvatureSlot::R2323 => [2, 3, 2, 3],
            CurvatureSlot::R1213 => [1, 2, 1, 3],
            CurvatureSlot::R1223 => [1, 2, 2, 3],
            CurvatureSlot::R1323 => [1, 3, 2, 3],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CurvatureSlot::R1212 => "R1212",
            CurvatureSlot::R1313 => "R1313",
            CurvatureSlot::R2323 => "R2323",
            CurvatureSlot::R1213 => "R1213",
            CurvatureSlot::R1223 => "R1223",
            CurvatureSlot::R1323 => "R1323",
        }
    }
}

/// Rank of an ordered pair `a < b` among (12, 13, 23).
const fn pair_rank(a: usize, b: usize) -> usize {
    match (a, b) {
        (1, 2) => 0,
        (1, 3) => 1,
        _ => 2,
    }
}

/// Resolves `R_ijkl` to its stored slot and sign using antisymmetry in each
/// index pair and symmetry under pair exchange. `None` when `i = j` or
/// `k = l`, where the component vanishes. Indices must lie in `1..=3`.
pub fn canonical_component(i: usize, j: usize, k: usize, l: usize) -> Option<(CurvatureSlot, f64)> {
    assert!((1..=3).contains(&i) && (1..=3).contains(&j) && (1..=3).contains(&k) && (1..=3).contains(&l));
    if i == j || k == l {
        return None;
    }
    let mut sign = 1.0;
    let (a, b) = if i < j { (i, j) } else { sign = -sign; (j, i) };
    let (c, d) = if k < l { (k, l) } else { sign = -sign; (l, k) };
    let (p, q) = {
        let (r1, r2) = (pair_rank(a, b), pair_rank(c, d));
        if r1 <= r2 { (r1, r2) } else { (r2, r1) }
    };
    let slot = match (p, q) {
        (0, 0) => CurvatureSlot::R1212,
        (1, 1) => CurvatureSlot::R1313,
        (2, 2) => CurvatureSlot::R2323,
        (0, 1) => CurvatureSlot::R1213,
        (0, 2) => CurvatureSlot::R1223,
        _ => CurvatureSlot::R1323,
    };
    Some((slot, sign))
}

/// Bivector pairs indexing the rows and columns of the curvature matrix.
pub const MATRIX_PAIRS: [(usize, usize); 3] = [(1, 2), (2, 3), (1, 3)];

/// Entries of the curvature matrix as printed in terms of named components:
/// `(row, col, [i, j, k, l], sign)` meaning `M[row][col] = sign * R_ijkl`.
/// The two entries written with a leading minus are resolved to stored
/// slots through [`canonical_component`] at run time.
pub const MATRIX_ENTRY_MAP: [(usize, usize, [usize; 4], f64); 6] = [
    (0, 0, [1, 2, 1, 2], 1.0),
    (1, 1, [2, 3, 2, 3], 1.0),
    (2, 2, [1, 3, 1, 3], 1.0),
    (0, 1, [1, 2, 2, 3], 1.0),
    (0, 2, [3, 1, 1, 2], -1.0),
    (1, 2, [3, 1, 2, 3], -1.0),
];

/// The six curvature components at one point, in [`CurvatureSlot`] order.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurvaturePoint(pub [f64; 6]);

impl CurvaturePoint {
    pub const ZERO: Self = Self([0.0; 6]);

    pub fn slot(&self, s: CurvatureSlot) -> f64 {
        self.0[s.index()]
    }

    /// `R_ijkl` for arbitrary 1-based indices.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        match canonical_component(i, j, k, l) {
            Some((s, sign)) => sign * self.0[s.index()],
            None => 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    /// Curvature matrix with rows and columns indexed by (12, 23, 13).
    pub fn to_matrix(&self) -> SymMat3 {
        let mut rows = [[0.0; 3]; 3];
        for (r, c, [i, j, k, l], sign) in MATRIX_ENTRY_MAP {
            let v = sign * self.get(i, j, k, l);
            rows[r][c] = v;
            rows[c][r] = v;
        }
        SymMat3::from_rows(&rows)
    }

    /// Inverse of [`CurvaturePoint::to_matrix`].
    pub fn from_matrix(m: &SymMat3) -> Self {
        let mut out = [0.0; 6];
        for (r, c, [i, j, k, l], sign) in MATRIX_ENTRY_MAP {
            let (s, slot_sign) = canonical_component(i, j, k, l).expect("entry map never names a vanishing component");
            // M = sign * slot_sign * R_slot and both factors are ±1
            out[s.index()] = sign * slot_sign * m.get(r, c);
        }
        Self(out)
    }

    /// The curvature operator on bivectors in the (12, 13, 23) basis.
    /// Its largest eigenvalue bounds every sectional-type quantity
    /// `R(v, x, v, x) <= λ_max |v|² |x|²`.
    pub fn bivector_operator(&self) -> SymMat3 {
        let pairs = [(1, 2), (1, 3), (2, 3)];
        let mut rows = [[0.0; 3]; 3];
        for (r, &(i, j)) in pairs.iter().enumerate() {
            for (c, &(k, l)) in pairs.iter().enumerate() {
                rows[r][c] = self.get(i, j, k, l);
            }
        }
        SymMat3::from_rows(&rows)
    }
}
