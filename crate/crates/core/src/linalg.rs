//! Fixed-size 3×3 linear algebra used per grid node.

use std::f64::consts::PI;

/// General 3×3 matrix, row-major.
pub type Mat3 = [[f64; 3]; 3];

/// Component order used by every symmetric 3×3 object in the crate:
/// `(11, 22, 33, 12, 13, 23)`.
pub const SYM_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

/// Slot of the (0-based) entry `(i, j)` in [`SYM_PAIRS`] order.
#[inline]
pub const fn sym_slot(i: usize, j: usize) -> usize {
    match (i, j) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (0, 1) | (1, 0) => 3,
        (0, 2) | (2, 0) => 4,
        (1, 2) | (2, 1) => 5,
        _ => panic!("symmetric index out of range"),
    }
}

/// Normalised cubic discriminant `1 - r²` below which the trigonometric
/// eigenvalue formula hands over to Jacobi rotations.
pub const EIGEN_DISCRIMINANT_FLOOR: f64 = 1e-6;

/// Symmetric 3×3 matrix stored as its six independent entries.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymMat3(pub [f64; 6]);

impl SymMat3 {
    pub const ZERO: Self = Self([0.0; 6]);
    pub const IDENTITY: Self = Self([1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        Self([a, b, c, 0.0, 0.0, 0.0])
    }

    /// Builds from full rows, reading the upper triangle.
    pub fn from_rows(m: &Mat3) -> Self {
        Self([m[0][0], m[1][1], m[2][2], m[0][1], m[0][2], m[1][2]])
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[sym_slot(i, j)]
    }

    pub fn to_rows(&self) -> Mat3 {
        let m = &self.0;
        [[m[0], m[3], m[4]], [m[3], m[1], m[5]], [m[4], m[5], m[2]]]
    }

    pub fn trace(&self) -> f64 {
        self.0[0] + self.0[1] + self.0[2]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = [0.0; 6];
        for (o, (a, b)) in out.iter_mut().zip(self.0.iter().zip(other.0.iter())) {
            *o = a - b;
        }
        Self(out)
    }

    /// Closed-form determinant (cofactor expansion along the first row).
    pub fn det(&self) -> f64 {
        let [a, d, f, b, c, e] = self.0;
        a * (d * f - e * e) - b * (b * f - e * c) + c * (b * e - d * c)
    }

    /// Leading principal minors `(m11, m11 m22 - m12², det)`.
    pub fn leading_minors(&self) -> [f64; 3] {
        let [a, d, _, b, _, _] = self.0;
        [a, a * d - b * b, self.det()]
    }

    /// Inverse via adjugate. Returns the inverse and the determinant, or
    /// `None` when `|det|` is below `det_floor`.
    pub fn inverse(&self, det_floor: f64) -> Option<(Self, f64)> {
        let [a, d, f, b, c, e] = self.0;
        let c00 = d * f - e * e;
        let c01 = c * e - b * f;
        let c02 = b * e - c * d;
        let det = a * c00 + b * c01 + c * c02;
        if !(det.abs() > det_floor) {
            return None;
        }
        let c11 = a * f - c * c;
        let c12 = b * c - a * e;
        let c22 = a * d - b * b;
        let s = 1.0 / det;
        Some((Self([c00 * s, c11 * s, c22 * s, c01 * s, c02 * s, c12 * s]), det))
    }

    /// Eigenvalues in descending order.
    ///
    /// Trigonometric closed form for the depressed cubic; near a repeated
    /// root (normalised discriminant below [`EIGEN_DISCRIMINANT_FLOOR`]) the
    /// arccosine is ill-conditioned, so cyclic Jacobi takes over.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let m = &self.0;
        let off = m[3] * m[3] + m[4] * m[4] + m[5] * m[5];
        if off == 0.0 {
            return sort_desc([m[0], m[1], m[2]]);
        }
        let q = self.trace() / 3.0;
        let (a, d, f) = (m[0] - q, m[1] - q, m[2] - q);
        let p = ((a * a + d * d + f * f + 2.0 * off) / 6.0).sqrt();
        if p <= f64::EPSILON * self.max_abs() {
            return [q, q, q];
        }
        let inv_p = 1.0 / p;
        let shifted = Self([a * inv_p, d * inv_p, f * inv_p, m[3] * inv_p, m[4] * inv_p, m[5] * inv_p]);
        let r = (shifted.det() / 2.0).clamp(-1.0, 1.0);
        if 1.0 - r * r < EIGEN_DISCRIMINANT_FLOOR {
            return self.jacobi_eigenvalues();
        }
        let phi = r.acos() / 3.0;
        let e1 = q + 2.0 * p * phi.cos();
        let e3 = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
        let e2 = 3.0 * q - e1 - e3;
        sort_desc([e1, e2, e3])
    }

    /// Eigenvalues by cyclic Jacobi rotations, descending.
    pub fn jacobi_eigenvalues(&self) -> [f64; 3] {
        let mut a = self.to_rows();
        let scale = self.max_abs();
        if scale == 0.0 {
            return [0.0; 3];
        }
        for _sweep in 0..64 {
            let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
            if off <= f64::EPSILON * 1e-3 * scale {
                break;
            }
            for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..3 {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..3 {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
        sort_desc([a[0][0], a[1][1], a[2][2]])
    }
}

fn sort_desc(mut v: [f64; 3]) -> [f64; 3] {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// `F Fᵀ` as a symmetric matrix.
pub fn gram_rows(f: &Mat3) -> SymMat3 {
    let dot = |i: usize, j: usize| f[i][0] * f[j][0] + f[i][1] * f[j][1] + f[i][2] * f[j][2];
    SymMat3([dot(0, 0), dot(1, 1), dot(2, 2), dot(0, 1), dot(0, 2), dot(1, 2)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym(rng: &mut ChaCha8Rng, scale: f64) -> SymMat3 {
        SymMat3(std::array::from_fn(|_| rng.random_range(-scale..scale)))
    }

    // Leibniz permutation sum: independent of the cofactor code in det().
    fn det_leibniz(m: &Mat3) -> f64 {
        let perms = [
            ([0, 1, 2], 1.0),
            ([1, 2, 0], 1.0),
            ([2, 0, 1], 1.0),
            ([0, 2, 1], -1.0),
            ([2, 1, 0], -1.0),
            ([1, 0, 2], -1.0),
        ];
        perms
            .iter()
            .map(|(p, s)| s * m[0][p[0]] * m[1][p[1]] * m[2][p[2]])
            .sum()
    }

    #[test]
    fn determinant_matches_leibniz() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let s = random_sym(&mut rng, 3.0);
            let rows = s.to_rows();
            assert!((s.det() - det_leibniz(&rows)).abs() <= 1e-12 * (1.0 + det_leibniz(&rows).abs()));
            assert!((det3(&rows) - det_leibniz(&rows)).abs() <= 1e-12 * (1.0 + det_leibniz(&rows).abs()));
        }
    }

    #[test]
    fn spec_matrix_determinant() {
        let m = SymMat3::from_rows(&[[11.0, 3.0, -6.0], [3.0, 3.0, -2.0], [-6.0, -2.0, 6.0]]);
        assert_eq!(m.det(), 64.0);
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let a = random_sym(&mut rng, 1.0);
            // shift to SPD
            let spd = SymMat3([a.0[0] + 4.0, a.0[1] + 4.0, a.0[2] + 4.0, a.0[3], a.0[4], a.0[5]]);
            let (inv, _) = spd.inverse(1e-14).unwrap();
            let (x, y) = (spd.to_rows(), inv.to_rows());
            for i in 0..3 {
                for j in 0..3 {
                    let v: f64 = (0..3).map(|k| x[i][k] * y[k][j]).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((v - want).abs() < 1e-12);
                }
            }
        }
        assert!(SymMat3::ZERO.inverse(1e-14).is_none());
    }

    #[test]
    fn eigenvalues_match_jacobi_and_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let s = random_sym(&mut rng, 5.0);
            let e = s.eigenvalues();
            let j = s.jacobi_eigenvalues();
            for k in 0..3 {
                assert!((e[k] - j[k]).abs() < 1e-11, "{e:?} vs {j:?}");
            }
            assert!((e.iter().sum::<f64>() - s.trace()).abs() < 1e-11);
            assert!((e[0] * e[1] * e[2] - s.det()).abs() < 1e-9 * (1.0 + s.det().abs()));
        }
    }

    #[test]
    fn repeated_eigenvalues() {
        let e = SymMat3::diag(2.0, 2.0, 2.0).eigenvalues();
        assert_eq!(e, [2.0, 2.0, 2.0]);
        // rank-one update of the identity: eigenvalues {1 + 3, 1, 1}
        let v = [1.0, 1.0, 1.0];
        let m = SymMat3(std::array::from_fn(|k| {
            let (i, j) = SYM_PAIRS[k];
            v[i] * v[j] + if i == j { 1.0 } else { 0.0 }
        }));
        let e = m.eigenvalues();
        assert!((e[0] - 4.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14 && (e[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gram_of_identity() {
        let i3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(gram_rows(&i3), SymMat3::IDENTITY);
    }
}
