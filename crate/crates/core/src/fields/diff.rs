use super::{Axis, Boundary, Grid3, ScalarField};
use crate::error::Result;
use crate::exec;

/// Accuracy order of the first-derivative stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum FdOrder {
    /// 3-point central, 3-point one-sided at clamped ends.
    #[default]
    Second,
    /// 5-point central, 5-point one-sided at the two outermost clamped nodes.
    Fourth,
}

/// First derivative along a line of `n` samples read through `f`, at
/// position `c`. Stencils are written in differences so constant data
/// differentiates to exactly zero.
#[inline]
pub(crate) fn line_derivative(f: impl Fn(usize) -> f64, c: usize, n: usize, h: f64, periodic: bool, order: FdOrder) -> f64 {
    let wrap = |k: isize| -> usize { k.rem_euclid(n as isize) as usize };
    let ci = c as isize;
    match order {
        FdOrder::Second => {
            if periodic || (c > 0 && c + 1 < n) {
                (f(wrap(ci + 1)) - f(wrap(ci - 1))) / (2.0 * h)
            } else if c == 0 {
                let f0 = f(0);
                (4.0 * (f(1) - f0) - (f(2) - f0)) / (2.0 * h)
            } else {
                let f0 = f(n - 1);
                -(4.0 * (f(n - 2) - f0) - (f(n - 3) - f0)) / (2.0 * h)
            }
        }
        FdOrder::Fourth => {
            if periodic || (c >= 2 && c + 2 < n) {
                (8.0 * (f(wrap(ci + 1)) - f(wrap(ci - 1))) - (f(wrap(ci + 2)) - f(wrap(ci - 2)))) / (12.0 * h)
            } else {
                // mirror the right end onto the left-end formulas
                let (at, sign) = if c < 2 { (c, 1.0) } else { (n - 1 - c, -1.0) };
                let g = |k: usize| if sign > 0.0 { f(k) } else { f(n - 1 - k) };
                let d = if at == 0 {
                    let g0 = g(0);
                    48.0 * (g(1) - g0) - 36.0 * (g(2) - g0) + 16.0 * (g(3) - g0) - 3.0 * (g(4) - g0)
                } else {
                    let g1 = g(1);
                    -3.0 * (g(0) - g1) + 18.0 * (g(2) - g1) - 6.0 * (g(3) - g1) + (g(4) - g1)
                };
                sign * d / (12.0 * h)
            }
        }
    }
}

/// Derivative of raw node values at one flat index, no validation.
#[inline]
pub fn derivative_at(grid: &Grid3, values: &[f64], axis: Axis, idx: usize, order: FdOrder) -> f64 {
    let a = axis.index();
    let n = grid.dims()[a];
    let stride = grid.stride(axis);
    let c = grid.coords(idx)[a];
    let base = idx - c * stride;
    line_derivative(
        |k| values[base + k * stride],
        c,
        n,
        grid.spacing()[a],
        grid.boundary()[a] == Boundary::Periodic,
        order,
    )
}

/// `∂f/∂x_axis` with second-order stencils.
pub fn partial_derivative(field: &ScalarField, axis: Axis) -> Result<ScalarField> {
    partial_derivative_with(field, axis, FdOrder::Second)
}

pub fn partial_derivative_with(field: &ScalarField, axis: Axis, order: FdOrder) -> Result<ScalarField> {
    field.check_finite()?;
    let grid = *field.grid();
    let values = field.values();
    let out = exec::collect_indexed(grid.len(), |idx| derivative_at(&grid, values, axis, idx, order));
    Ok(ScalarField::from_vec_unchecked(grid, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use std::f64::consts::PI;

    fn periodic(n: usize) -> Grid3 {
        Grid3::periodic([n, n, 5], [2.0 * PI; 3]).unwrap()
    }

    #[test]
    fn linear_field_is_exact() {
        let g = Grid3::clamped([7, 9, 6], [0.0, -1.0, 0.0], [1.0, 2.0, 1.0]).unwrap();
        let f = ScalarField::from_fn(g, |x| 3.0 * x[1] + 1.0);
        for order in [FdOrder::Second, FdOrder::Fourth] {
            let d = partial_derivative_with(&f, Axis::X2, order).unwrap();
            assert!(d.values().iter().all(|v| (v - 3.0).abs() < 1e-12), "{order:?}");
        }
    }

    #[test]
    fn constant_field_gives_exact_zero() {
        let g = Grid3::clamped([6; 3], [0.0; 3], [1.0; 3]).unwrap();
        let f = ScalarField::constant(g, 0.7123456789);
        for axis in Axis::ALL {
            for order in [FdOrder::Second, FdOrder::Fourth] {
                let d = partial_derivative_with(&f, axis, order).unwrap();
                assert!(d.values().iter().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn sine_on_periodic_grid_is_second_order() {
        // analytic oracle: d/dx sin x = cos x; central error is h^2/6 |sin'''| <= h^2/6
        let err = |n: usize| {
            let g = periodic(n);
            let f = ScalarField::from_fn(g, |x| x[0].sin());
            let d = partial_derivative(&f, Axis::X1).unwrap();
            let exact = ScalarField::from_fn(g, |x| x[0].cos());
            (d.max_abs_diff(&exact), g.spacing()[0])
        };
        let (e1, h1) = err(32);
        let (e2, _) = err(64);
        assert!(e1 <= h1 * h1, "C <= 1 bound violated: {e1}");
        assert!(e1 / e2 > 3.5);
    }

    #[test]
    fn clamped_boundaries_are_second_order() {
        let err = |n: usize, order: FdOrder| {
            let g = Grid3::clamped([n, 5, 5], [0.0; 3], [1.0; 3]).unwrap();
            let f = ScalarField::from_fn(g, |x| (2.0 * x[0]).exp());
            let d = partial_derivative_with(&f, Axis::X1, order).unwrap();
            let exact = ScalarField::from_fn(g, |x| 2.0 * (2.0 * x[0]).exp());
            d.max_abs_diff(&exact)
        };
        assert!(err(33, FdOrder::Second) / err(65, FdOrder::Second) > 3.5);
        assert!(err(33, FdOrder::Fourth) / err(65, FdOrder::Fourth) > 14.0);
    }

    #[test]
    fn mixed_partials_commute() {
        let err = |n: usize| {
            let g = periodic(n);
            let f = ScalarField::from_fn(g, |x| x[0].sin() * x[1].sin());
            let d12 = partial_derivative(&partial_derivative(&f, Axis::X2).unwrap(), Axis::X1).unwrap();
            let d21 = partial_derivative(&partial_derivative(&f, Axis::X1).unwrap(), Axis::X2).unwrap();
            let exact = ScalarField::from_fn(g, |x| x[0].cos() * x[1].cos());
            (d12.max_abs_diff(&d21), d12.max_abs_diff(&exact), g.spacing()[0])
        };
        let (commute, e, h) = err(32);
        assert!(commute < 1e-13);
        assert!(e <= h * h);
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let g = Grid3::clamped([5; 3], [0.0; 3], [1.0; 3]).unwrap();
        let mut v = vec![1.0; g.len()];
        v[g.index([4, 0, 2])] = f64::NAN;
        let f = ScalarField::new(g, v).unwrap();
        assert_eq!(partial_derivative(&f, Axis::X1), Err(Error::NonFinite { index: [4, 0, 2] }));
    }
}
