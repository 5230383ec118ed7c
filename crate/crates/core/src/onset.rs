//! Transition onset for plane Couette flow between plates at `x3 = ±1`.
//!
//! Transition is signalled by the middle eigenvalue of the Couette
//! curvature matrix changing sign, which happens at
//! `γ² u1′² = p0² + p0 u1²` with `γ = 1/Re`. Dropping `p0²` gives the
//! marginal profile `u1 = exp(a(x3 − 1))` with `a = √p0 / γ`.

use crate::continuum_map::shear_eigenvalues;
use crate::error::{Error, Result};
use crate::exec;
use crate::fields::Profile1D;

/// Reynolds number of the oil data the default anchor is read from.
pub const DEFAULT_REYNOLDS: f64 = 2900.0;
/// Default fit anchor `u1(0.8) = 0.4`.
pub const DEFAULT_ANCHOR: ProfileSample = ProfileSample { x3: 0.8, u1: 0.4 };
/// Bisection iterations used to locate sign changes in γ.
pub const BISECTION_ITERATIONS: usize = 50;
/// Significant figures kept for `√p0` in the two-step rounded fit.
pub const ROUNDING_DIGITS: usize = 3;

/// One point of a measured velocity profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub x3: f64,
    pub u1: f64,
}

impl ProfileSample {
    pub fn new(x3: f64, u1: f64) -> Result<Self> {
        if !(x3.abs() <= 1.0 && u1.is_finite()) {
            return Err(Error::Domain(format!("profile sample ({x3}, {u1}) must have |x3| <= 1")));
        }
        Ok(Self { x3, u1 })
    }
}

/// Parameters of the marginal exponential profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileFit {
    /// Profile exponent.
    pub a: f64,
    /// End pressure.
    pub p0: f64,
    pub reynolds: f64,
    /// Plate speed; data are normalised so this is 1.
    pub v: f64,
}

impl ProfileFit {
    /// Fit with exponent `a` at Reynolds number `reynolds`: `p0 = (a/Re)²`.
    pub fn from_exponent(a: f64, reynolds: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0 && reynolds.is_finite() && reynolds > 0.0) {
            return Err(Error::Domain(format!("need a > 0 and Re > 0, got a = {a}, Re = {reynolds}")));
        }
        let s = a / reynolds;
        Ok(Self { a, p0: s * s, reynolds, v: 1.0 })
    }

    pub fn gamma(&self) -> f64 {
        1.0 / self.reynolds
    }
}

/// Both fits emitted by [`fit_profile`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReport {
    pub exact: ProfileFit,
    /// `√p0` rounded to [`ROUNDING_DIGITS`] significant figures, then
    /// multiplied by `Re`.
    pub two_step: ProfileFit,
    pub sqrt_p0_exact: f64,
    pub sqrt_p0_rounded: f64,
}

/// Rounds to `digits` significant figures by decimal formatting, so the
/// result is the double nearest the correctly rounded decimal.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .expect("formatted float parses")
}

/// Fits the exponential profile through `anchor`.
pub fn fit_profile(anchor: ProfileSample, reynolds: f64) -> Result<FitReport> {
    if !(reynolds.is_finite() && reynolds > 0.0) {
        return Err(Error::Domain(format!("Reynolds number must be positive, got {reynolds}")));
    }
    if anchor.x3 == 1.0 {
        return Err(Error::DegenerateFit("anchor lies on the plate x3 = 1".into()));
    }
    if !(anchor.x3 > 0.0 && anchor.x3 < 1.0) {
        return Err(Error::Domain(format!("anchor x3 = {} must lie in (0, 1)", anchor.x3)));
    }
    if !(anchor.u1 > 0.0 && anchor.u1 < 1.0) {
        return Err(Error::Domain(format!("anchor u1 = {} must lie in (0, 1)", anchor.u1)));
    }
    let a = anchor.u1.ln() / (anchor.x3 - 1.0);
    let exact = ProfileFit::from_exponent(a, reynolds)?;
    let sqrt_p0_exact = a / reynolds;
    let sqrt_p0_rounded = round_significant(sqrt_p0_exact, ROUNDING_DIGITS);
    let two_step = ProfileFit {
        a: sqrt_p0_rounded * reynolds,
        p0: sqrt_p0_rounded * sqrt_p0_rounded,
        reynolds,
        v: 1.0,
    };
    Ok(FitReport { exact, two_step, sqrt_p0_exact, sqrt_p0_rounded })
}

/// `exp(a(x3 − 1))` for `x3 ≥ 0`, extended as an odd function. The sign
/// bit decides the branch, so `−0.0` maps to `−exp(−a)`.
pub fn critical_profile_eval(fit: &ProfileFit, x3: f64) -> Result<f64> {
    if !(x3.abs() <= 1.0) {
        return Err(Error::Domain(format!("x3 = {x3} outside [-1, 1]")));
    }
    let v = (fit.a * (x3.abs() - 1.0)).exp();
    Ok(if x3.is_sign_negative() { -v } else { v })
}

/// `√(p0² + p0 u1²) / |u1′|`; infinite when `u1′ = 0`, meaning the point
/// never destabilises under this criterion.
pub fn critical_gamma(p0: f64, u1: f64, u1p: f64) -> Result<f64> {
    if !(p0.is_finite() && p0 > 0.0 && u1.is_finite() && u1p.is_finite()) {
        return Err(Error::Domain(format!("need p0 > 0 and finite inputs, got p0 = {p0}, u1 = {u1}, u1' = {u1p}")));
    }
    if u1p == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((p0 * (p0 + u1 * u1)).sqrt() / u1p.abs())
}

/// Locates the sign change of `λ2(γ)` in `[lo, hi]` by bisection on the
/// eigenvalue path. `None` when `λ2` has the same sign at both ends.
pub fn bisect_gamma(u1: f64, u1p: f64, p0: f64, lo: f64, hi: f64, iterations: usize) -> Option<f64> {
    let l2 = |g: f64| shear_eigenvalues(u1, u1p, p0, g).1;
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (l2(a), l2(b));
    if !(fa.is_finite() && fb.is_finite()) || (fa > 0.0) == (fb > 0.0) {
        return None;
    }
    let positive_at_a = fa > 0.0;
    for _ in 0..iterations {
        let m = 0.5 * (a + b);
        if (l2(m) > 0.0) == positive_at_a {
            a = m;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Full-relation profile and its distance from the exponential one.
#[derive(Debug, Clone, PartialEq)]
pub struct FullProfile {
    pub profile: Profile1D,
    /// `max |u1 − exp(a(x3 − 1))|` with `a = √p0 / γ`.
    pub max_deviation: f64,
}

/// Integrates `u1′ = √(p0² + p0 u1²) / γ` backward from `u1(1) = 1` by RK4
/// on `nodes` uniform points of `[lo, 1]`, `0 ≤ lo < 1`.
pub fn solve_full_profile(p0: f64, gamma: f64, lo: f64, nodes: usize) -> Result<FullProfile> {
    if !(p0.is_finite() && p0 > 0.0 && gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Domain(format!("need p0 > 0 and gamma > 0, got {p0}, {gamma}")));
    }
    if !(0.0..1.0).contains(&lo) || nodes < 2 {
        return Err(Error::Domain(format!("need 0 <= lo < 1 and at least 2 nodes, got lo = {lo}, {nodes} nodes")));
    }
    let h = (1.0 - lo) / (nodes - 1) as f64;
    let rhs = |u: f64| (p0 * (p0 + u * u)).sqrt() / gamma;
    let mut values = vec![0.0; nodes];
    values[nodes - 1] = 1.0;
    let mut u = 1.0;
    for k in (0..nodes - 1).rev() {
        let s = -h;
        let k1 = rhs(u);
        let k2 = rhs(u + 0.5 * s * k1);
        let k3 = rhs(u + 0.5 * s * k2);
        let k4 = rhs(u + s * k3);
        let next = u + s / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !next.is_finite() {
            return Err(Error::Integrator { x: lo + (k + 1) as f64 * h, value: u });
        }
        u = next;
        values[k] = u;
    }
    let profile = Profile1D::new(lo, h, values)?;
    let a = p0.sqrt() / gamma;
    let max_deviation = profile
        .values()
        .iter()
        .enumerate()
        .fold(0.0_f64, |m, (k, v)| m.max((v - (a * (profile.position(k) - 1.0)).exp()).abs()));
    Ok(FullProfile { profile, max_deviation })
}

/// Bisection result at one profile sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub x3: f64,
    pub u1: f64,
    pub u1p: f64,
    /// `None` when `λ2` does not change sign within the scanned γ range.
    pub gamma_crit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionScan {
    pub points: Vec<ScanPoint>,
    /// Smallest located critical γ and its `x3`.
    pub min: Option<(f64, f64)>,
    /// Largest located critical γ and its `x3`.
    pub max: Option<(f64, f64)>,
    pub out_of_range: usize,
}

/// Bisects `λ2` in γ over `gamma_range` at every profile node. `u1p`
/// defaults to the fourth-order derivative of `profile`.
pub fn transition_scan(
    profile: &Profile1D,
    u1p: Option<&Profile1D>,
    p0: f64,
    gamma_range: (f64, f64),
    iterations: usize,
) -> Result<TransitionScan> {
    let (lo, hi) = gamma_range;
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
        return Err(Error::Config(format!("gamma range [{lo}, {hi}] must satisfy 0 <= lo < hi")));
    }
    if !(p0.is_finite() && p0 > 0.0) {
        return Err(Error::Domain(format!("p0 must be positive, got {p0}")));
    }
    let computed;
    let derivative = match u1p {
        Some(d) => {
            if d.len() != profile.len() {
                return Err(Error::Config("derivative profile length differs from the velocity profile".into()));
            }
            d
        }
        None => {
            computed = profile.derivative(crate::fields::FdOrder::Fourth)?;
            &computed
        }
    };
    let points = exec::collect_indexed(profile.len(), |k| {
        let (u, d) = (profile.values()[k], derivative.values()[k]);
        let gamma_crit = if d == 0.0 { None } else { bisect_gamma(u, d, p0, lo, hi, iterations) };
        ScanPoint { x3: profile.position(k), u1: u, u1p: d, gamma_crit }
    });
    let located = || points.iter().filter_map(|p| p.gamma_crit.map(|g| (g, p.x3)));
    let min = located().fold(None, |acc: Option<(f64, f64)>, c| match acc {
        Some(m) if m.0 <= c.0 => Some(m),
        _ => Some(c),
    });
    let max = located().fold(None, |acc: Option<(f64, f64)>, c| match acc {
        Some(m) if m.0 >= c.0 => Some(m),
        _ => Some(c),
    });
    let out_of_range = points.iter().filter(|p| p.gamma_crit.is_none()).count();
    Ok(TransitionScan { points, min, max, out_of_range })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_fit() {
        let r = fit_profile(DEFAULT_ANCHOR, DEFAULT_REYNOLDS).unwrap();
        assert!((r.exact.a - 4.581453659370776).abs() < 1e-12);
        assert!((r.sqrt_p0_exact - 1.579811606679578e-3).abs() < 1e-15);
        assert!((r.exact.p0 - 2.4958e-6).abs() < 1e-10);
        assert_eq!(r.sqrt_p0_rounded, 0.00158);
        let u = critical_profile_eval(&r.exact, 0.8).unwrap();
        assert!((u - 0.4).abs() < 1e-12);
    }

    #[test]
    fn fit_of_unit_exponent() {
        let r = fit_profile(ProfileSample::new(0.5, (-1.0f64).exp()).unwrap(), 10.0).unwrap();
        assert!((r.exact.a - 2.0).abs() < 1e-15);
        assert!((r.exact.p0 - 0.04).abs() < 1e-15);
    }

    #[test]
    fn fit_rejections() {
        assert!(matches!(fit_profile(ProfileSample { x3: 1.0, u1: 0.5 }, 2900.0), Err(Error::DegenerateFit(_))));
        for u1 in [0.0, 1.0, -0.2, 1.5] {
            assert!(matches!(fit_profile(ProfileSample { x3: 0.5, u1 }, 2900.0), Err(Error::Domain(_))));
        }
        assert!(fit_profile(DEFAULT_ANCHOR, 0.0).is_err());
        assert!(ProfileSample::new(1.5, 0.1).is_err());
    }

    #[test]
    fn rounding_helper() {
        assert_eq!(round_significant(0.0015798, 3), 0.00158);
        assert_eq!(round_significant(0.0015850001, 3), 0.00159);
        assert_eq!(round_significant(-123.456, 2), -120.0);
    }

    #[test]
    fn profile_endpoints_and_domain() {
        let fit = ProfileFit::from_exponent(4.611, 2900.0).unwrap();
        assert_eq!(critical_profile_eval(&fit, 1.0).unwrap(), 1.0);
        assert_eq!(critical_profile_eval(&fit, -1.0).unwrap(), -1.0);
        assert_eq!(critical_profile_eval(&fit, 0.0).unwrap(), (-4.611f64).exp());
        assert_eq!(critical_profile_eval(&fit, -0.0).unwrap(), -(-4.611f64).exp());
        assert!(matches!(critical_profile_eval(&fit, 1.0000001), Err(Error::Domain(_))));
        assert!(critical_profile_eval(&fit, f64::NAN).is_err());
    }

    #[test]
    fn critical_gamma_examples() {
        assert!((critical_gamma(1.0, 1.0, 2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        let b = bisect_gamma(1.0, 2.0, 1.0, 0.0, 10.0, 60).unwrap();
        assert!((b - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(critical_gamma(0.3, 0.0, -2.0).unwrap(), 0.15);
        assert_eq!(critical_gamma(0.3, 1.0, 0.0).unwrap(), f64::INFINITY);
        assert!(critical_gamma(0.0, 1.0, 1.0).is_err());
        // leading-order small-p0 behaviour
        let p0 = 1e-12;
        let g = critical_gamma(p0, 0.5, 2.0).unwrap();
        assert!((g / (p0.sqrt() * 0.5 / 2.0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn full_profile_near_exponential() {
        let fp = solve_full_profile(0.00159f64.powi(2), 1.0 / 2900.0, 0.0, 2001).unwrap();
        assert_eq!(*fp.profile.values().last().unwrap(), 1.0);
        assert!(fp.max_deviation < 1e-3, "{}", fp.max_deviation);
        assert!(solve_full_profile(-1.0, 1.0, 0.0, 10).is_err());
    }

    #[test]
    fn full_profile_deviation_is_first_order_in_p0() {
        let a = 3.0;
        let dev = |p0: f64| solve_full_profile(p0, p0.sqrt() / a, 0.0, 4001).unwrap().max_deviation;
        let (d1, d2) = (dev(1e-4), dev(1e-5));
        assert!((d1 / d2 - 10.0).abs() < 0.5, "{d1} {d2}");
    }

    #[test]
    fn laminar_scan_peaks_at_plates() {
        let p0 = 0.00159f64.powi(2);
        let profile = Profile1D::from_fn(-1.0, 1.0, 41, |x| x).unwrap();
        let scan = transition_scan(&profile, None, p0, (0.0, 1.0), BISECTION_ITERATIONS).unwrap();
        assert_eq!(scan.out_of_range, 0);
        for p in &scan.points {
            let want = (p0 * p0 + p0 * p.x3 * p.x3).sqrt();
            assert!((p.gamma_crit.unwrap() - want).abs() < 1e-12);
        }
        let (gmax, xmax) = scan.max.unwrap();
        assert_eq!(xmax.abs(), 1.0);
        assert!((gmax - (p0 * p0 + p0).sqrt()).abs() < 1e-12);
        assert_eq!(scan.min.unwrap().1, 0.0);
    }

    #[test]
    fn flat_points_are_out_of_range() {
        let profile = Profile1D::from_fn(-1.0, 1.0, 9, |_| 0.5).unwrap();
        let scan = transition_scan(&profile, None, 0.01, (0.0, 1.0), 50).unwrap();
        assert_eq!(scan.out_of_range, 9);
        assert!(scan.min.is_none());
    }

    #[test]
    fn marginal_profile_scan() {
        // the exponential profile is marginal only with p0² dropped, so the
        // located γ is γ √(1 + p0/u1²) rather than γ itself
        let fit = ProfileFit::from_exponent(4.611, 2900.0).unwrap();
        let gamma = fit.gamma();
        let n = 101;
        let x = Profile1D::from_fn(0.0, 1.0, n, |x| x).unwrap();
        let u = x.map(|x, _| critical_profile_eval(&fit, x).unwrap());
        let du = u.map(|_, v| fit.a * v);
        let scan = transition_scan(&u, Some(&du), fit.p0, (0.0, 1e-2), 60).unwrap();
        let mut worst_rel = 0.0_f64;
        for p in &scan.points {
            let g = p.gamma_crit.unwrap();
            let want = gamma * (1.0 + fit.p0 / (p.u1 * p.u1)).sqrt();
            assert!((g - want).abs() < 1e-15, "{g} {want}");
            worst_rel = worst_rel.max((g - gamma).abs() / gamma);
        }
        assert!(worst_rel < 0.03);
    }

    proptest! {
        #[test]
        fn bisection_agrees_with_formula(u1 in -2.0f64..2.0, u1p in 0.05f64..3.0, p0 in 0.01f64..2.0, flip: bool) {
            let d = if flip { -u1p } else { u1p };
            let want = critical_gamma(p0, u1, d).unwrap();
            let mut hi = 1.0;
            while shear_eigenvalues(u1, d, p0, hi).1 > 0.0 { hi *= 2.0; }
            let got = bisect_gamma(u1, d, p0, 0.0, hi, 60).unwrap();
            prop_assert!((got - want).abs() < 1e-10 * want.max(1.0));
        }

        #[test]
        fn profile_is_odd(x in -1.0f64..=1.0, a in 0.1f64..10.0) {
            let fit = ProfileFit::from_exponent(a, 2900.0).unwrap();
            prop_assert_eq!(critical_profile_eval(&fit, -x).unwrap(), -critical_profile_eval(&fit, x).unwrap());
        }

        #[test]
        fn fit_reproduces_anchor(x3 in 0.01f64..0.99, u1 in 0.01f64..0.99, re in 10.0f64..1e5) {
            let r = fit_profile(ProfileSample::new(x3, u1).unwrap(), re).unwrap();
            prop_assert!((critical_profile_eval(&r.exact, x3).unwrap() - u1).abs() <= 1e-12);
            prop_assert!((r.exact.p0.sqrt() * re - r.exact.a).abs() <= 4.0 * f64::EPSILON * r.exact.a);
        }
    }
}
