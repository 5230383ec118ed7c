use super::diff::{line_derivative, FdOrder};
use crate::error::{Error, Result};

/// Running integral of uniformly spaced samples by the composite trapezoid
/// rule: `I[0] = 0`, `I[k] = ∫ from x_0 to x_k`.
pub fn cumulative_integral(samples: &[f64], spacing: f64) -> Result<Vec<f64>> {
    if samples.len() < 2 {
        return Err(Error::Domain(format!("cumulative integral needs at least 2 samples, got {}", samples.len())));
    }
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::Domain(format!("spacing {spacing} is not positive")));
    }
    let mut out = Vec::with_capacity(samples.len());
    let mut acc = 0.0;
    out.push(acc);
    for w in samples.windows(2) {
        acc += 0.5 * spacing * (w[0] + w[1]);
        out.push(acc);
    }
    Ok(out)
}

/// Uniformly sampled 1D profile `values[k] = v(start + k * spacing)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile1D {
    start: f64,
    spacing: f64,
    values: Vec<f64>,
}

impl Profile1D {
    pub fn new(start: f64, spacing: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Domain("profile needs at least 2 samples".into()));
        }
        if !(spacing.is_finite() && spacing > 0.0) || !start.is_finite() {
            return Err(Error::Domain(format!("bad profile axis: start {start}, spacing {spacing}")));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: [k, 0, 0] });
        }
        Ok(Self { start, spacing, values })
    }

    /// Samples `f` on `n` nodes spanning `[lo, hi]`.
    pub fn from_fn(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 || !(hi > lo) {
            return Err(Error::Domain(format!("cannot sample [{lo}, {hi}] with {n} nodes")));
        }
        let h = (hi - lo) / (n - 1) as f64;
        Self::new(lo, h, (0..n).map(|k| f(lo + k as f64 * h)).collect())
    }

    pub fn start(&self) -> f64 {
        self.start
    }
    pub fn spacing(&self) -> f64 {
        self.spacing
    }
    pub fn end(&self) -> f64 {
        self.position(self.values.len() - 1)
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn position(&self, k: usize) -> f64 {
        self.start + k as f64 * self.spacing
    }

    /// Node index whose position equals `x` up to a tiny fraction of the spacing.
    pub fn node_at(&self, x: f64) -> Option<usize> {
        let t = (x - self.start) / self.spacing;
        let k = t.round();
        if (t - k).abs() < 1e-9 && k >= 0.0 && (k as usize) < self.values.len() {
            Some(k as usize)
        } else {
            None
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let slack = 1e-9 * self.spacing;
        x >= self.start - slack && x <= self.end() + slack
    }

    /// Value at `x`: exact at nodes, cubic Lagrange through the four nearest
    /// nodes elsewhere (linear when fewer than four samples exist).
    pub fn sample(&self, x: f64) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::Domain(format!(
                "x = {x} outside profile range [{}, {}]",
                self.start,
                self.end()
            )));
        }
        if let Some(k) = self.node_at(x) {
            return Ok(self.values[k]);
        }
        let n = self.values.len();
        let t = ((x - self.start) / self.spacing).clamp(0.0, (n - 1) as f64);
        if n < 4 {
            let k = (t.floor() as usize).min(n - 2);
            let s = t - k as f64;
            return Ok(self.values[k] * (1.0 - s) + self.values[k + 1] * s);
        }
        let k0 = (t.floor() as usize).saturating_sub(1).min(n - 4);
        let s = t - k0 as f64;
        let mut acc = 0.0;
        for a in 0..4 {
            let mut w = 1.0;
            for b in 0..4 {
                if a != b {
                    w *= (s - b as f64) / (a as f64 - b as f64);
                }
            }
            acc += w * self.values[k0 + a];
        }
        Ok(acc)
    }

    /// Derivative profile on the same nodes, clamped one-sided stencils at the ends.
    pub fn derivative(&self, order: FdOrder) -> Result<Profile1D> {
        let need = match order {
            FdOrder::Second => 3,
            FdOrder::Fourth => 5,
        };
        let n = self.values.len();
        if n < need {
            return Err(Error::Domain(format!("{order:?} derivative needs {need} samples, profile has {n}")));
        }
        let v = &self.values;
        let d = (0..n)
            .map(|c| line_derivative(|k| v[k], c, n, self.spacing, false, order))
            .collect();
        Ok(Self { start: self.start, spacing: self.spacing, values: d })
    }

    pub fn max_abs_diff(&self, other: &Profile1D) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .fold(0.0_f64, |a, (x, y)| a.max((x - y).abs()))
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Profile1D {
        let values = self.values.iter().enumerate().map(|(k, &v)| f(self.position(k), v)).collect();
        Self { start: self.start, spacing: self.spacing, values }
    }
}
