//! Compactly supported step test functions and their cross-correlations.
//!
//! All double integrals of difference kernels against a pair of test
//! functions collapse to one-dimensional integrals against the
//! cross-correlation `w(z) = int g(y + z) gt(y) dy`. For step functions
//! `w` is continuous piecewise linear with knots at differences of
//! breakpoints, and it is represented exactly here: knot values are
//! computed in closed form and the function is linear in between.

use crate::error::{Error, Result};

/// Right-continuous step function with compact support: value `levels[i]`
/// on `[breaks[i], breaks[i+1])`, zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breaks: Vec<f64>,
    levels: Vec<f64>,
}

impl StepFunction {
    pub fn new(breaks: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        if breaks.len() < 2 || levels.len() != breaks.len() - 1 {
            return Err(Error::Domain(format!(
                "step function needs n+1 breakpoints for n levels, got {} and {}",
                breaks.len(),
                levels.len()
            )));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("breakpoints must be strictly increasing".into()));
        }
        if breaks.iter().chain(levels.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Domain("breakpoints and levels must be finite".into()));
        }
        Ok(Self { breaks, levels })
    }

    /// Indicator of `[a, b)`.
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a, b], vec![1.0])
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x < self.breaks[0] || x >= *self.breaks.last().unwrap() {
            return 0.0;
        }
        // strictly increasing breaks: partition_point finds the cell
        let idx = self.breaks.partition_point(|&b| b <= x) - 1;
        self.levels[idx.min(self.levels.len() - 1)]
    }

    /// Support interval `[first breakpoint, last breakpoint)`.
    pub fn support(&self) -> (f64, f64) {
        (self.breaks[0], *self.breaks.last().unwrap())
    }

    pub fn integral(&self) -> f64 {
        self.breaks
            .windows(2)
            .zip(self.levels.iter())
            .map(|(w, &l)| l * (w[1] - w[0]))
            .sum()
    }

    /// Cross-correlation `w(z) = int self(y + z) other(y) dy`, exact.
    pub fn cross_correlation(&self, other: &StepFunction) -> PiecewiseLinear {
        let mut knots: Vec<f64> = Vec::new();
        for &a in &self.breaks {
            for &c in &other.breaks {
                knots.push(a - c);
            }
        }
        knots.sort_by(|x, y| x.total_cmp(y));
        knots.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * a.abs().max(1.0));
        let values: Vec<f64> = knots.iter().map(|&z| self.overlap(other, z)).collect();
        PiecewiseLinear { knots, values }
    }

    /// Autocorrelation of the function with itself (even in `z`).
    pub fn autocorrelation(&self) -> PiecewiseLinear {
        self.cross_correlation(self)
    }

    fn overlap(&self, other: &StepFunction, z: f64) -> f64 {
        let mut acc = 0.0;
        for (i, &li) in self.levels.iter().enumerate() {
            if li == 0.0 {
                continue;
            }
            let (a0, a1) = (self.breaks[i] - z, self.breaks[i + 1] - z);
            for (j, &mj) in other.levels.iter().enumerate() {
                if mj == 0.0 {
                    continue;
                }
                let lo = a0.max(other.breaks[j]);
                let hi = a1.min(other.breaks[j + 1]);
                if hi > lo {
                    acc += li * mj * (hi - lo);
                }
            }
        }
        acc
    }
}

/// Continuous piecewise-linear function, zero outside its knot range.
#[derive(Debug, Clone)]
pub struct PiecewiseLinear {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn range(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    pub fn eval(&self, z: f64) -> f64 {
        let n = self.knots.len();
        if z <= self.knots[0] || z >= self.knots[n - 1] {
            // values at the extreme knots are zero for correlations of
            // compactly supported functions
            if z == self.knots[0] {
                return self.values[0];
            }
            if z == self.knots[n - 1] {
                return self.values[n - 1];
            }
            return 0.0;
        }
        let hi = self.knots.partition_point(|&k| k < z).min(n - 1);
        let lo = hi - 1;
        let t = (z - self.knots[lo]) / (self.knots[hi] - self.knots[lo]);
        self.values[lo] * (1.0 - t) + self.values[hi] * t
    }

    pub fn integral(&self) -> f64 {
        self.knots
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(k, v)| 0.5 * (v[0] + v[1]) * (k[1] - k[0]))
            .sum()
    }

    /// Exact integral of `|z|^{expo - 1} w(z)` over the line for
    /// `0 < expo < 1`: the kernel has an integrable singularity at zero and
    /// the integral is elementary on each linear piece.
    pub fn power_weight_integral(&self, expo: f64) -> f64 {
        assert!(expo > 0.0 && expo < 1.0, "exponent must lie in (0, 1)");
        let mut acc = 0.0;
        for i in 0..self.knots.len() - 1 {
            let (z0, z1) = (self.knots[i], self.knots[i + 1]);
            let (v0, v1) = (self.values[i], self.values[i + 1]);
            if z1 <= 0.0 {
                // mirror onto the positive axis: t = -z runs over [-z1, -z0]
                acc += piece_integral(-z1, -z0, v1, v0, expo);
            } else if z0 >= 0.0 {
                acc += piece_integral(z0, z1, v0, v1, expo);
            } else {
                let vmid = v0 + (v1 - v0) * (0.0 - z0) / (z1 - z0);
                acc += piece_integral(0.0, -z0, vmid, v0, expo);
                acc += piece_integral(0.0, z1, vmid, v1, expo);
            }
        }
        acc
    }
}

/// Integral of `t^{expo-1} (a + b t)` over `[t0, t1] subset [0, inf)` where
/// the linear part interpolates `(t0, v0) -> (t1, v1)`.
fn piece_integral(t0: f64, t1: f64, v0: f64, v1: f64, expo: f64) -> f64 {
    if t1 <= t0 {
        return 0.0;
    }
    let slope = (v1 - v0) / (t1 - t0);
    let a = v0 - slope * t0;
    let b = slope;
    let p0 = t0.powf(expo);
    let p1 = t1.powf(expo);
    a * (p1 - p0) / expo + b * (t1 * p1 - t0 * p0) / (expo + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn indicator_basics() {
        let g = StepFunction::indicator(0.0, 1.0).unwrap();
        assert_eq!(g.eval(-0.1), 0.0);
        assert_eq!(g.eval(0.0), 1.0);
        assert_eq!(g.eval(0.999), 1.0);
        assert_eq!(g.eval(1.0), 0.0);
        assert_abs_diff_eq!(g.integral(), 1.0);
    }

    #[test]
    fn invalid_step_functions_rejected() {
        assert!(StepFunction::new(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(StepFunction::new(vec![0.0, 1.0], vec![]).is_err());
    }

    #[test]
    fn unit_indicator_autocorrelation_is_a_triangle() {
        let g = StepFunction::indicator(0.0, 1.0).unwrap();
        let w = g.autocorrelation();
        assert_abs_diff_eq!(w.eval(0.0), 1.0);
        assert_abs_diff_eq!(w.eval(0.5), 0.5);
        assert_abs_diff_eq!(w.eval(-0.5), 0.5);
        assert_abs_diff_eq!(w.eval(1.0), 0.0);
        assert_abs_diff_eq!(w.integral(), 1.0);
    }

    #[test]
    fn disjoint_supports_have_shifted_correlation() {
        let g = StepFunction::indicator(0.0, 1.0).unwrap();
        let gt = StepFunction::indicator(2.0, 3.0).unwrap();
        // w(z) = int g(y+z) gt(y) dy is supported on z in [-3, -1]
        let w = g.cross_correlation(&gt);
        assert_abs_diff_eq!(w.eval(-2.0), 1.0);
        assert_abs_diff_eq!(w.eval(0.0), 0.0);
        assert_abs_diff_eq!(w.eval(-1.0), 0.0);
    }

    #[test]
    fn two_level_step_correlation_matches_direct_quadrature() {
        let g = StepFunction::new(vec![0.0, 0.5, 1.25], vec![2.0, -1.0]).unwrap();
        let gt = StepFunction::new(vec![0.25, 1.0], vec![0.5]).unwrap();
        let w = g.cross_correlation(&gt);
        for &z in &[-1.0, -0.2, 0.0, 0.3, 0.77, 1.0] {
            let direct = crate::quad::integrate_adaptive(
                |y| g.eval(y + z) * gt.eval(y),
                0.25,
                1.0,
                1e-12,
            );
            assert_abs_diff_eq!(w.eval(z), direct, epsilon = 1e-9);
        }
    }

    #[test]
    fn power_weight_integral_of_triangle() {
        // int |z|^{d-1} (1 - |z|) dz over [-1, 1] = 2 (1/d - 1/(d+1))
        let g = StepFunction::indicator(0.0, 1.0).unwrap();
        let w = g.autocorrelation();
        for &d in &[0.2, 0.5, 0.9] {
            let exact = 2.0 * (1.0 / d - 1.0 / (d + 1.0));
            assert_abs_diff_eq!(w.power_weight_integral(d), exact, epsilon = 1e-13);
        }
    }

    proptest! {
        #[test]
        fn correlation_integral_factorizes(a in -1.0f64..1.0, len1 in 0.1f64..2.0, len2 in 0.1f64..2.0) {
            // int w = (int g)(int gt)
            let g = StepFunction::indicator(a, a + len1).unwrap();
            let gt = StepFunction::indicator(0.0, len2).unwrap();
            let w = g.cross_correlation(&gt);
            prop_assert!((w.integral() - len1 * len2).abs() < 1e-10);
        }

        #[test]
        fn autocorrelation_is_even(a in -1.0f64..1.0, len in 0.1f64..2.0, z in -3.0f64..3.0) {
            let g = StepFunction::indicator(a, a + len).unwrap();
            let w = g.autocorrelation();
            prop_assert!((w.eval(z) - w.eval(-z)).abs() < 1e-12);
        }
    }
}
