//! Gauss quadrature rules and adaptive panel integration.
//!
//! Nodes and weights come from the Golub-Welsch algorithm: eigenvalues of
//! the symmetric tridiagonal Jacobi matrix of the orthogonal-polynomial
//! recurrence, weights from the first eigenvector components. Rules are
//! cached per order.
//!
//! The adaptive integrator bisects a panel until two half-panel estimates
//! reproduce the whole-panel estimate to the requested tolerance. It is
//! intended for integrands that are piecewise smooth with algebraic kinks
//! at known breakpoints; callers split panels at the breakpoints and the
//! bisection resolves the remaining endpoint behavior.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use once_cell::sync::Lazy;

/// A quadrature rule: nodes and weights on the rule's natural domain.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Eigendecomposition of a symmetric tridiagonal Jacobi matrix with zero
/// diagonal; returns (nodes, first eigenvector components squared).
fn golub_welsch(off_diagonal: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = off_diagonal.len() + 1;
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for (i, &b) in off_diagonal.iter().enumerate() {
        jacobi[(i, i + 1)] = b;
        jacobi[(i + 1, i)] = b;
    }
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| (eig.eigenvalues[j], eig.eigenvectors[(0, j)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

fn legendre_rule(n: usize) -> GaussRule {
    // Off-diagonal b_i = i / sqrt(4 i^2 - 1); total weight 2 on [-1, 1].
    let off: Vec<f64> = (1..n)
        .map(|i| {
            let i = i as f64;
            i / (4.0 * i * i - 1.0).sqrt()
        })
        .collect();
    let (nodes, first_sq) = golub_welsch(&off);
    let weights = first_sq.into_iter().map(|v| 2.0 * v).collect();
    GaussRule { nodes, weights }
}

fn hermite_rule(n: usize) -> GaussRule {
    // Weight function exp(-x^2); off-diagonal sqrt(i/2); total weight sqrt(pi).
    let off: Vec<f64> = (1..n).map(|i| (i as f64 / 2.0).sqrt()).collect();
    let (nodes, first_sq) = golub_welsch(&off);
    let total = std::f64::consts::PI.sqrt();
    let weights = first_sq.into_iter().map(|v| total * v).collect();
    GaussRule { nodes, weights }
}

static LEGENDRE_CACHE: Lazy<Mutex<HashMap<usize, Arc<GaussRule>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));
static HERMITE_CACHE: Lazy<Mutex<HashMap<usize, Arc<GaussRule>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Gauss-Legendre rule of order `n` on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Arc<GaussRule> {
    let mut cache = LEGENDRE_CACHE.lock().unwrap();
    cache
        .entry(n)
        .or_insert_with(|| Arc::new(legendre_rule(n)))
        .clone()
}

/// Gauss-Hermite rule of order `n` for the weight `exp(-x^2)` on the line.
pub fn gauss_hermite(n: usize) -> Arc<GaussRule> {
    let mut cache = HERMITE_CACHE.lock().unwrap();
    cache
        .entry(n)
        .or_insert_with(|| Arc::new(hermite_rule(n)))
        .clone()
}

/// Fixed Gauss-Legendre integral of `f` over `[a, b]`.
pub fn integrate_fixed<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rule: &GaussRule) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(rule.weights.iter()) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Expectation of `f` under the standard normal law via Gauss-Hermite.
pub fn gauss_hermite_expectation<F: FnMut(f64) -> f64>(mut f: F, n: usize) -> f64 {
    let rule = gauss_hermite(n);
    let norm = 1.0 / std::f64::consts::PI.sqrt();
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut acc = 0.0;
    for (&t, &w) in rule.nodes.iter().zip(rule.weights.iter()) {
        acc += w * f(sqrt2 * t);
    }
    acc * norm
}

const ADAPTIVE_MAX_DEPTH: u32 = 44;

/// Panel estimate carrying the largest sampled magnitude, which sets the
/// rounding floor below which refinement is pointless.
fn panel_estimate<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    rule: &GaussRule,
) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    let mut max_abs = 0.0f64;
    for (&x, &w) in rule.nodes.iter().zip(rule.weights.iter()) {
        let v = f(mid + half * x);
        max_abs = max_abs.max(v.abs());
        acc += w * v;
    }
    (acc * half, max_abs)
}

fn adaptive_rec<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    whole: f64,
    tol_per_width: f64,
    rule: &GaussRule,
    depth: u32,
) -> f64 {
    let mid = 0.5 * (a + b);
    let (left, ml) = panel_estimate(&mut *f, a, mid, rule);
    let (right, mr) = panel_estimate(&mut *f, mid, b, rule);
    let refined = left + right;
    let err = (refined - whole).abs();
    let width = b - a;
    // error share proportional to width, with a rounding floor
    let allowance = (tol_per_width * width).max(64.0 * f64::EPSILON * ml.max(mr) * width);
    if err <= allowance || depth >= ADAPTIVE_MAX_DEPTH || mid <= a || mid >= b {
        return refined;
    }
    adaptive_rec(f, a, mid, left, tol_per_width, rule, depth + 1)
        + adaptive_rec(f, mid, b, right, tol_per_width, rule, depth + 1)
}

/// Adaptive Gauss-Legendre integration of `f` over `[a, b]` to absolute
/// tolerance `abs_tol` (error equidistributed per unit width).
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let rule = gauss_legendre(16);
    let (whole, _) = panel_estimate(&mut f, a, b, &rule);
    adaptive_rec(&mut f, a, b, whole, abs_tol / (b - a), &rule, 0)
}

/// Adaptive integration over the panels delimited by `breaks` (sorted).
/// The tolerance is distributed across panels by width.
pub fn integrate_panels<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], abs_tol: f64) -> f64 {
    if breaks.len() < 2 {
        return 0.0;
    }
    let total = breaks[breaks.len() - 1] - breaks[0];
    if total <= 0.0 {
        return 0.0;
    }
    let rule = gauss_legendre(16);
    let tol_per_width = abs_tol / total;
    let mut acc = 0.0;
    for pair in breaks.windows(2) {
        let (whole, _) = panel_estimate(&mut f, pair[0], pair[1], &rule);
        acc += adaptive_rec(&mut f, pair[0], pair[1], whole, tol_per_width, &rule, 0);
    }
    acc
}

/// Sorts, deduplicates (to `tol`) and clips a breakpoint list to `[lo, hi]`,
/// always keeping `lo` and `hi` themselves.
pub fn breakpoints_in(points: &[f64], lo: f64, hi: f64, tol: f64) -> Vec<f64> {
    let mut out = vec![lo, hi];
    out.extend(points.iter().copied().filter(|&p| p > lo + tol && p < hi - tol));
    out.sort_by(|a, b| a.total_cmp(b));
    out.dedup_by(|a, b| (*a - *b).abs() <= tol);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn legendre_exact_on_polynomials() {
        let rule = gauss_legendre(8);
        // degree 15 is exact for an 8-point rule
        let val = integrate_fixed(|x| x.powi(15) + 3.0 * x.powi(4) + 1.0, -1.0, 1.0, &rule);
        assert_abs_diff_eq!(val, 0.0 + 3.0 * 2.0 / 5.0 + 2.0, epsilon = 1e-13);
    }

    #[test]
    fn legendre_weights_sum_to_interval() {
        for n in [4, 16, 32, 64] {
            let rule = gauss_legendre(n);
            let total: f64 = rule.weights.iter().sum();
            assert_abs_diff_eq!(total, 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn hermite_moments() {
        // E[eta^2] = 1, E[eta^4] = 3, E[eta^6] = 15 for a standard normal
        assert_abs_diff_eq!(gauss_hermite_expectation(|x| x * x, 64), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(gauss_hermite_expectation(|x| x.powi(4), 64), 3.0, epsilon = 1e-11);
        assert_abs_diff_eq!(gauss_hermite_expectation(|x| x.powi(6), 64), 15.0, epsilon = 1e-10);
    }

    #[test]
    fn adaptive_handles_kink() {
        // |x - 0.3|^1.6 is C^1 with an algebraic kink
        let val = integrate_adaptive(|x: f64| (x - 0.3).abs().powf(1.6), 0.0, 1.0, 1e-12);
        let exact = (0.3f64.powf(2.6) + 0.7f64.powf(2.6)) / 2.6;
        assert_abs_diff_eq!(val, exact, epsilon = 1e-11);
    }

    #[test]
    fn panels_split_tolerance() {
        let val = integrate_panels(|x: f64| x.abs().sqrt(), &[-1.0, 0.0, 1.0], 1e-10);
        assert_abs_diff_eq!(val, 4.0 / 3.0, epsilon = 1e-9);
    }
}
