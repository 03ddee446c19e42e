//! Hermite polynomials, Gaussian moments and Wick powers.
//!
//! The Wick power of a mean-zero Gaussian variable `X` with variance `v` is
//! the centered polynomial
//!
//! ```text
//! :X^k: = sum_{j=0}^{floor(k/2)} (-1)^j C(k, 2j) E(X^{2j}) X^{k-2j},
//! ```
//!
//! equivalently `sqrt(k!) v^{k/2} H_k(X / sqrt(v))` in the orthonormal
//! Hermite basis. Wick powers are homogeneous of degree `k` and their
//! cross moments collapse: `E(:X^k: :Y^j:) = k! (E XY)^k` when `j = k`
//! and `0` otherwise. That collapse is the engine behind every
//! second-moment formula in the chaos layer.
//!
//! Coefficients are assembled in exact integer arithmetic before the
//! conversion to floating point; the alternating sum is otherwise prone
//! to cancellation. Orders are capped at 20, past which double precision
//! loses the cancellation battle anyway.

use crate::error::{Error, Result};

/// Largest supported Wick order.
pub const MAX_ORDER: u32 = 20;

/// Orthonormal Hermite polynomial `H_k` with `E[H_j(eta) H_k(eta)] = delta_{jk}`
/// under the standard normal law, by the stable normalized three-term
/// recurrence.
pub fn hermite_orthonormal(k: u32, x: f64) -> f64 {
    let mut prev = 1.0; // H_0
    if k == 0 {
        return prev;
    }
    let mut cur = x; // H_1
    for j in 1..k {
        let jf = j as f64;
        let next = (x * cur - jf.sqrt() * prev) / (jf + 1.0).sqrt();
        prev = cur;
        cur = next;
    }
    cur
}

/// Even Gaussian moment `E X^{2j} = (2j - 1)!! v^j` for `X ~ N(0, v)`.
pub fn gaussian_even_moment(two_j: u32, variance: f64) -> Result<f64> {
    if two_j % 2 != 0 {
        return Err(Error::Domain(format!("even moment order must be even, got {two_j}")));
    }
    if variance < 0.0 {
        return Err(Error::Domain(format!("variance must be nonnegative, got {variance}")));
    }
    let j = two_j / 2;
    let mut acc = 1.0;
    for i in 0..j {
        acc *= (2 * i + 1) as f64;
    }
    Ok(acc * variance.powi(j as i32))
}

/// Integer coefficient `k! / (2^j j! (k - 2j)!)`, the combinatorial part
/// `C(k, 2j) (2j - 1)!!` of the Wick expansion. Exact in u128 for k <= 20.
fn wick_integer_coefficient(k: u32, j: u32) -> u128 {
    let mut num: u128 = 1;
    for i in 1..=k as u128 {
        num *= i;
    }
    let mut den: u128 = 1;
    for i in 1..=j as u128 {
        den *= 2 * i; // 2^j j!
    }
    for i in 1..=(k - 2 * j) as u128 {
        den *= i;
    }
    debug_assert_eq!(num % den, 0);
    num / den
}

/// Precomputed Wick polynomial of a fixed order and variance.
#[derive(Debug, Clone)]
pub struct WickContext {
    k: u32,
    variance: f64,
    /// coefficient of x^{k - 2j} including the sign and the moment factor
    coeffs: Vec<f64>,
}

impl WickContext {
    /// `variance = 0` is allowed and degenerates to the plain power `x^k`.
    pub fn new(k: u32, variance: f64) -> Result<Self> {
        if k > MAX_ORDER {
            return Err(Error::OrderTooLarge { k, max: MAX_ORDER });
        }
        if variance < 0.0 {
            return Err(Error::Domain(format!("variance must be nonnegative, got {variance}")));
        }
        let mut coeffs = Vec::with_capacity((k / 2 + 1) as usize);
        for j in 0..=k / 2 {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let c = wick_integer_coefficient(k, j) as f64;
            coeffs.push(sign * c * variance.powi(j as i32));
        }
        Ok(Self { k, variance, coeffs })
    }

    pub fn order(&self) -> u32 {
        self.k
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Evaluates `:x^k:` by Horner recursion in `x^2`.
    pub fn eval(&self, x: f64) -> f64 {
        let x2 = x * x;
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x2 + c;
        }
        if self.k % 2 == 1 {
            acc * x
        } else {
            acc
        }
    }
}

/// One-shot Wick power `:x^k:` for `X ~ N(0, variance)`.
pub fn wick_power(k: u32, x: f64, variance: f64) -> Result<f64> {
    Ok(WickContext::new(k, variance)?.eval(x))
}

/// Hermite form `sqrt(k!) v^{k/2} H_k(x / sqrt(v))`; agrees with
/// [`wick_power`] and serves as its algebraic cross-check.
pub fn wick_power_hermite_form(k: u32, x: f64, variance: f64) -> Result<f64> {
    if k > MAX_ORDER {
        return Err(Error::OrderTooLarge { k, max: MAX_ORDER });
    }
    if variance < 0.0 {
        return Err(Error::Domain("variance must be nonnegative".into()));
    }
    if variance == 0.0 {
        return Ok(x.powi(k as i32));
    }
    let sigma = variance.sqrt();
    let mut sqrt_fact = 1.0;
    for i in 1..=k {
        sqrt_fact *= (i as f64).sqrt();
    }
    Ok(sqrt_fact * sigma.powi(k as i32) * hermite_orthonormal(k, x / sigma))
}

/// Cross moment `E(:X^k: :Y^j:) = k! r^k delta_{kj}` for a jointly Gaussian
/// pair with covariance `r = E(XY)`.
pub fn wick_cross_moment(k: u32, j: u32, covariance: f64) -> f64 {
    if k != j {
        return 0.0;
    }
    let mut fact = 1.0;
    for i in 1..=k {
        fact *= i as f64;
    }
    fact * covariance.powi(k as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::gauss_hermite_expectation;
    use crate::rng::substream;
    use crate::stats::RunningStat;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn hermite_low_orders() {
        assert_eq!(hermite_orthonormal(0, 0.37), 1.0);
        assert_eq!(hermite_orthonormal(1, 0.37), 0.37);
        // H_2(x) = (x^2 - 1) / sqrt(2), root at 1
        assert_abs_diff_eq!(hermite_orthonormal(2, 1.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            hermite_orthonormal(2, 2.0),
            3.0 / 2f64.sqrt(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn hermite_three_normalized_by_quadrature() {
        // E[H_3(eta)^2] = 1 with a 64-point rule
        let val = gauss_hermite_expectation(|x| hermite_orthonormal(3, x).powi(2), 64);
        assert!((val - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hermite_orthonormality_matrix() {
        for j in 0..=8u32 {
            for k in 0..=8u32 {
                let val = gauss_hermite_expectation(
                    |x| hermite_orthonormal(j, x) * hermite_orthonormal(k, x),
                    64,
                );
                let expected = if j == k { 1.0 } else { 0.0 };
                assert!(
                    (val - expected).abs() < 1e-10,
                    "j={j} k={k} val={val}"
                );
            }
        }
    }

    #[test]
    fn even_moments() {
        assert_eq!(gaussian_even_moment(0, 3.7).unwrap(), 1.0);
        assert_eq!(gaussian_even_moment(2, 1.0).unwrap(), 1.0);
        assert_eq!(gaussian_even_moment(4, 1.0).unwrap(), 3.0);
        assert_eq!(gaussian_even_moment(6, 1.0).unwrap(), 15.0);
        assert_eq!(gaussian_even_moment(4, 2.0).unwrap(), 12.0);
        assert!(gaussian_even_moment(3, 1.0).is_err());
    }

    #[test]
    fn wick_low_order_expansions() {
        // :x^2: = x^2 - v
        assert_abs_diff_eq!(wick_power(2, 1.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(wick_power(2, 3.0, 2.0).unwrap(), 7.0);
        // :x^4: = x^4 - 6 v x^2 + 3 v^2
        assert_abs_diff_eq!(wick_power(4, 0.0, 1.0).unwrap(), 3.0);
        assert_abs_diff_eq!(
            wick_power(4, 1.5, 0.5).unwrap(),
            1.5f64.powi(4) - 6.0 * 0.5 * 2.25 + 3.0 * 0.25,
            epsilon = 1e-14
        );
    }

    #[test]
    fn zero_variance_degenerates_to_power() {
        assert_eq!(wick_power(3, 1.7, 0.0).unwrap(), 1.7f64.powi(3));
        assert_eq!(wick_power(6, -0.3, 0.0).unwrap(), 0.3f64.powi(6));
    }

    #[test]
    fn homogeneity() {
        // :(a x)^k: under variance a^2 v equals a^k :x^k: under v
        let (a, k, x, v) = (2.5, 3, 0.7, 1.3);
        let lhs = wick_power(k, a * x, a * a * v).unwrap();
        let rhs = a.powi(k as i32) * wick_power(k, x, v).unwrap();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12 * rhs.abs());
    }

    #[test]
    fn expansion_agrees_with_hermite_form() {
        for k in 0..=8u32 {
            for &v in &[0.25, 1.0, 4.0] {
                let mut x = -10.0;
                while x <= 10.0 {
                    let a = wick_power(k, x, v).unwrap();
                    let b = wick_power_hermite_form(k, x, v).unwrap();
                    let scale = a.abs().max(b.abs()).max(1e-300);
                    assert!(
                        (a - b).abs() <= 1e-12 * scale.max(1.0),
                        "k={k} v={v} x={x}: {a} vs {b}"
                    );
                    x += 0.5;
                }
            }
        }
    }

    #[test]
    fn order_cap_enforced() {
        assert!(wick_power(21, 1.0, 1.0).is_err());
        assert!(WickContext::new(20, 1.0).is_ok());
    }

    #[test]
    fn cross_moment_values() {
        assert_abs_diff_eq!(wick_cross_moment(2, 2, 0.5), 0.5, epsilon = 1e-15);
        assert_eq!(wick_cross_moment(2, 3, 0.9), 0.0);
        assert_abs_diff_eq!(wick_cross_moment(3, 3, 0.5), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn wick_powers_are_centered_under_monte_carlo() {
        let mut rng = substream(2024, 0);
        let n = 200_000;
        let mut stats: Vec<RunningStat> = (0..=6).map(|_| RunningStat::new()).collect();
        let ctxs: Vec<WickContext> =
            (0..=6).map(|k| WickContext::new(k, 1.0).unwrap()).collect();
        for _ in 0..n {
            let x: f64 = rng.sample(StandardNormal);
            for (k, ctx) in ctxs.iter().enumerate().skip(1) {
                stats[k].push(ctx.eval(x));
            }
        }
        for k in 1..=6 {
            let z = stats[k].z_score(0.0);
            assert!(z.abs() < 4.0, "k={k} z={z}");
        }
    }

    #[test]
    fn cross_moment_matches_monte_carlo_for_order_three() {
        // (X, Y) unit variances, covariance 0.5; E(:X^3::Y^3:) = 0.75
        let r: f64 = 0.5;
        let mut rng = substream(7, 1);
        let ctx = WickContext::new(3, 1.0).unwrap();
        let mut stat = RunningStat::new();
        for _ in 0..1_000_000 {
            let u: f64 = rng.sample(StandardNormal);
            let v: f64 = rng.sample(StandardNormal);
            let x = u;
            let y = r * u + (1.0 - r * r).sqrt() * v;
            stat.push(ctx.eval(x) * ctx.eval(y));
        }
        let z = stat.z_score(0.75);
        assert!(z.abs() < 4.0, "z = {z}, mean = {}", stat.mean());
    }
}
