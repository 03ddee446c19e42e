//! Exponential Orlicz machinery.
//!
//! The Young-type functions
//!
//! ```text
//! psi_q(x) = exp(x^q) - 1                 for 1 <= q < inf,
//! psi_q(x) = exp(exp(x)) - e              for q = inf,
//! ```
//!
//! and, for `0 < q < 1` where `exp(x^q) - 1` fails to be convex, the
//! convexified version that is linear with slope `K_q` up to
//! `x0 = (1/q)^{1/q}` and equal to `exp(x^q) - 1` beyond. Chaos variables
//! of order `k` live in the `q = 2/k` space, so the `q < 1` branch is the
//! one that matters for higher orders.
//!
//! `Lambda_q` is the right-continuous inverse of the derivative of
//! `psi_q`; its logarithmic majorant with the computed constant `G_q`
//! yields the Young-type pairing used by the chaining argument. The
//! Luxemburg norm of a sample is computed against the empirical measure.

use crate::error::{Error, Result};

/// Exponent of an exponential Orlicz function; `q = inf` is admitted for
/// the doubly exponential member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Q {
    Finite(f64),
    Infinity,
}

impl Q {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_infinite() && q > 0.0 {
            return Ok(Q::Infinity);
        }
        if !(q > 0.0) || q.is_nan() {
            return Err(Error::Domain(format!("Orlicz exponent must be positive, got {q}")));
        }
        Ok(Q::Finite(q))
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Q::Finite(q) => *q,
            Q::Infinity => f64::INFINITY,
        }
    }
}

/// Breakpoint `x0(q) = (1/q)^{1/q}` of the convexified branch.
pub fn x0_of(q: f64) -> f64 {
    (1.0 / q).powf(1.0 / q)
}

/// Slope `K_q = (exp(x0^q) - 1) / x0` of the linear branch.
pub fn kq_of(q: f64) -> f64 {
    let x0 = x0_of(q);
    ((x0.powf(q)).exp() - 1.0) / x0
}

/// `psi_q(x)` for `x >= 0`.
pub fn psi(q: Q, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!("psi is defined for x >= 0, got {x}")));
    }
    Ok(match q {
        Q::Infinity => (x.exp()).exp() - std::f64::consts::E,
        Q::Finite(q) if q >= 1.0 => (x.powf(q)).exp() - 1.0,
        Q::Finite(q) => {
            let x0 = x0_of(q);
            if x < x0 {
                kq_of(q) * x
            } else {
                (x.powf(q)).exp() - 1.0
            }
        }
    })
}

/// Branchwise inverse of `psi_q`.
pub fn psi_inv(q: Q, y: f64) -> Result<f64> {
    if y < 0.0 {
        return Err(Error::Domain(format!("psi_inv is defined for y >= 0, got {y}")));
    }
    Ok(match q {
        Q::Infinity => (std::f64::consts::E + y).ln().ln(),
        Q::Finite(q) if q >= 1.0 => (1.0 + y).ln().powf(1.0 / q),
        Q::Finite(q) => {
            let x0 = x0_of(q);
            let kq = kq_of(q);
            if y <= kq * x0 {
                y / kq
            } else {
                (1.0 + y).ln().powf(1.0 / q)
            }
        }
    })
}

/// The pairing majorant of the chaining inequality:
/// `log log(e + x)` at `q = inf`, `log(1+x)^{1/q}` for `q >= 1`, and
/// `(2 log(1 + x / G_q))^{1/q}` for `q < 1` (needs the computed `G_q`).
pub fn phi_q(q: Q, x: f64, g_q: Option<f64>) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!("phi_q is defined for x >= 0, got {x}")));
    }
    Ok(match q {
        Q::Infinity => (std::f64::consts::E + x).ln().ln(),
        Q::Finite(q) if q >= 1.0 => (1.0 + x).ln().powf(1.0 / q),
        Q::Finite(q) => {
            let g = g_q.ok_or_else(|| {
                Error::Domain("phi_q with q < 1 needs the computed G_q constant".into())
            })?;
            (2.0 * (1.0 + x / g).ln()).powf(1.0 / q)
        }
    })
}

/// Derivative of `psi_q` for `0 < q < 1` on the exponential branch.
fn psi_prime_upper(q: f64, x: f64) -> f64 {
    q * (x.powf(q)).exp() / x.powf(1.0 - q)
}

/// Right-continuous inverse `Lambda_q` of the derivative of `psi_q`,
/// for `0 < q < 1`: zero below the linear slope `K_q`, the plateau `x0`
/// through the derivative jump, then the root of
/// `q exp(x^q) / x^{1-q} = y`.
pub fn lambda_q(q: f64, y: f64) -> Result<f64> {
    if !(0.0 < q && q < 1.0) {
        return Err(Error::Domain(format!("lambda_q is a 0 < q < 1 construct, got {q}")));
    }
    if y < 0.0 {
        return Err(Error::Domain(format!("lambda_q needs y >= 0, got {y}")));
    }
    let x0 = x0_of(q);
    let kq = kq_of(q);
    if y < kq {
        return Ok(0.0);
    }
    let jump_top = psi_prime_upper(q, x0); // right derivative at x0
    if y <= jump_top {
        return Ok(x0);
    }
    // bracket the root of the increasing upper branch
    let mut lo = x0;
    let mut hi = x0.max(1.0);
    while psi_prime_upper(q, hi) < y {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::NumericalInconsistency(
                "lambda_q bracket expansion failed".into(),
            ));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if psi_prime_upper(q, mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Largest constant `G` such that
/// `Lambda_q(y) <= (2 log(1 + y/G))^{1/q}` holds on a dense logarithmic
/// `y`-grid up to `1e8`: the per-`y` admissible bound is explicit,
/// `G <= y / (exp(Lambda^q / 2) - 1)`, and the infimum over the grid is
/// returned (shrunk by one part in 1e6 to absorb between-grid wiggle).
pub fn find_gq(q: f64) -> Result<f64> {
    if !(0.0 < q && q < 1.0) {
        return Err(Error::Domain(format!("find_gq is a 0 < q < 1 construct, got {q}")));
    }
    let kq = kq_of(q);
    let mut points = log_spaced(1e-4, 1e8, 4000);
    points.push(kq);
    points.push(psi_prime_upper(q, x0_of(q)));
    let mut g = f64::INFINITY;
    for &y in &points {
        let lam = lambda_q(q, y)?;
        if lam <= 0.0 {
            continue;
        }
        let denom = (0.5 * lam.powf(q)).exp() - 1.0;
        if denom > 0.0 {
            g = g.min(y / denom);
        }
    }
    if !g.is_finite() || g <= 0.0 {
        return Err(Error::NumericalInconsistency(format!(
            "admissible G_q not found for q = {q}"
        )));
    }
    Ok(g * (1.0 - 1e-6))
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| lo * (step * i as f64).exp()).collect()
}

/// Outcome of a Young-type pairing check on a grid.
#[derive(Debug, Clone)]
pub struct YoungReport {
    pub q: f64,
    pub g_q: Option<f64>,
    pub max_violation: f64,
    pub pass: bool,
}

/// Verifies the applicable Young-type inequality on `grid_x x grid_y`:
/// `xy <= psi_q(x) + y psi_q^{-1}(y)` for `q >= 1` (and `q = inf`),
/// `xy <= psi_q(x) + y (2 log(1 + y/G_q))^{1/q}` for `q < 1`.
/// Violations are measured relative to `max(1, xy)`.
pub fn young_check(q: Q, grid_x: &[f64], grid_y: &[f64], g_q: Option<f64>) -> Result<YoungReport> {
    let mut max_violation: f64 = 0.0;
    let qv = q.as_f64();
    let below_one = matches!(q, Q::Finite(v) if v < 1.0);
    let g_used = if below_one {
        Some(match g_q {
            Some(g) => g,
            None => find_gq(qv)?,
        })
    } else {
        None
    };
    for &x in grid_x {
        let psi_x = psi(q, x)?;
        for &y in grid_y {
            let pairing = if below_one {
                y * phi_q(q, y, g_used)?
            } else {
                y * psi_inv(q, y)?
            };
            let rhs = psi_x + pairing;
            let violation = (x * y - rhs) / (x * y).max(1.0);
            max_violation = max_violation.max(violation);
        }
    }
    Ok(YoungReport {
        q: qv,
        g_q: g_used,
        max_violation,
        pass: max_violation <= 1e-10,
    })
}

/// Empirical Luxemburg norm: the root in `c` of
/// `(1/N) sum psi_q(|xi_i| / c) = 1`, by monotone bisection inside the
/// bracket `[max|xi| / psi_q^{-1}(N), max|xi| / psi_q^{-1}(1/N)]`.
pub fn orlicz_norm_empirical(samples: &[f64], q: Q) -> Result<f64> {
    if samples.len() < 1000 {
        return Err(Error::InsufficientSample { needed: 1000, got: samples.len() });
    }
    let max_abs = samples.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if max_abs == 0.0 {
        return Ok(0.0);
    }
    let n = samples.len() as f64;
    let mean_psi = |c: f64| -> f64 {
        let mut acc = 0.0;
        for &x in samples {
            acc += psi(q, x.abs() / c).unwrap_or(f64::INFINITY);
        }
        acc / n
    };
    let mut lo = max_abs / psi_inv(q, n)?;
    let mut hi = max_abs / psi_inv(q, 1.0 / n)?;
    debug_assert!(mean_psi(lo) >= 1.0);
    debug_assert!(mean_psi(hi) <= 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_psi(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Largest convexity defect of `f` over a grid: positive values mean the
/// slope sequence decreases somewhere.
pub fn convexity_defect<F: Fn(f64) -> f64>(f: F, grid: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    for i in 0..grid.len().saturating_sub(2) {
        let (x0, x1, x2) = (grid[i], grid[i + 1], grid[i + 2]);
        let (f0, f1, f2) = (vals[i], vals[i + 1], vals[i + 2]);
        if !(f0.is_finite() && f1.is_finite() && f2.is_finite()) {
            continue; // saturated region: the analytic branch is convex
        }
        let left = (f1 - f0) / (x1 - x0);
        let right = (f2 - f1) / (x2 - x1);
        let scale = left.abs().max(right.abs()).max(1.0);
        worst = worst.max((left - right) / scale);
    }
    worst
}

/// Grid on which `psi_q` stays finite in double precision: `[0, cap]`
/// where `cap` keeps the exponent below overflow.
pub fn convexity_grid(q: Q, upper: f64, n: usize) -> Vec<f64> {
    let cap = match q {
        Q::Infinity => 700f64.ln(),
        Q::Finite(q) => 700f64.powf(1.0 / q),
    };
    let hi = upper.min(cap);
    let mut grid = vec![0.0];
    grid.extend(log_spaced(1e-3, hi, n));
    grid
}
