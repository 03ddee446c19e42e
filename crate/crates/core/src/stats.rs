//! Running statistics for Monte Carlo estimates.

/// Welford accumulator for mean, variance and the standard error of the mean.
#[derive(Debug, Clone, Default)]
pub struct RunningStat {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStat {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn from_slice(values: &[f64]) -> Self {
        let mut s = Self::new();
        for &v in values {
            s.push(v);
        }
        s
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        self.m2 / (self.count - 1) as f64
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Standard error of the sample mean: s / sqrt(n).
    pub fn std_err(&self) -> f64 {
        if self.count == 0 {
            return f64::INFINITY;
        }
        self.std_dev() / (self.count as f64).sqrt()
    }

    /// Studentized deviation of the sample mean from `expected`.
    pub fn z_score(&self, expected: f64) -> f64 {
        let se = self.std_err();
        if se == 0.0 {
            if self.mean == expected {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - expected) / se
        }
    }
}

/// Median of a slice (ignores NaNs by total order; empty slice gives NaN).
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
