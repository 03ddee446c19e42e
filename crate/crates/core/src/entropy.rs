//! Majorizing-measure entropy integrals for the chaos metric.
//!
//! The index set is the interval `T = [0, h0]` carrying Lebesgue measure
//! (total mass `h0 <= 1`; the chaining theorem tolerates positive measures
//! of mass at most one, which spares the renormalization constant). The
//! metric is tabulated exactly on a grid — zero plus geometric points —
//! and balls are approximated by unions of grid cells: a cell counts for
//! the ball around `h` when the metric from `h` to the cell's grid point
//! is within the radius.
//!
//! A ball can never measure less than the center's own cell, so the
//! entropy integrand saturates below the radius where the ball first
//! acquires a second cell. That truncation point is reported with every
//! integral, and the bound check marks a radius conclusive only when the
//! floor of the supremum-attaining row sits well below it.

use crate::chaos::{metric_d_with_tolerance, StepFunction};
use crate::error::{Error, Result};
use crate::increment_variance::IncrementVarianceModel;

/// Quadrature tolerance used when building metric tables; one digit looser
/// than the default metric tolerance, which large tables repay in time.
pub const TABLE_QUADRATURE_TOLERANCE: f64 = 1e-11;

/// Exact pairwise chaos distances on a grid of window lengths.
#[derive(Debug, Clone)]
pub struct MetricTable {
    grid: Vec<f64>,
    cells: Vec<f64>,
    /// row-major symmetric distance matrix
    d: Vec<f64>,
    k: u32,
    model_tag: String,
    diameter: f64,
}

impl MetricTable {
    /// Builds the table for the order-`k` metric of the model and test
    /// function: grid `{0} + geometric(h0 * 2^-span_octaves .. h0)` with
    /// `points` points in total.
    pub fn build(
        model: &IncrementVarianceModel,
        k: u32,
        g: &StepFunction,
        h0: f64,
        points: usize,
        span_octaves: f64,
    ) -> Result<Self> {
        if !(h0 > 0.0) || points < 3 {
            return Err(Error::Domain(format!(
                "metric table needs h0 > 0 and at least 3 points, got {h0}, {points}"
            )));
        }
        let mut grid = Vec::with_capacity(points);
        grid.push(0.0);
        let m = points - 1;
        let h_min = h0 * 2f64.powf(-span_octaves);
        let step = (h0 / h_min).ln() / (m - 1) as f64;
        for i in 0..m {
            grid.push(h_min * (step * i as f64).exp());
        }
        grid[points - 1] = h0;

        let n = grid.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let dij = metric_d_with_tolerance(
                    model,
                    k,
                    g,
                    grid[i],
                    grid[j],
                    TABLE_QUADRATURE_TOLERANCE,
                )?;
                d[i * n + j] = dij;
                d[j * n + i] = dij;
            }
        }
        Ok(Self::from_parts(grid, d, k, model.tag()))
    }

    /// Builds a table from an explicit metric; the toy oracles and the
    /// degenerate models use this.
    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: Vec<f64>, k: u32, tag: &str, f: F) -> Self {
        let n = grid.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = f(grid[i], grid[j]);
            }
        }
        Self::from_parts(grid, d, k, tag.to_string())
    }

    fn from_parts(grid: Vec<f64>, d: Vec<f64>, k: u32, model_tag: String) -> Self {
        let n = grid.len();
        let mut cells = vec![0.0; n];
        let total = *grid.last().unwrap();
        for i in 0..n {
            let lo = if i == 0 { grid[0] } else { 0.5 * (grid[i - 1] + grid[i]) };
            let hi = if i == n - 1 { total } else { 0.5 * (grid[i] + grid[i + 1]) };
            cells[i] = hi - lo;
        }
        let diameter = d.iter().cloned().fold(0.0, f64::max);
        Self { grid, cells, d, k, model_tag, diameter }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn order(&self) -> u32 {
        self.k
    }

    pub fn model_tag(&self) -> &str {
        &self.model_tag
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Largest tabulated distance.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Total mass of the index interval.
    pub fn total_mass(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.grid.len() + j]
    }

    pub fn index_of(&self, h: f64) -> Result<usize> {
        let tol = 1e-12 * h.abs().max(1.0);
        self.grid
            .iter()
            .position(|&g| (g - h).abs() <= tol)
            .ok_or(Error::NotOnGrid { value: h })
    }

    /// Lebesgue measure of the ball `B_d(h, u)` as the total length of
    /// grid cells whose point lies within distance `u` of the center.
    pub fn ball_measure(&self, h: f64, u: f64) -> Result<f64> {
        Ok(self.ball_measure_by_index(self.index_of(h)?, u))
    }

    pub fn ball_measure_by_index(&self, center: usize, u: f64) -> f64 {
        let n = self.grid.len();
        let row = &self.d[center * n..(center + 1) * n];
        row.iter()
            .zip(self.cells.iter())
            .filter(|(&dij, _)| dij <= u)
            .map(|(_, &c)| c)
            .sum()
    }

    /// Row profile: distances sorted ascending with the cumulative cell
    /// measure acquired at each distance; the measure of `B(h, u)` is the
    /// cumulative value at the largest distance `<= u`.
    fn row_profile(&self, center: usize) -> (Vec<f64>, Vec<f64>) {
        let n = self.grid.len();
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|j| (self.d[center * n + j], self.cells[j]))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut dists = Vec::with_capacity(n);
        let mut cumul = Vec::with_capacity(n);
        let mut acc = 0.0;
        for (dist, cell) in pairs {
            acc += cell;
            if let Some(last) = dists.last() {
                if dist == *last {
                    *cumul.last_mut().unwrap() = acc;
                    continue;
                }
            }
            dists.push(dist);
            cumul.push(acc);
        }
        (dists, cumul)
    }

    /// Radius below which the ball around grid point `center` is only its
    /// own cell: the smallest positive distance in the row.
    pub fn truncation_radius(&self, center: usize) -> f64 {
        let n = self.grid.len();
        let row = &self.d[center * n..(center + 1) * n];
        row.iter()
            .enumerate()
            .filter(|&(j, &dij)| j != center || dij > 0.0)
            .map(|(_, &dij)| dij)
            .fold(f64::INFINITY, f64::min)
    }

    /// Entropy integral `int_0^v (log 1/lambda(B(h, u)))^{exponent} du`
    /// with the integrand set to zero wherever the ball measure reaches 1.
    ///
    /// The ball measure is a step function of the radius, so the integral
    /// is a finite exact sum. Below the discretization floor the measure
    /// saturates at the center's own cell; the floor is reported so the
    /// caller can bound the radius range on which the value is meaningful.
    pub fn entropy_integral(&self, h: f64, v: f64, exponent: f64) -> Result<EntropyIntegral> {
        Ok(self.entropy_integral_by_index(self.index_of(h)?, v, exponent))
    }

    pub fn entropy_integral_by_index(&self, center: usize, v: f64, exponent: f64) -> EntropyIntegral {
        let (dists, cumul) = self.row_profile(center);
        let mut value = 0.0;
        // intervals [dists[m], dists[m+1]) carry measure cumul[m]
        for m in 0..dists.len() {
            let lo = dists[m].min(v);
            let hi = if m + 1 < dists.len() { dists[m + 1].min(v) } else { v };
            if hi <= lo {
                continue;
            }
            let lambda = cumul[m];
            if lambda >= 1.0 {
                break;
            }
            value += (1.0 / lambda).ln().powf(exponent) * (hi - lo);
        }
        EntropyIntegral { value, truncation_u: self.truncation_radius(center) }
    }
}

/// Entropy integral value with the discretization floor of its row.
#[derive(Debug, Clone, Copy)]
pub struct EntropyIntegral {
    pub value: f64,
    pub truncation_u: f64,
}

/// One radius of the majorizing bound check.
#[derive(Debug, Clone, Copy)]
pub struct MajorizingRow {
    pub v: f64,
    /// supremum over grid centers of the entropy integral up to `v`
    pub sup_integral: f64,
    /// `v (log 1/v)^{exponent}`
    pub envelope: f64,
    pub ratio: f64,
    /// discretization floor of the row attaining the supremum
    pub truncation_u: f64,
    /// floor at most `v / 10`
    pub conclusive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MajorizingStatus {
    /// every requested radius is resolved by the grid
    Conclusive,
    /// some radius sits below the discretization floor
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct MajorizingReport {
    pub rows: Vec<MajorizingRow>,
    /// largest ratio over all rows
    pub fitted_c: f64,
    /// largest ratio over conclusive rows only
    pub fitted_c_conclusive: Option<f64>,
    /// the supremum is nondecreasing in `v` (so it decreases to its
    /// infimum as `v` shrinks)
    pub monotone: bool,
    pub status: MajorizingStatus,
    pub exponent: f64,
}

/// Evaluates `S(v) = sup_h int_0^v (log 1/lambda(B(h,u)))^{k/2} du` on the
/// given radius grid and fits the envelope constant in
/// `S(v) <= C v (log 1/v)^{k/2}`.
pub fn check_majorizing_bound(table: &MetricTable, v_grid: &[f64]) -> Result<MajorizingReport> {
    if v_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let exponent = table.order() as f64 / 2.0;
    let mut vs: Vec<f64> = v_grid.to_vec();
    vs.sort_by(|a, b| a.total_cmp(b));

    // row profiles are shared across radii; evaluate each center once per v
    let mut rows = Vec::with_capacity(vs.len());
    for &v in &vs {
        if !(0.0 < v && v < 1.0) {
            return Err(Error::Domain(format!(
                "radii must lie in (0, 1) for the log envelope, got {v}"
            )));
        }
        let mut sup = 0.0;
        let mut arg = 0usize;
        for i in 0..table.len() {
            let e = table.entropy_integral_by_index(i, v, exponent);
            if e.value > sup {
                sup = e.value;
                arg = i;
            }
        }
        let truncation_u = table.truncation_radius(arg);
        let envelope = v * (1.0 / v).ln().powf(exponent);
        rows.push(MajorizingRow {
            v,
            sup_integral: sup,
            envelope,
            ratio: sup / envelope,
            truncation_u,
            conclusive: truncation_u <= v / 10.0,
        });
    }

    let fitted_c = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let conclusive_rows: Vec<&MajorizingRow> = rows.iter().filter(|r| r.conclusive).collect();
    let fitted_c_conclusive = if conclusive_rows.is_empty() {
        None
    } else {
        Some(conclusive_rows.iter().map(|r| r.ratio).fold(0.0, f64::max))
    };
    let monotone = rows.windows(2).all(|w| w[0].sup_integral <= w[1].sup_integral + 1e-12);
    let status = if rows.iter().all(|r| r.conclusive) {
        MajorizingStatus::Conclusive
    } else {
        MajorizingStatus::Inconclusive
    };
    Ok(MajorizingReport { rows, fitted_c, fitted_c_conclusive, monotone, status, exponent })
}

/// Checks the triangle inequality on `count` pseudo-random triples of the
/// table; returns the worst violation.
pub fn triangle_violation(table: &MetricTable, count: usize) -> f64 {
    let n = table.len();
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        // splitmix64 step, plenty for picking triples
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        (z ^ (z >> 31)) as usize
    };
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let i = next() % n;
        let j = next() % n;
        let l = next() % n;
        let lhs = table.distance(i, l);
        let rhs = table.distance(i, j) + table.distance(j, l);
        worst = worst.max(lhs - rhs);
    }
    worst
}
