//! Exact-in-distribution simulation of the process on a uniform grid.
//!
//! Increments of a stationary-increment Gaussian process form a stationary
//! sequence, so paths are generated increment-first: the increment
//! autocovariance sequence is embedded into a circulant matrix, the FFT
//! diagonalizes it, and one complex Gaussian draw per frequency produces a
//! sample whose covariance is exact in distribution. The path is the
//! cumulative sum prefixed with `G(0) = 0`.
//!
//! If the embedding has a materially negative eigenvalue the sampler falls
//! back to a dense symmetric square root of the increment covariance
//! matrix, which is exact but quadratic in memory.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::increment_variance::IncrementVarianceModel;
use crate::rng::substream;
use crate::stats::RunningStat;

/// Relative eigenvalue tolerance below which the embedding is rejected.
pub const EIGENVALUE_TOLERANCE: f64 = 1e-10;

/// Uniform grid `x_i = i delta`, `0 <= i <= n`, anchored at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleGrid {
    pub delta: f64,
    pub n: usize,
}

impl SampleGrid {
    pub fn new(delta: f64, n: usize) -> Result<Self> {
        if !(delta > 0.0) || n == 0 {
            return Err(Error::Domain(format!(
                "grid needs delta > 0 and n >= 1, got delta = {delta}, n = {n}"
            )));
        }
        Ok(Self { delta, n })
    }

    pub fn point(&self, i: usize) -> f64 {
        i as f64 * self.delta
    }

    pub fn span(&self) -> f64 {
        self.n as f64 * self.delta
    }
}

/// One sampled path: values of `G` at the grid points, `values[0] = 0`.
#[derive(Debug, Clone)]
pub struct GaussianPath {
    pub grid: SampleGrid,
    pub values: Vec<f64>,
    pub seed: u64,
    pub stream: u64,
    pub model_tag: String,
}

impl GaussianPath {
    /// Increment `G(x_{i+1}) - G(x_i)`.
    pub fn increment(&self, i: usize) -> f64 {
        self.values[i + 1] - self.values[i]
    }
}

/// Autocovariance of the stationary increment sequence at lag `j`:
/// `c(j) = (sigma2((j+1) d) + sigma2(|j-1| d) - 2 sigma2(j d)) / 2`.
pub fn increment_autocovariance(model: &IncrementVarianceModel, delta: f64, j: usize) -> f64 {
    let d = delta;
    let j = j as f64;
    0.5 * (model.sigma2_unchecked((j + 1.0) * d) + model.sigma2_unchecked((j - 1.0).abs() * d)
        - 2.0 * model.sigma2_unchecked(j * d))
}

/// Summary of the circulant embedding spectrum.
#[derive(Debug, Clone, Copy)]
pub struct EmbeddingReport {
    pub size: usize,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// `|min eigenvalue| / max eigenvalue` when the minimum is negative.
    pub negative_mass: f64,
    pub used_fallback: bool,
}

enum Backend {
    Circulant { sqrt_eig_over_m: Vec<f64>, fft: Arc<dyn Fft<f64>>, m: usize },
    Dense { factor: DMatrix<f64> },
}

/// Reusable sampler: the embedding spectrum and FFT plan are built once,
/// each call to [`PathSampler::sample`] then costs one FFT.
pub struct PathSampler {
    model: IncrementVarianceModel,
    grid: SampleGrid,
    backend: Backend,
    report: EmbeddingReport,
}

impl PathSampler {
    pub fn new(model: IncrementVarianceModel, grid: SampleGrid) -> Result<Self> {
        let n = grid.n;
        let m = (2 * n).next_power_of_two();

        // first circulant row: even extension of the covariance sequence
        let mut row: Vec<Complex<f64>> = (0..m)
            .map(|j| {
                let lag = j.min(m - j);
                Complex::new(increment_autocovariance(&model, grid.delta, lag), 0.0)
            })
            .collect();

        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut row);

        let eigs: Vec<f64> = row.iter().map(|c| c.re).collect();
        let max_eig = eigs.iter().cloned().fold(f64::MIN, f64::max);
        let min_eig = eigs.iter().cloned().fold(f64::MAX, f64::min);
        let negative_mass = if min_eig < 0.0 { -min_eig / max_eig } else { 0.0 };

        if min_eig >= -EIGENVALUE_TOLERANCE * max_eig {
            let sqrt_eig_over_m: Vec<f64> =
                eigs.iter().map(|&l| (l.max(0.0) / m as f64).sqrt()).collect();
            let report = EmbeddingReport {
                size: m,
                min_eigenvalue: min_eig,
                max_eigenvalue: max_eig,
                negative_mass,
                used_fallback: false,
            };
            return Ok(Self {
                model,
                grid,
                backend: Backend::Circulant { sqrt_eig_over_m, fft, m },
                report,
            });
        }

        let factor = dense_sqrt_factor(&model, &grid)?;
        let report = EmbeddingReport {
            size: m,
            min_eigenvalue: min_eig,
            max_eigenvalue: max_eig,
            negative_mass,
            used_fallback: true,
        };
        Ok(Self { model, grid, backend: Backend::Dense { factor }, report })
    }

    pub fn embedding_report(&self) -> EmbeddingReport {
        self.report
    }

    pub fn grid(&self) -> SampleGrid {
        self.grid
    }

    /// Samples the path for trial `stream` of the run keyed by `seed`.
    /// Deterministic in `(seed, stream, grid, model)`.
    pub fn sample(&self, seed: u64, stream: u64) -> GaussianPath {
        let n = self.grid.n;
        let mut rng = substream(seed, stream);
        let increments = match &self.backend {
            Backend::Circulant { sqrt_eig_over_m, fft, m } => {
                let m = *m;
                let half = m / 2;
                let mut spectrum = vec![Complex::new(0.0, 0.0); m];
                let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> f64 { rng.sample(StandardNormal) };
                spectrum[0] = Complex::new(sqrt_eig_over_m[0] * draw(&mut rng), 0.0);
                let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
                for k in 1..half {
                    let re = draw(&mut rng);
                    let im = draw(&mut rng);
                    let amp = sqrt_eig_over_m[k] * inv_sqrt2;
                    spectrum[k] = Complex::new(amp * re, amp * im);
                    spectrum[m - k] = spectrum[k].conj();
                }
                spectrum[half] = Complex::new(sqrt_eig_over_m[half] * draw(&mut rng), 0.0);
                fft.process(&mut spectrum);
                spectrum.iter().take(n).map(|c| c.re).collect::<Vec<f64>>()
            }
            Backend::Dense { factor } => {
                let z = DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
                let out = factor * z;
                out.iter().copied().collect()
            }
        };

        let mut values = Vec::with_capacity(n + 1);
        values.push(0.0);
        let mut acc = 0.0;
        for y in increments {
            acc += y;
            values.push(acc);
        }
        GaussianPath { grid: self.grid, values, seed, stream, model_tag: self.model.tag() }
    }
}

/// Dense symmetric square root of the n-by-n increment covariance matrix.
fn dense_sqrt_factor(model: &IncrementVarianceModel, grid: &SampleGrid) -> Result<DMatrix<f64>> {
    let n = grid.n;
    let cov = DMatrix::from_fn(n, n, |i, j| {
        increment_autocovariance(model, grid.delta, i.abs_diff(j))
    });
    symmetric_sqrt(cov)
}

fn symmetric_sqrt(cov: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = cov.symmetric_eigen();
    let max_eig = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
    let min_eig = eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
    if min_eig < -EIGENVALUE_TOLERANCE * max_eig.max(0.0) {
        return Err(Error::NonPsdCovariance { min_eigenvalue: min_eig });
    }
    let n = eig.eigenvalues.len();
    let sqrt_diag = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            eig.eigenvalues[i].max(0.0).sqrt()
        } else {
            0.0
        }
    });
    Ok(&eig.eigenvectors * sqrt_diag * eig.eigenvectors.transpose())
}

/// One-shot convenience wrapper; batch work should hold a [`PathSampler`].
pub fn sample_path(
    model: &IncrementVarianceModel,
    grid: SampleGrid,
    seed: u64,
) -> Result<GaussianPath> {
    Ok(PathSampler::new(*model, grid)?.sample(seed, 0))
}

/// A probe: two increments identified by grid index ranges.
#[derive(Debug, Clone, Copy)]
pub struct ProbePair {
    /// increment `G(x_{i1}) - G(x_{i0})` with `i0 < i1`
    pub first: (usize, usize),
    /// increment `G(x_{j1}) - G(x_{j0})` with `j0 < j1`
    pub second: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct CovarianceProbeRow {
    pub probe: ProbePair,
    pub exact: f64,
    pub empirical: f64,
    pub std_err: f64,
    pub z_score: f64,
}

#[derive(Debug, Clone)]
pub struct CovarianceReport {
    pub rows: Vec<CovarianceProbeRow>,
    pub max_abs_z: f64,
    pub paths: usize,
}

/// Compares empirical increment covariances over a batch of paths with the
/// exact closed form, studentized per probe. Needs at least 100 paths.
pub fn verify_path_covariance(
    model: &IncrementVarianceModel,
    paths: &[GaussianPath],
    probes: &[ProbePair],
) -> Result<CovarianceReport> {
    if paths.len() < 100 {
        return Err(Error::InsufficientSample { needed: 100, got: paths.len() });
    }
    let delta = paths[0].grid.delta;
    let mut rows = Vec::with_capacity(probes.len());
    let mut max_abs_z: f64 = 0.0;
    for &probe in probes {
        let (i0, i1) = probe.first;
        let (j0, j1) = probe.second;
        let exact = model.increment_cross_covariance(
            i1 as f64 * delta,
            i0 as f64 * delta,
            j1 as f64 * delta,
            j0 as f64 * delta,
        )?;
        let mut stat = RunningStat::new();
        for p in paths {
            let u = (p.values[i1] - p.values[i0]) * (p.values[j1] - p.values[j0]);
            stat.push(u);
        }
        let z = stat.z_score(exact);
        max_abs_z = max_abs_z.max(z.abs());
        rows.push(CovarianceProbeRow {
            probe,
            exact,
            empirical: stat.mean(),
            std_err: stat.std_err(),
            z_score: z,
        });
    }
    Ok(CovarianceReport { rows, max_abs_z, paths: paths.len() })
}
