//! Experiment configuration: a single JSON file, every field optional with
//! a sensible default, so `wicklab <cmd>` works out of the box.

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use std::path::Path;

use wicklab::{IncrementVarianceModel, StepFunction};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: String,
    #[serde(default)]
    pub r: Option<f64>,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self { kind: "power_law".into(), r: Some(1.6) }
    }
}

impl ModelSpec {
    pub fn build(&self) -> Result<IncrementVarianceModel> {
        Ok(match self.kind.as_str() {
            "power_law" => {
                let r = self.r.context("power_law model needs the exponent r")?;
                IncrementVarianceModel::power_law(r)?
            }
            "quadratic" => IncrementVarianceModel::quadratic(),
            "linear" => IncrementVarianceModel::linear(),
            other => bail!("unknown model kind {other:?}"),
        })
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub delta: f64,
    pub n: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        // spans [0, 1.0625]: the unit support plus the largest default h
        Self { delta: 1.0 / 1024.0, n: 1088 }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndicatorSpec {
    pub a: f64,
    pub b: f64,
}

impl Default for IndicatorSpec {
    fn default() -> Self {
        Self { a: 0.0, b: 1.0 }
    }
}

impl IndicatorSpec {
    pub fn build(&self) -> Result<StepFunction> {
        Ok(StepFunction::indicator(self.a, self.b)?)
    }
}

/// Orlicz exponent in JSON: a number, or the string `"inf"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum QSpec {
    Number(f64),
    Name(String),
}

impl QSpec {
    pub fn value(&self) -> Result<f64> {
        match self {
            QSpec::Number(v) => Ok(*v),
            QSpec::Name(s) if s == "inf" || s == "infinity" => Ok(f64::INFINITY),
            QSpec::Name(s) => bail!("unknown Orlicz exponent {s:?}; use a number or \"inf\""),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionSpec {
    /// "hermite", "square" or "abs"
    pub f: String,
    /// order of the Hermite target (and of the claimed rate)
    #[serde(default = "default_k")]
    pub order: u32,
    /// truncation order of the partial sum
    #[serde(default)]
    pub j_max: Option<u32>,
}

impl Default for ExpansionSpec {
    fn default() -> Self {
        Self { f: "square".into(), order: 2, j_max: None }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropySpec {
    pub h0: f64,
    pub points: usize,
    pub span_octaves: f64,
    pub v_min_log2: i32,
    pub v_max_log2: i32,
}

impl Default for EntropySpec {
    fn default() -> Self {
        Self { h0: 0.0625, points: 256, span_octaves: 10.0, v_min_log2: -10, v_max_log2: -2 }
    }
}

impl EntropySpec {
    pub fn v_grid(&self) -> Vec<f64> {
        (self.v_min_log2..=self.v_max_log2).map(|e| 2f64.powi(e)).collect()
    }
}

fn default_k() -> u32 {
    2
}

fn default_seed() -> u64 {
    20_240_801
}

fn default_trials() -> usize {
    500
}

fn default_trend_seeds() -> u64 {
    20
}

fn default_h_list() -> Vec<f64> {
    vec![0.0625, 0.03125, 0.015625]
}

fn default_q_list() -> Vec<QSpec> {
    vec![
        QSpec::Number(0.3),
        QSpec::Number(0.5),
        QSpec::Number(1.0),
        QSpec::Number(2.0),
        QSpec::Name("inf".into()),
    ]
}

fn default_out_dir() -> String {
    "out".into()
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    pub model: ModelSpec,
    pub k: Option<u32>,
    pub grid: GridSpec,
    pub g: IndicatorSpec,
    pub h_list: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub trend_seeds: Option<u64>,
    pub q_list: Option<Vec<QSpec>>,
    pub out_dir: Option<String>,
    pub dump_paths: Option<bool>,
    pub expansion: ExpansionSpec,
    pub entropy: EntropySpec,
}

/// Fully resolved experiment configuration.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub model: IncrementVarianceModel,
    pub k: u32,
    pub grid: GridSpec,
    pub g: StepFunction,
    pub g_spec: IndicatorSpec,
    pub h_list: Vec<f64>,
    pub seed: u64,
    pub trials: usize,
    pub trend_seeds: u64,
    pub q_list: Vec<f64>,
    pub out_dir: String,
    pub dump_paths: bool,
    pub expansion: ExpansionSpec,
    pub entropy: EntropySpec,
}

impl Experiment {
    pub fn resolve(file: ConfigFile) -> Result<Self> {
        let model = file.model.build()?;
        let k = file.k.unwrap_or_else(default_k);
        let g = file.g.build()?;
        let h_list = file.h_list.unwrap_or_else(default_h_list);
        let q_list = file
            .q_list
            .unwrap_or_else(default_q_list)
            .iter()
            .map(|q| q.value())
            .collect::<Result<Vec<f64>>>()?;
        let exp = Self {
            model,
            k,
            grid: file.grid,
            g,
            g_spec: file.g,
            h_list,
            seed: file.seed.unwrap_or_else(default_seed),
            trials: file.trials.unwrap_or_else(default_trials),
            trend_seeds: file.trend_seeds.unwrap_or_else(default_trend_seeds),
            q_list,
            out_dir: file.out_dir.unwrap_or_else(default_out_dir),
            dump_paths: file.dump_paths.unwrap_or(false),
            expansion: file.expansion,
            entropy: file.entropy,
        };
        exp.validate()?;
        Ok(exp)
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        let file = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing config {}", p.display()))?
            }
            None => ConfigFile::default(),
        };
        Self::resolve(file)
    }

    fn validate(&self) -> Result<()> {
        if self.h_list.is_empty() {
            bail!("h_list must not be empty");
        }
        for &h in &self.h_list {
            let steps = h / self.grid.delta;
            if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) || steps < 1.0 {
                bail!("h = {h} is not an integer multiple of grid.delta = {}", self.grid.delta);
            }
        }
        let span = self.grid.delta * self.grid.n as f64;
        let max_h = self.h_list.iter().cloned().fold(0.0, f64::max);
        if self.g_spec.a < 0.0 {
            bail!("test-function support must start at or after 0");
        }
        if self.g_spec.b + max_h > span * (1.0 + 1e-12) {
            bail!(
                "support end {} plus max h = {max_h} exceeds the grid span {span}; increase grid.n",
                self.g_spec.b
            );
        }
        Ok(())
    }

    /// Model exponent delta at the configured order, where defined.
    pub fn delta(&self) -> Option<f64> {
        self.model.delta_of(self.k).ok().map(|d| d.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_resolves() {
        let exp = Experiment::load(None).unwrap();
        assert_eq!(exp.k, 2);
        assert_eq!(exp.q_list.len(), 5);
        assert!(exp.q_list[4].is_infinite());
        assert!(exp.delta().is_some());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{
            "model": {"kind": "power_law", "r": 1.75},
            "k": 2,
            "grid": {"delta": 0.000244140625, "n": 4352},
            "g": {"a": 0.0, "b": 1.0},
            "h_list": [0.015625],
            "seed": 7,
            "trials": 100,
            "q_list": [0.5, 2, "inf"],
            "out_dir": "scratch"
        }"#;
        let file: ConfigFile = serde_json::from_str(text).unwrap();
        let exp = Experiment::resolve(file).unwrap();
        assert_eq!(exp.seed, 7);
        assert_eq!(exp.trials, 100);
        assert_eq!(exp.q_list, vec![0.5, 2.0, f64::INFINITY]);
    }

    #[test]
    fn misaligned_h_rejected() {
        let text = r#"{"h_list": [0.01]}"#;
        let file: ConfigFile = serde_json::from_str(text).unwrap();
        assert!(Experiment::resolve(file).is_err());
    }

    #[test]
    fn entropy_v_grid_is_dyadic() {
        let spec = EntropySpec { v_min_log2: -4, v_max_log2: -2, ..Default::default() };
        assert_eq!(spec.v_grid(), vec![0.0625, 0.125, 0.25]);
    }
}
