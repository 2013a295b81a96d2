//! Experiment configuration: a TOML file with per-block defaults, overridden
//! by command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use flowlab::flow::Scheme;
use flowlab::speed::SpeedKindName;
use flowlab::SpeedSpec;
use serde::{Deserialize, Serialize};

/// Environment variable that replaces `output.dir`.
pub const OUT_ENV: &str = "FLOWLAB_OUT";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seed for random test directions.
    pub seed: u64,
    pub speed: SpeedSpec,
    pub solver: SolverConfig,
    pub flow: FlowConfig,
    pub spectral: SpectralConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 7,
            speed: SpeedSpec::sum(3),
            solver: SolverConfig::default(),
            flow: FlowConfig::default(),
            spectral: SpectralConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub tol: f64,
    pub rho_max: f64,
    /// Fit window for the bowl expansion.
    pub fit_window: [f64; 2],
    pub theta: f64,
    /// Upper barrier slope; `2F(1,1)/F(0,1)` when absent.
    pub big_theta: Option<f64>,
    /// Start radii `ρ_k`; `2^{-k}, k = 4..14` when absent.
    pub rho_k: Option<Vec<f64>>,
    pub conv_tol: f64,
    pub a: Vec<f64>,
    /// Boundary radius for the `w` comparison.
    pub m: f64,
    /// Upper end of the interval for the neck constant.
    pub l: f64,
    pub check_bounds: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-10,
            rho_max: 1000.0,
            fit_window: [100.0, 1000.0],
            theta: 0.9,
            big_theta: None,
            rho_k: None,
            conv_tol: 1e-8,
            a: vec![25.0, 50.0, 100.0],
            m: 50.0,
            l: 20.0,
            check_bounds: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FlowPreset {
    Cylinder,
    Bowl,
    Shrinker,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowConfig {
    pub preset: FlowPreset,
    pub scheme: Scheme,
    pub dx: f64,
    /// Fixed step; the stability limit when absent.
    pub dt: Option<f64>,
    pub t_end: f64,
    pub stride: usize,
    pub r0: f64,
    pub half_length: f64,
    /// Height window for bowl runs.
    pub z_window: [f64; 2],
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            preset: FlowPreset::Cylinder,
            scheme: Scheme::Heun,
            dx: 0.05,
            dt: None,
            t_end: 0.25,
            stride: 50,
            r0: 2.0,
            half_length: 5.0,
            z_window: [2.0, 12.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralConfig {
    pub k_max: usize,
    pub quad_order: usize,
    pub r: f64,
    pub l_cut: Option<f64>,
    pub delta_l: f64,
    pub windows: usize,
    pub seed_mode: usize,
    pub epsilon: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            k_max: 24,
            quad_order: 120,
            r: 1e-4,
            l_cut: None,
            delta_l: 10.0,
            windows: 10,
            seed_mode: 1,
            epsilon: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub plots: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("flowlab-out"),
            plots: true,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("parsing configuration")
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).context("serializing configuration")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text)
    }

    /// Applies the output-directory environment override.
    pub fn apply_env(&mut self) {
        if let Some(dir) = std::env::var_os(OUT_ENV) {
            self.output.dir = PathBuf::from(dir);
        }
    }

    pub fn speed_label(&self) -> String {
        let kind = match self.speed.kind {
            SpeedKindName::Sum => "sum".to_string(),
            SpeedKindName::Bh => "bh".to_string(),
            SpeedKindName::SigmaRatio => format!("sigma_ratio{}", self.speed.k.unwrap_or(0)),
        };
        format!("{kind}_n{}", self.speed.n)
    }
}
