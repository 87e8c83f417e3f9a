//! Run configuration. Every experiment reads its own `options` object;
//! missing keys take the defaults below and unknown keys are rejected.

use anyhow::{bail, Context, Result};
use polariton_bjj::ModelParams;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

pub const EXPERIMENTS: [(&str, &str); 8] = [
    ("threshold", "threshold pumping against the Josephson coupling"),
    ("stationary", "stationary states and their stability against the pumping"),
    ("stability", "fluctuation eigenvalues of every stationary state"),
    ("evolve", "time evolution of the full mean-field model"),
    ("hysteresis", "pumping swept up then down"),
    ("basin", "attractor reached from a grid of initial imbalances and phases"),
    ("emission", "spatially and spectrally resolved emission of the stable states"),
    ("reduced", "time evolution of the reduced or pendulum equations"),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Linspace {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Linspace {
    pub fn values(&self) -> Vec<f64> {
        polariton_bjj::roots::linspace(self.start, self.stop, self.points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Initial {
    pub zeta: f64,
    pub delta_phi: f64,
    pub n_ct: f64,
    pub n_r1: f64,
}

impl Default for Initial {
    fn default() -> Self {
        Self { zeta: 0.9, delta_phi: 0.0, n_ct: 100.0, n_r1: 20.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdOptions {
    pub j_grid: Linspace,
    pub detunings: Vec<f64>,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self { j_grid: Linspace { start: 0.0, stop: 0.2, points: 201 }, detunings: vec![0.0, 0.2] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StationaryOptions {
    pub p_grid: Linspace,
    /// Fixed detunings, one CSV each; empty means the model's own setting.
    pub detunings: Vec<f64>,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        Self { p_grid: Linspace { start: 0.0, stop: 60.0, points: 241 }, detunings: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityOptions {
    pub p_values: Vec<f64>,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        Self { p_values: vec![11.0, 50.0] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveOptions {
    pub initial: Initial,
    pub t_final: f64,
    pub dt_max: f64,
    pub sample_dt: f64,
    pub noise_sigma: f64,
    pub seed: u64,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            initial: Initial::default(),
            t_final: 1000.0,
            dt_max: 0.5,
            sample_dt: 0.5,
            noise_sigma: 0.0,
            seed: 0,
            rtol: 1e-9,
            atol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HysteresisOptions {
    pub p_start: f64,
    pub p_stop: f64,
    pub p_step: f64,
    pub t_hold: f64,
    pub average_fraction: f64,
    pub samples: usize,
    pub seed_population: f64,
    pub seed_zeta: f64,
    pub seed_phase: f64,
    pub dt_max: f64,
    pub converged_spread: f64,
}

impl Default for HysteresisOptions {
    fn default() -> Self {
        Self {
            p_start: 8.0,
            p_stop: 12.0,
            p_step: 0.25,
            t_hold: 3000.0,
            average_fraction: 0.1,
            samples: 64,
            seed_population: 1e-6,
            seed_zeta: 0.6,
            seed_phase: PI,
            dt_max: 0.5,
            converged_spread: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SettleConfig {
    pub t_max: f64,
    pub dt_max: f64,
    pub window: f64,
    pub velocity_tol: f64,
    pub check_dt: f64,
    pub match_tol: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for SettleConfig {
    fn default() -> Self {
        let d = polariton_bjj::dynamics::SettleOptions::default();
        Self {
            t_max: d.t_max,
            dt_max: d.dt_max,
            window: d.window,
            velocity_tol: d.velocity_tol,
            check_dt: d.check_dt,
            match_tol: d.match_tol,
            rtol: d.tol.rtol,
            atol: d.tol.atol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BasinOptions {
    /// `zeta0` on `[-zeta_max, zeta_max]`.
    pub zeta_points: usize,
    pub zeta_max: f64,
    /// Cell-centred `phi0` on `(-pi, pi)`.
    pub phi_points: usize,
    pub n_ct0: f64,
    pub n_r10: f64,
    pub settle: SettleConfig,
}

impl Default for BasinOptions {
    fn default() -> Self {
        Self { zeta_points: 21, zeta_max: 0.95, phi_points: 24, n_ct0: 60.0, n_r10: 15.0, settle: SettleConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmissionOptions {
    /// Pumping of the map; the model's `pump_p1` when absent.
    pub p1: Option<f64>,
    pub x1: f64,
    pub x2: f64,
    pub radius: f64,
    /// `radius / 2` when absent.
    pub sigma_x: Option<f64>,
    pub sigma_omega: f64,
    /// Automatic grids when absent.
    pub x_grid: Option<Linspace>,
    pub omega_grid: Option<Linspace>,
}

impl Default for EmissionOptions {
    fn default() -> Self {
        Self { p1: None, x1: -5.0, x2: 5.0, radius: 5.0, sigma_x: None, sigma_omega: 0.02, x_grid: None, omega_grid: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equations {
    Reduced,
    Pendulum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReducedOptions {
    pub equations: Equations,
    pub initial: Initial,
    pub t_final: f64,
    pub dt_max: f64,
    pub sample_dt: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for ReducedOptions {
    fn default() -> Self {
        Self {
            equations: Equations::Reduced,
            initial: Initial::default(),
            t_final: 1000.0,
            dt_max: 0.5,
            sample_dt: 0.5,
            rtol: 1e-9,
            atol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "experiment", content = "options", rename_all = "snake_case")]
pub enum Experiment {
    Threshold(ThresholdOptions),
    Stationary(StationaryOptions),
    Stability(StabilityOptions),
    Evolve(EvolveOptions),
    Hysteresis(HysteresisOptions),
    Basin(BasinOptions),
    Emission(EmissionOptions),
    Reduced(ReducedOptions),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Threshold(_) => "threshold",
            Experiment::Stationary(_) => "stationary",
            Experiment::Stability(_) => "stability",
            Experiment::Evolve(_) => "evolve",
            Experiment::Hysteresis(_) => "hysteresis",
            Experiment::Basin(_) => "basin",
            Experiment::Emission(_) => "emission",
            Experiment::Reduced(_) => "reduced",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    model: ModelParams,
    experiment: String,
    #[serde(default)]
    options: Option<serde_json::Value>,
    output_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub model: ModelParams,
    #[serde(flatten)]
    pub experiment: Experiment,
    pub output_dir: PathBuf,
}

fn options<T: serde::de::DeserializeOwned + Default>(v: Option<serde_json::Value>) -> serde_json::Result<T> {
    match v {
        Some(v) => serde_json::from_value(v),
        None => Ok(T::default()),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).context("invalid config")?;
        let o = raw.options;
        let experiment = match raw.experiment.as_str() {
            "threshold" => Experiment::Threshold(options(o)?),
            "stationary" => Experiment::Stationary(options(o)?),
            "stability" => Experiment::Stability(options(o)?),
            "evolve" => Experiment::Evolve(options(o)?),
            "hysteresis" => Experiment::Hysteresis(options(o)?),
            "basin" => Experiment::Basin(options(o)?),
            "emission" => Experiment::Emission(options(o)?),
            "reduced" => Experiment::Reduced(options(o)?),
            other => bail!("unknown experiment `{other}`"),
        };
        raw.model.validate().context("invalid model")?;
        Ok(Self { model: raw.model, experiment, output_dir: raw.output_dir })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }
}
