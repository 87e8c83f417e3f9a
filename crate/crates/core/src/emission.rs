//! Spectrally resolved emission of coexisting stationary states.
//!
//! Each state emits a line at its energy `Omega_n`; the two pillars of one
//! state add coherently, different states add in intensity. Collection
//! efficiency is the same for every state.

use crate::error::{Error, Result};
use crate::roots::linspace;
use crate::stability::classify;
use crate::stationary::{all_states_at_pumping, StationaryState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    /// Pillar centres, um.
    pub x1: f64,
    pub x2: f64,
    pub radius: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Self { x1: -5.0, x2: 5.0, radius: 5.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Widths {
    /// Spatial width of the amplitude profile, um.
    pub sigma_x: f64,
    /// Spectral width, meV.
    pub sigma_omega: f64,
}

impl Widths {
    pub fn for_geometry(g: &Geometry) -> Self {
        Self { sigma_x: 0.5 * g.radius, sigma_omega: 0.02 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grids {
    pub x: Vec<f64>,
    pub omega: Vec<f64>,
}

impl Grids {
    /// `x` on `[-12, 12]` at 0.1 um and `Omega` covering every line by
    /// `6 sigma_omega` on each side at `sigma_omega / 5`.
    pub fn auto(states: &[StationaryState], widths: &Widths) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptyInput("states"));
        }
        let lo = states.iter().map(|s| s.omega).fold(f64::INFINITY, f64::min) - 6.0 * widths.sigma_omega;
        let hi = states.iter().map(|s| s.omega).fold(f64::NEG_INFINITY, f64::max) + 6.0 * widths.sigma_omega;
        let n = ((hi - lo) / (0.2 * widths.sigma_omega)).ceil() as usize + 1;
        Ok(Self { x: linspace(-12.0, 12.0, 241), omega: linspace(lo, hi, n.max(2)) })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmissionMap {
    pub x_grid: Vec<f64>,
    pub omega_grid: Vec<f64>,
    /// `intensity[i][k]` at `(x_grid[i], omega_grid[k])`.
    pub intensity: Vec<Vec<f64>>,
}

fn trapezoid_weights(grid: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let h = grid[i + 1] - grid[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

impl EmissionMap {
    /// Trapezoidal integral over both grids.
    pub fn integral(&self) -> f64 {
        let wx = trapezoid_weights(&self.x_grid);
        let ww = trapezoid_weights(&self.omega_grid);
        self.intensity
            .iter()
            .zip(&wx)
            .map(|(row, a)| a * row.iter().zip(&ww).map(|(v, b)| v * b).sum::<f64>())
            .sum()
    }

    /// Spectrum integrated over `x`.
    pub fn spectrum(&self) -> Vec<f64> {
        let wx = trapezoid_weights(&self.x_grid);
        let mut out = vec![0.0; self.omega_grid.len()];
        for (row, a) in self.intensity.iter().zip(&wx) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += a * v;
            }
        }
        out
    }
}

/// Amplitude profile normalised so that `int G^2 = 1`.
pub fn gaussian_amplitude(x: f64, sigma: f64) -> f64 {
    (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25) * (-x * x / (4.0 * sigma * sigma)).exp()
}

/// Integral of one state's line over the whole `(x, Omega)` plane:
/// `N_cT + 2 sqrt(N_c1 N_c2) cos(delta_phi) exp(-d^2 / (8 sigma_x^2))`.
pub fn emitted_weight(st: &StationaryState, geometry: &Geometry, widths: &Widths) -> f64 {
    let d = geometry.x2 - geometry.x1;
    let overlap = (-d * d / (8.0 * widths.sigma_x * widths.sigma_x)).exp();
    st.n_ct() + 2.0 * (st.n_c1 * st.n_c2).sqrt() * st.delta_phi.cos() * overlap
}

pub fn emission_map(
    states: &[StationaryState],
    geometry: &Geometry,
    widths: &Widths,
    grids: &Grids,
) -> Result<EmissionMap> {
    if states.is_empty() {
        return Err(Error::EmptyInput("states"));
    }
    if !(widths.sigma_x > 0.0) || !(widths.sigma_omega > 0.0) {
        return Err(Error::InvalidParams("emission widths must be > 0".into()));
    }
    if grids.x.len() < 2 || grids.omega.len() < 2 {
        return Err(Error::GridTooSmall("emission grids need at least two points each".into()));
    }
    let w_lo = grids.omega.iter().copied().fold(f64::INFINITY, f64::min);
    let w_hi = grids.omega.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for st in states {
        let (a, b) = (st.omega - 3.0 * widths.sigma_omega, st.omega + 3.0 * widths.sigma_omega);
        if a < w_lo || b > w_hi {
            return Err(Error::GridTooSmall(format!(
                "line at {} meV needs [{a}, {b}], grid covers [{w_lo}, {w_hi}]",
                st.omega
            )));
        }
    }
    let spatial: Vec<(f64, f64)> = grids
        .x
        .iter()
        .map(|&x| {
            (
                gaussian_amplitude(x - geometry.x1, widths.sigma_x),
                gaussian_amplitude(x - geometry.x2, widths.sigma_x),
            )
        })
        .collect();
    let mut intensity = vec![vec![0.0; grids.omega.len()]; grids.x.len()];
    for st in states {
        let a1 = st.n_c1.sqrt();
        let a2 = st.n_c2.sqrt();
        let (s, c) = st.delta_phi.sin_cos();
        let line: Vec<f64> = grids
            .omega
            .iter()
            .map(|&w| gaussian_amplitude(w - st.omega, widths.sigma_omega).powi(2))
            .collect();
        for (row, &(g1, g2)) in intensity.iter_mut().zip(&spatial) {
            let re = a1 * g1 + a2 * c * g2;
            let im = a2 * s * g2;
            let xs = re * re + im * im;
            for (v, l) in row.iter_mut().zip(&line) {
                *v += xs * l;
            }
        }
    }
    Ok(EmissionMap { x_grid: grids.x.clone(), omega_grid: grids.omega.clone(), intensity })
}

/// Condensed states at `p1` whose stability verdict is stable.
pub fn stable_states_for_emission(params: &crate::model::ModelParams, p1: f64) -> Result<Vec<StationaryState>> {
    let mut out = Vec::new();
    for mut st in all_states_at_pumping(params, p1)? {
        if !st.branch.is_condensed() {
            continue;
        }
        if let Ok(v) = classify(params, &st) {
            st.stability = Some(v);
            if v.is_stable() {
                out.push(st);
            }
        }
    }
    Ok(out)
}
