//! Two-mode generalized Gross-Pitaevskii model of a polariton Josephson
//! junction pumped on site 1, coupled to the site-1 reservoir rate equation.
//!
//! Units: hbar = 1, energies and rates in meV, time in hbar/meV.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// One time unit (hbar / meV) expressed in picoseconds, for reporting only.
pub const HBAR_PER_MEV_PS: f64 = 0.658_211_956_9;

/// Physical constants of the junction. Every energy and rate is in meV.
///
/// `detuning_override` selects how the real potential difference is built:
/// `Some(d)` fixes `eps1 - eps2 + V1R - V2R = d` (the default, with `d = 0`),
/// `None` computes `V1R = g_tilde / area_1 * N_R1 + g_exciton1 * P1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    pub eps1: f64,
    pub eps2: f64,
    pub u1: f64,
    pub u2: f64,
    pub j_coupling: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma_r1: f64,
    pub r1_prime: f64,
    pub g_tilde: f64,
    pub area_1: f64,
    pub g_exciton1: f64,
    pub radiative_gamma: f64,
    pub detuning_override: Option<f64>,
    pub pump_p1: f64,
}

impl Default for ModelParams {
    /// Junction of the multi-stability figures at `P1 = 11`.
    fn default() -> Self {
        Self {
            eps1: 0.0,
            eps2: 0.0,
            u1: 0.01,
            u2: 0.01,
            j_coupling: 0.1,
            gamma1: 0.1,
            gamma2: 0.1,
            gamma_r1: 0.5,
            r1_prime: 0.01,
            g_tilde: 0.0,
            area_1: 1.0,
            g_exciton1: 0.0,
            radiative_gamma: 0.0,
            detuning_override: Some(0.0),
            pump_p1: 11.0,
        }
    }
}

impl ModelParams {
    pub fn with_pump(mut self, p1: f64) -> Self {
        self.pump_p1 = p1;
        self
    }

    pub fn with_coupling(mut self, j: f64) -> Self {
        self.j_coupling = j;
        self
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning_override = Some(detuning);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("eps1", self.eps1),
            ("eps2", self.eps2),
            ("u1", self.u1),
            ("u2", self.u2),
            ("j_coupling", self.j_coupling),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma_r1", self.gamma_r1),
            ("r1_prime", self.r1_prime),
            ("g_tilde", self.g_tilde),
            ("area_1", self.area_1),
            ("g_exciton1", self.g_exciton1),
            ("radiative_gamma", self.radiative_gamma),
            ("pump_p1", self.pump_p1),
        ];
        if let Some((name, _)) = named.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("{name} is not finite")));
        }
        for (name, v) in [
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma_r1", self.gamma_r1),
            ("r1_prime", self.r1_prime),
            ("j_coupling", self.j_coupling),
        ] {
            if v < 0.0 {
                return Err(Error::InvalidParams(format!("{name} must be >= 0, got {v}")));
            }
        }
        if self.detuning_override.is_none() && self.area_1 <= 0.0 {
            return Err(Error::InvalidParams("area_1 must be > 0".into()));
        }
        if matches!(self.detuning_override, Some(d) if !d.is_finite()) {
            return Err(Error::InvalidParams("detuning_override is not finite".into()));
        }
        Ok(())
    }

    /// Complex tunneling `J + i Gamma`.
    pub fn coupling(&self) -> Complex64 {
        Complex64::new(self.j_coupling, self.radiative_gamma)
    }

    /// Stimulated scattering rate `R1(N_R1) = R1' N_R1`.
    pub fn scattering(&self, n_r1: f64) -> f64 {
        self.r1_prime * n_r1
    }

    /// Real potentials `(V1R, V2R)`. Site 2 carries no reservoir, so `V2R = 0`.
    pub fn real_potentials(&self, n_r1: f64) -> (f64, f64) {
        match self.detuning_override {
            Some(d) => (d - (self.eps1 - self.eps2), 0.0),
            None => (self.g_tilde / self.area_1 * n_r1 + self.g_exciton1 * self.pump_p1, 0.0),
        }
    }

    /// Effective detuning `eps12 + V12R`.
    pub fn effective_detuning(&self, n_r1: f64) -> f64 {
        let (v1, v2) = self.real_potentials(n_r1);
        self.eps1 - self.eps2 + v1 - v2
    }

    pub fn v1_imag(&self, n_r1: f64) -> f64 {
        0.5 * (self.scattering(n_r1) - self.gamma1)
    }

    pub fn v2_imag(&self) -> f64 {
        -0.5 * self.gamma2
    }

    /// `V12I = V1I - V2I`, the gain imbalance driving particles out of site 1.
    pub fn v12_imag(&self, n_r1: f64) -> f64 {
        self.v1_imag(n_r1) - self.v2_imag()
    }

    pub fn u_mean(&self) -> f64 {
        0.5 * (self.u1 + self.u2)
    }

    /// Reservoir level `(gamma1 + gamma2) / R1'` at which `E1 = E2*` is possible.
    pub fn pt_reservoir(&self) -> f64 {
        (self.gamma1 + self.gamma2) / self.r1_prime
    }

    /// Signed distance from the PT-breaking boundary, `J^2 - gamma2^2 / 4`.
    pub fn pt_margin(&self) -> f64 {
        self.j_coupling * self.j_coupling - 0.25 * self.gamma2 * self.gamma2
    }
}

/// Instantaneous mean-field state: the two condensate amplitudes and the
/// site-1 reservoir number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullState {
    pub psi1: Complex64,
    pub psi2: Complex64,
    pub n_r1: f64,
}

impl FullState {
    pub fn new(psi1: Complex64, psi2: Complex64, n_r1: f64) -> Self {
        Self { psi1, psi2, n_r1 }
    }

    pub fn empty(n_r1: f64) -> Self {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), n_r1)
    }

    /// Builds amplitudes with `phi1 = 0` and `phi2 = delta_phi`.
    pub fn from_reduced(s: &ReducedState) -> Self {
        let n1 = 0.5 * s.n_ct * (1.0 + s.zeta);
        let n2 = 0.5 * s.n_ct * (1.0 - s.zeta);
        Self::new(
            Complex64::new(n1.max(0.0).sqrt(), 0.0),
            Complex64::from_polar(n2.max(0.0).sqrt(), s.delta_phi),
            s.n_r1,
        )
    }

    pub fn n_c1(&self) -> f64 {
        self.psi1.norm_sqr()
    }

    pub fn n_c2(&self) -> f64 {
        self.psi2.norm_sqr()
    }

    pub fn n_ct(&self) -> f64 {
        self.n_c1() + self.n_c2()
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.psi1.re, self.psi1.im, self.psi2.re, self.psi2.im, self.n_r1]
    }

    pub fn from_array(y: &[f64; 5]) -> Self {
        Self::new(Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]), y[4])
    }

    pub fn is_valid(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite()) && self.n_r1 >= 0.0
    }

    /// Multiplies both amplitudes by `exp(i theta)`.
    pub fn rotated(&self, theta: f64) -> Self {
        let g = Complex64::from_polar(1.0, theta);
        Self::new(self.psi1 * g, self.psi2 * g, self.n_r1)
    }
}

/// Time derivative of a [`FullState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullRate {
    pub dpsi1: Complex64,
    pub dpsi2: Complex64,
    pub dn_r1: f64,
}

impl FullRate {
    pub fn to_array(&self) -> [f64; 5] {
        [self.dpsi1.re, self.dpsi1.im, self.dpsi2.re, self.dpsi2.im, self.dn_r1]
    }
}

/// Complex on-site energies `E_j` and their potential parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnSiteEnergies {
    pub e1: Complex64,
    pub e2: Complex64,
    pub v1_i: f64,
    pub v2_i: f64,
    /// `eps12 + V12R`.
    pub v12_r: f64,
}

/// Variables of the reduced equations of motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    pub zeta: f64,
    pub delta_phi: f64,
    pub n_ct: f64,
    pub n_r1: f64,
}

impl ReducedState {
    pub fn new(zeta: f64, delta_phi: f64, n_ct: f64, n_r1: f64) -> Self {
        Self { zeta, delta_phi, n_ct, n_r1 }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.zeta, self.delta_phi, self.n_ct, self.n_r1]
    }

    pub fn from_array(y: &[f64; 4]) -> Self {
        Self::new(y[0], y[1], y[2], y[3])
    }

    /// Interaction-to-tunneling ratio `U_mean N_cT / (2 J)`.
    pub fn lambda(&self, params: &ModelParams) -> f64 {
        params.u_mean() * self.n_ct / (2.0 * params.j_coupling)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let mut w = phi.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

pub fn onsite_energies(params: &ModelParams, state: &FullState) -> OnSiteEnergies {
    let (v1_r, v2_r) = params.real_potentials(state.n_r1);
    let v1_i = params.v1_imag(state.n_r1);
    let v2_i = params.v2_imag();
    let e1 = Complex64::new(params.eps1 + v1_r + params.u1 * state.n_c1(), v1_i);
    let e2 = Complex64::new(params.eps2 + v2_r + params.u2 * state.n_c2(), v2_i);
    OnSiteEnergies {
        e1,
        e2,
        v1_i,
        v2_i,
        v12_r: params.eps1 - params.eps2 + v1_r - v2_r,
    }
}

/// Right-hand side of `i dPsi/dt = H Psi` and the site-1 reservoir rate equation.
pub fn gpe_rhs(params: &ModelParams, state: &FullState) -> FullRate {
    let en = onsite_energies(params, state);
    let k = params.coupling();
    let i = Complex64::i();
    let h_psi1 = en.e1 * state.psi1 - k * state.psi2;
    let h_psi2 = en.e2 * state.psi2 - k * state.psi1;
    let dn_r1 = params.pump_p1
        - params.gamma_r1 * state.n_r1
        - params.scattering(state.n_r1) * state.n_c1();
    FullRate {
        dpsi1: -i * h_psi1,
        dpsi2: -i * h_psi2,
        dn_r1,
    }
}

pub fn reduced_from_full(state: &FullState) -> Result<ReducedState> {
    let n1 = state.n_c1();
    let n2 = state.n_c2();
    let n_ct = n1 + n2;
    if n_ct <= 0.0 {
        return Err(Error::ZeroCondensate);
    }
    let delta_phi = wrap_phase(state.psi2.arg() - state.psi1.arg());
    Ok(ReducedState::new((n1 - n2) / n_ct, delta_phi, n_ct, state.n_r1))
}
