//! Oscillator models: the dissipative pendulum of the self-trapping regime
//! and the current-driven junction of the small-imbalance regime.

use crate::error::{Error, Result};
use crate::model::{ModelParams, ReducedState};

/// Above this depletion the pendulum reduction is flagged as invalid.
pub const PENDULUM_ETA_LIMIT: f64 = 0.3;

/// Above this imbalance the small-imbalance model is flagged as invalid.
pub const JOSEPHSON_ZETA_LIMIT: f64 = 0.2;

/// Pendulum variables; `eta = sqrt(1 - zeta^2)` and `zeta` is replaced by
/// `1 - eta` where it appears outside square roots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendulumState {
    pub delta_phi: f64,
    pub delta_phi_dot: f64,
    pub eta: f64,
    pub n_ct: f64,
    pub n_r1: f64,
}

impl PendulumState {
    /// Starts from a reduced state with the angular velocity of the model.
    pub fn from_reduced(params: &ModelParams, s: &ReducedState) -> Self {
        let eta = (1.0 - s.zeta * s.zeta).max(0.0).sqrt();
        let mut out = Self { delta_phi: s.delta_phi, delta_phi_dot: 0.0, eta, n_ct: s.n_ct, n_r1: s.n_r1 };
        out.delta_phi_dot = angular_velocity(params, &out);
        out
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.delta_phi, self.delta_phi_dot, self.eta, self.n_ct, self.n_r1]
    }

    pub fn from_array(y: &[f64; 5]) -> Self {
        Self { delta_phi: y[0], delta_phi_dot: y[1], eta: y[2], n_ct: y[3], n_r1: y[4] }
    }

    pub fn is_valid(&self) -> bool {
        self.eta <= PENDULUM_ETA_LIMIT
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendulumRate {
    pub ddelta_phi: f64,
    pub ddelta_phi_dot: f64,
    pub deta: f64,
    pub dn_ct: f64,
    pub dn_r1: f64,
    /// `eta <= PENDULUM_ETA_LIMIT`.
    pub valid: bool,
}

impl PendulumRate {
    pub fn to_array(&self) -> [f64; 5] {
        [self.ddelta_phi, self.ddelta_phi_dot, self.deta, self.dn_ct, self.dn_r1]
    }
}

fn equal_charging(params: &ModelParams) -> Result<()> {
    if params.u1 != params.u2 {
        return Err(Error::UnequalCharging { u1: params.u1, u2: params.u2 });
    }
    Ok(())
}

/// `Delta E = eps12 + V12R + U (1 - eta) N_cT`.
pub fn energy_bias(params: &ModelParams, s: &PendulumState) -> f64 {
    params.effective_detuning(s.n_r1) + params.u_mean() * (1.0 - s.eta) * s.n_ct
}

/// First-order angular velocity `Delta E + 2 J ((1 - eta) / eta) cos(delta_phi)`.
pub fn angular_velocity(params: &ModelParams, s: &PendulumState) -> f64 {
    energy_bias(params, s) + 2.0 * params.j_coupling * (1.0 - s.eta) / s.eta * s.delta_phi.cos()
}

/// Second-order phase equation with its slow population and reservoir
/// drive; the `O(eta)` remainder is dropped.
pub fn pendulum_rhs(params: &ModelParams, s: &PendulumState) -> Result<PendulumRate> {
    equal_charging(params)?;
    if !(s.eta > 0.0) {
        return Err(Error::ChartSingularity { zeta: 1.0 - s.eta });
    }
    let j = params.j_coupling;
    let v12_i = params.v12_imag(s.n_r1);
    let v_mean_i = 0.5 * (params.v1_imag(s.n_r1) + params.v2_imag());
    let zeta = 1.0 - s.eta;
    let dn_ct = (2.0 * v_mean_i + v12_i * zeta) * s.n_ct;
    let ddelta_phi_dot = params.u_mean() * dn_ct
        - 2.0 * j * (zeta / s.eta) * s.delta_phi.sin() * s.delta_phi_dot
        - 2.0 * j * j / s.eta * (2.0 * s.delta_phi).sin();
    let deta = -zeta * (v12_i * s.eta - 2.0 * j * s.delta_phi.sin());
    let dn_r1 = params.pump_p1
        - params.gamma_r1 * s.n_r1
        - params.scattering(s.n_r1) * s.n_ct * 0.5 * (1.0 + zeta);
    Ok(PendulumRate {
        ddelta_phi: s.delta_phi_dot,
        ddelta_phi_dot,
        deta,
        dn_ct,
        dn_r1,
        valid: s.is_valid(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LockTarget {
    PiLock,
    ZeroLock,
}

impl LockTarget {
    pub fn phase(&self) -> f64 {
        match self {
            LockTarget::PiLock => std::f64::consts::PI,
            LockTarget::ZeroLock => 0.0,
        }
    }
}

/// Lock target of the self-trapped pendulum: `pi` iff
/// `eps12 + V12R + U N_cT > 0`. In self-consistent detuning mode the
/// reservoir is taken at its uncondensed level `P1 / gamma_R1`.
pub fn locking_criterion(params: &ModelParams, n_ct: f64) -> LockTarget {
    let n_r1 = if params.gamma_r1 > 0.0 { params.pump_p1 / params.gamma_r1 } else { 0.0 };
    if params.effective_detuning(n_r1) + params.u_mean() * n_ct > 0.0 {
        LockTarget::PiLock
    } else {
        LockTarget::ZeroLock
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JosephsonRate {
    pub dzeta: f64,
    pub ddelta_phi: f64,
    /// `|zeta| <= JOSEPHSON_ZETA_LIMIT`.
    pub valid: bool,
}

/// Small-imbalance junction driven by the gain imbalance `V12I`, which acts
/// as a d.c. current source; `N_cT` and `N_R1` are frozen. The charging
/// bias `U12 N_cT / 2` is kept so the model agrees with the reduced
/// equations at `zeta = 0` for unequal charging energies.
pub fn josephson_rhs(params: &ModelParams, s: &ReducedState) -> JosephsonRate {
    let v12_i = params.v12_imag(s.n_r1);
    let u12 = params.u1 - params.u2;
    JosephsonRate {
        dzeta: v12_i - 2.0 * params.j_coupling * s.delta_phi.sin(),
        ddelta_phi: params.effective_detuning(s.n_r1) + (0.5 * u12 + params.u_mean() * s.zeta) * s.n_ct,
        valid: s.zeta.abs() <= JOSEPHSON_ZETA_LIMIT,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurrentRegime {
    /// The tunneling current can carry the gain imbalance: a d.c. state exists.
    DcRegime,
    /// The drive exceeds the critical current `2 J`.
    Broken,
}

/// Relative slack so that the boundary `V12I = 2 J` is not lost to rounding.
const CRITICAL_SLACK: f64 = 5e-13;

pub fn critical_current_check(params: &ModelParams, n_r1: f64) -> CurrentRegime {
    if params.v12_imag(n_r1) <= 2.0 * params.j_coupling * (1.0 + CRITICAL_SLACK) {
        CurrentRegime::DcRegime
    } else {
        CurrentRegime::Broken
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn conservative() -> ModelParams {
        ModelParams { gamma1: 0.0, gamma2: 0.0, gamma_r1: 0.0, r1_prime: 0.0, pump_p1: 0.0, ..Default::default() }
    }

    #[test]
    fn pi_is_a_stable_rest_point() {
        let p = conservative();
        let eta = 0.05;
        let at = |phi: f64| PendulumState { delta_phi: phi, delta_phi_dot: 0.0, eta, n_ct: 100.0, n_r1: 0.0 };
        let r = pendulum_rhs(&p, &at(PI)).unwrap();
        assert_abs_diff_eq!(r.ddelta_phi_dot, 0.0, epsilon = 1e-15);
        // Restoring force on both sides of pi; the same offset about 0 is also
        // restoring, and about pi/2 it is repelling.
        let d = 1e-3;
        assert!(pendulum_rhs(&p, &at(PI + d)).unwrap().ddelta_phi_dot < 0.0);
        assert!(pendulum_rhs(&p, &at(PI - d)).unwrap().ddelta_phi_dot > 0.0);
        assert!(pendulum_rhs(&p, &at(PI / 2.0 + d)).unwrap().ddelta_phi_dot > 0.0);
        let k = -(pendulum_rhs(&p, &at(PI + d)).unwrap().ddelta_phi_dot) / d;
        assert_abs_diff_eq!(k, 4.0 * p.j_coupling.powi(2) / eta, epsilon = 1e-6);
    }

    #[test]
    fn drive_is_positive_early() {
        let p = ModelParams::default();
        let s = PendulumState { delta_phi: 0.0, delta_phi_dot: 0.0, eta: 0.1, n_ct: 20.0, n_r1: 40.0 };
        assert!(p.v12_imag(40.0) > 0.0);
        let r = pendulum_rhs(&p, &s).unwrap();
        assert!(p.u_mean() * r.dn_ct > 0.0);
        assert!(r.valid);
    }

    #[test]
    fn pendulum_guards() {
        let p = ModelParams { u2: 0.02, ..Default::default() };
        let s = PendulumState { delta_phi: 0.0, delta_phi_dot: 0.0, eta: 0.1, n_ct: 20.0, n_r1: 40.0 };
        assert!(matches!(pendulum_rhs(&p, &s), Err(Error::UnequalCharging { .. })));
        let s0 = PendulumState { eta: 0.0, ..s };
        assert!(matches!(pendulum_rhs(&ModelParams::default(), &s0), Err(Error::ChartSingularity { .. })));
        let wide = PendulumState { eta: 0.5, ..s };
        assert!(!pendulum_rhs(&ModelParams::default(), &wide).unwrap().valid);
    }

    #[test]
    fn lock_targets() {
        let p = ModelParams::default();
        assert_eq!(locking_criterion(&p, 1.0), LockTarget::PiLock);
        assert_eq!(locking_criterion(&p.with_detuning(1.0), 1.0), LockTarget::PiLock);
        assert_eq!(locking_criterion(&p.with_detuning(-1.0), 10.0), LockTarget::ZeroLock);
        assert_eq!(locking_criterion(&p.with_detuning(-1.0), 500.0), LockTarget::PiLock);
    }

    #[test]
    fn dc_josephson_fixed_point() {
        let p = ModelParams::default();
        let s = ReducedState::new(0.0, PI / 6.0, 10.0, 20.0);
        assert_abs_diff_eq!(p.v12_imag(20.0), 0.1, epsilon = 1e-15);
        let r = josephson_rhs(&p, &s);
        assert_abs_diff_eq!(r.dzeta, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.ddelta_phi, 0.0, epsilon = 1e-15);
        assert!(r.valid);
    }

    #[test]
    fn supercritical_drive_has_no_rest_point() {
        let p = ModelParams::default().with_coupling(0.04);
        for k in 0..64 {
            let phi = -PI + k as f64 * PI / 32.0;
            assert!(josephson_rhs(&p, &ReducedState::new(0.0, phi, 10.0, 20.0)).dzeta > 0.0);
        }
    }

    #[test]
    fn critical_current_regimes() {
        let p = ModelParams::default();
        assert_eq!(critical_current_check(&p, 20.0), CurrentRegime::DcRegime);
        assert_eq!(critical_current_check(&p.with_coupling(0.04), 20.0), CurrentRegime::Broken);
        assert_eq!(critical_current_check(&p.with_coupling(0.05), 20.0), CurrentRegime::DcRegime);
    }
}
