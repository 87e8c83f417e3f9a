//! Reduced equations of motion in `(zeta, delta_phi, N_cT, N_R1)` and linear
//! stability of stationary states.
//!
//! Growth rates `lambda` describe deviations `~ exp(lambda t)`; a fluctuation
//! frequency `omega` corresponds to `lambda = -i omega`, so `max Re lambda`
//! equals the largest imaginary part of the fluctuation spectrum.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{gpe_rhs, FullState, ModelParams, ReducedState};
use crate::spectrum::non_condensed_spectrum;
use crate::stationary::{Branch, StationaryState};

/// Verdict band on `max Re lambda`.
pub const STABILITY_TOL: f64 = 1e-9;

/// Largest reduced-velocity norm accepted as a fixed point by [`classify`].
pub const FIXED_POINT_TOL: f64 = 1e-6;

/// Time derivative of a [`ReducedState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedRate {
    pub dzeta: f64,
    pub ddelta_phi: f64,
    pub dn_ct: f64,
    pub dn_r1: f64,
}

impl ReducedRate {
    pub fn to_array(&self) -> [f64; 4] {
        [self.dzeta, self.ddelta_phi, self.dn_ct, self.dn_r1]
    }

    pub fn norm(&self) -> f64 {
        self.to_array().iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Reduced equations of motion. With `radiative_gamma = 0` these are the
/// standard pumped-junction equations; a nonzero imaginary tunneling adds the
/// `Gamma cos(delta_phi)` / `Gamma sin(delta_phi)` terms of the same
/// change of variables.
pub fn reduced_rhs(params: &ModelParams, s: &ReducedState) -> Result<ReducedRate> {
    if !(s.zeta.abs() < 1.0 - 1e-12) {
        return Err(Error::ChartSingularity { zeta: s.zeta });
    }
    let j = params.j_coupling;
    let g = params.radiative_gamma;
    let root = (1.0 - s.zeta * s.zeta).sqrt();
    let (sin, cos) = s.delta_phi.sin_cos();
    let v1_i = params.v1_imag(s.n_r1);
    let v2_i = params.v2_imag();
    let v12_i = v1_i - v2_i;
    let v_mean_i = 0.5 * (v1_i + v2_i);
    let u_mean = params.u_mean();
    let u12 = params.u1 - params.u2;

    let dzeta = v12_i * root * root - 2.0 * j * root * sin + 2.0 * g * s.zeta * root * cos;
    let ddelta_phi = params.effective_detuning(s.n_r1)
        + (0.5 * u12 + u_mean * s.zeta) * s.n_ct
        + 2.0 * j * s.zeta / root * cos
        + 2.0 * g * sin / root;
    let dn_ct = (2.0 * v_mean_i + v12_i * s.zeta - 2.0 * g * root * cos) * s.n_ct;
    let dn_r1 = params.pump_p1
        - params.gamma_r1 * s.n_r1
        - params.scattering(s.n_r1) * s.n_ct * 0.5 * (1.0 + s.zeta);
    Ok(ReducedRate { dzeta, ddelta_phi, dn_ct, dn_r1 })
}

/// Rate of `(zeta, delta_phi, N_cT, N_R1)` obtained by pushing the full-model
/// rates through the change of variables.
pub fn projected_full_rate(params: &ModelParams, s: &FullState) -> Result<ReducedRate> {
    let r = gpe_rhs(params, s);
    let (n1, n2) = (s.n_c1(), s.n_c2());
    let n = n1 + n2;
    if n1 <= 0.0 || n2 <= 0.0 {
        return Err(Error::ZeroCondensate);
    }
    let dn1 = 2.0 * (s.psi1.conj() * r.dpsi1).re;
    let dn2 = 2.0 * (s.psi2.conj() * r.dpsi2).re;
    let dphi1 = (r.dpsi1 / s.psi1).im;
    let dphi2 = (r.dpsi2 / s.psi2).im;
    let dn = dn1 + dn2;
    Ok(ReducedRate {
        dzeta: (dn1 - dn2) / n - (n1 - n2) * dn / (n * n),
        ddelta_phi: dphi2 - dphi1,
        dn_ct: dn,
        dn_r1: r.dn_r1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianEstimate {
    /// Row `i` holds the partial derivatives of the `i`-th rate.
    pub matrix: [[f64; 4]; 4],
    /// Step-halving disagreement above `1e-5` relative.
    pub low_confidence: bool,
}

fn central_difference(params: &ModelParams, s: &ReducedState, scale: f64) -> Result<[[f64; 4]; 4]> {
    let x = s.to_array();
    let mut m = [[0.0; 4]; 4];
    for col in 0..4 {
        let h = scale * 1e-7f64.max(1e-7 * x[col].abs());
        let mut up = x;
        let mut dn = x;
        up[col] += h;
        dn[col] -= h;
        let fu = reduced_rhs(params, &ReducedState::from_array(&up))?.to_array();
        let fd = reduced_rhs(params, &ReducedState::from_array(&dn))?.to_array();
        for row in 0..4 {
            m[row][col] = (fu[row] - fd[row]) / (2.0 * h);
        }
    }
    Ok(m)
}

/// Finite-difference Jacobian of [`reduced_rhs`] with a Richardson
/// half-step correction.
pub fn jacobian(params: &ModelParams, s: &ReducedState) -> Result<JacobianEstimate> {
    let coarse = central_difference(params, s, 1.0)?;
    let fine = central_difference(params, s, 0.5)?;
    let mut matrix = [[0.0; 4]; 4];
    let mut diff: f64 = 0.0;
    let mut size: f64 = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            matrix[r][c] = (4.0 * fine[r][c] - coarse[r][c]) / 3.0;
            diff = diff.max((fine[r][c] - coarse[r][c]).abs());
            size = size.max(fine[r][c].abs());
        }
    }
    Ok(JacobianEstimate { matrix, low_confidence: diff > 1e-5 * size.max(f64::MIN_POSITIVE) })
}

/// Eigenvalues of a real 4x4 matrix (real Schur decomposition).
pub fn eigenvalues(m: &[[f64; 4]; 4]) -> [Complex64; 4] {
    let mat = Matrix4::from_fn(|r, c| m[r][c]);
    let ev = mat.complex_eigenvalues();
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (o, e) in out.iter_mut().zip(ev.iter()) {
        *o = Complex64::new(e.re, e.im);
    }
    out.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Marginal,
    Unstable,
}

impl Stability {
    pub fn from_growth(max_growth: f64) -> Self {
        if max_growth < -STABILITY_TOL {
            Stability::Stable
        } else if max_growth <= STABILITY_TOL {
            Stability::Marginal
        } else {
            Stability::Unstable
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Marginal => "marginal",
            Stability::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    /// Growth rates, sorted by decreasing real part.
    pub eigenvalues: [Complex64; 4],
    pub max_growth: f64,
    pub class: Stability,
    pub low_confidence: bool,
}

impl StabilityVerdict {
    fn from_eigenvalues(eigenvalues: [Complex64; 4], low_confidence: bool) -> Self {
        let max_growth = eigenvalues.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
        Self { eigenvalues, max_growth, class: Stability::from_growth(max_growth), low_confidence }
    }

    pub fn is_stable(&self) -> bool {
        self.class == Stability::Stable
    }
}

/// Linear stability of a stationary state at its own pumping.
///
/// For the non-condensed state the reduced chart is singular, so the growth
/// rates are `-i omega` of the non-condensed fluctuation spectrum and their
/// conjugates.
pub fn classify(params: &ModelParams, st: &StationaryState) -> Result<StabilityVerdict> {
    let p = params.with_pump(st.p1);
    if st.branch == Branch::NonCondensed {
        let modes = non_condensed_spectrum(&p, st.n_r1);
        let minus_i = Complex64::new(0.0, -1.0);
        let a = minus_i * modes.omega_plus;
        let b = minus_i * modes.omega_minus;
        let mut ev = [a, b, a.conj(), b.conj()];
        ev.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
        return Ok(StabilityVerdict::from_eigenvalues(ev, false));
    }
    let s = ReducedState::new(st.zeta, st.delta_phi, st.n_ct(), st.n_r1);
    let residual = reduced_rhs(&p, &s)?.norm();
    if !(residual <= FIXED_POINT_TOL) {
        return Err(Error::NotAFixedPoint { residual });
    }
    let jac = jacobian(&p, &s)?;
    Ok(StabilityVerdict::from_eigenvalues(eigenvalues(&jac.matrix), jac.low_confidence))
}

/// Classifies every state in place; states that fail classification keep
/// `stability = None`.
pub fn classify_all(params: &ModelParams, states: &mut [StationaryState]) {
    for st in states.iter_mut() {
        st.stability = classify(params, st).ok();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stationary::pt_symmetric_states;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pt_point_is_stationary() {
        let p = ModelParams::default();
        let s = ReducedState::new(0.0, std::f64::consts::PI / 6.0, 10.0, 20.0);
        let r = reduced_rhs(&p, &s).unwrap();
        for v in r.to_array() {
            assert!(v.abs() < 1e-10, "{r:?}");
        }
    }

    #[test]
    fn pure_gain_imbalance_drive() {
        let p = ModelParams::default().with_coupling(0.0);
        let s = ReducedState::new(0.0, 0.0, 3.0, 15.0);
        let r = reduced_rhs(&p, &s).unwrap();
        assert_abs_diff_eq!(r.dzeta, p.v12_imag(15.0), epsilon = 1e-15);
    }

    #[test]
    fn chart_edge_is_rejected() {
        let p = ModelParams::default();
        let s = ReducedState::new(1.0, 0.0, 3.0, 15.0);
        assert!(matches!(reduced_rhs(&p, &s), Err(Error::ChartSingularity { .. })));
    }

    #[test]
    fn reservoir_diagonal_entry() {
        let p = ModelParams::default();
        let s = ReducedState::new(0.3, 1.0, 7.0, 12.0);
        let j = jacobian(&p, &s).unwrap();
        let expect = -p.gamma_r1 - p.r1_prime * s.n_ct * 0.5 * (1.0 + s.zeta);
        assert_abs_diff_eq!(j.matrix[3][3], expect, epsilon = 1e-9);
        assert!(!j.low_confidence);
    }

    #[test]
    fn eigenvalues_of_rotation_block() {
        let m = [[0.0, -2.0, 0.0, 0.0], [2.0, 0.0, 0.0, 0.0], [0.0, 0.0, -1.0, 0.0], [0.0, 0.0, 0.0, -3.0]];
        let ev = eigenvalues(&m);
        assert_abs_diff_eq!(ev[0].re, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[0].im.abs(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[3].re, -3.0, epsilon = 1e-12);
    }

    #[test]
    fn pt_bonding_is_stable_at_p11() {
        let p = ModelParams::default();
        let [minus, _] = pt_symmetric_states(&p, 11.0).unwrap();
        let v = classify(&p, &minus).unwrap();
        assert!(v.is_stable(), "{v:?}");
    }

    #[test]
    fn rejects_non_fixed_point() {
        let p = ModelParams::default();
        let [mut minus, _] = pt_symmetric_states(&p, 11.0).unwrap();
        minus.n_r1 += 1.0;
        assert!(matches!(classify(&p, &minus), Err(Error::NotAFixedPoint { .. })));
    }

    #[test]
    fn marginal_band() {
        assert_eq!(Stability::from_growth(-1e-3), Stability::Stable);
        assert_eq!(Stability::from_growth(5e-10), Stability::Marginal);
        assert_eq!(Stability::from_growth(-5e-10), Stability::Marginal);
        assert_eq!(Stability::from_growth(1e-6), Stability::Unstable);
    }
}
