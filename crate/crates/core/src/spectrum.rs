//! Fluctuation spectrum of the non-condensed state and the threshold pumping.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{onsite_energies, FullState, ModelParams};
use crate::roots::bisect_predicate;

/// Eigenvalues of `[[e1, -k], [-k, e2]]`, ordered so that `.0` has the larger
/// real part (ties: larger imaginary part). The principal square root gives
/// exactly this ordering.
pub fn two_mode_eigenvalues(e1: Complex64, e2: Complex64, k: Complex64) -> (Complex64, Complex64) {
    let mean = 0.5 * (e1 + e2);
    let half = 0.5 * (e1 - e2);
    let root = (half * half + k * k).sqrt();
    (mean + root, mean - root)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonCondensedSpectrum {
    pub omega_plus: Complex64,
    pub omega_minus: Complex64,
}

impl NonCondensedSpectrum {
    pub fn max_imag(&self) -> f64 {
        self.omega_plus.im.max(self.omega_minus.im)
    }

    /// The mode with the largest growth rate.
    pub fn leading(&self) -> Complex64 {
        if self.omega_plus.im >= self.omega_minus.im {
            self.omega_plus
        } else {
            self.omega_minus
        }
    }
}

/// Linear spectrum around `Psi = 0` at reservoir level `n_r1`.
pub fn non_condensed_spectrum(params: &ModelParams, n_r1: f64) -> NonCondensedSpectrum {
    let en = onsite_energies(params, &FullState::empty(n_r1));
    let (omega_plus, omega_minus) = two_mode_eigenvalues(en.e1, en.e2, params.coupling());
    NonCondensedSpectrum { omega_plus, omega_minus }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub p_th: f64,
    pub n_r_th: f64,
}

/// Smallest reservoir number at which the non-condensed state stops decaying,
/// mapped to pumping through `P = gamma_R1 N_R1`.
pub fn threshold_pumping(params: &ModelParams) -> Result<Threshold> {
    params.validate()?;
    if params.r1_prime <= 0.0 {
        return Err(Error::InvalidParams("threshold needs r1_prime > 0".into()));
    }
    if params.gamma1 <= 0.0 && params.gamma2 <= 0.0 {
        return Err(Error::InvalidParams("threshold needs gamma1 > 0 or gamma2 > 0".into()));
    }
    let lo = params.gamma1 / params.r1_prime;
    let hi = (params.gamma1 + params.gamma2) / params.r1_prime;
    // Round-off slack on Im(omega) so the saturated case (zero exactly at `hi`)
    // is not rejected.
    let scale = params.gamma1.max(params.gamma2).max(params.j_coupling);
    let slack = 1e-14 * scale;
    let pred = |n: f64| non_condensed_spectrum(params, n).max_imag() >= -slack;
    match bisect_predicate(pred, lo, hi, 1e-15) {
        Some(n_r_th) => Ok(Threshold { p_th: params.gamma_r1 * n_r_th, n_r_th }),
        None => Err(Error::NoThreshold {
            lo,
            hi,
            max_im_at_hi: non_condensed_spectrum(params, hi).max_imag(),
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdPoint {
    pub j: f64,
    pub threshold: Result<Threshold>,
}

pub fn threshold_vs_coupling(params: &ModelParams, j_grid: &[f64]) -> Result<Vec<ThresholdPoint>> {
    if j_grid.is_empty() {
        return Err(Error::EmptyInput("j_grid"));
    }
    if let Some(j) = j_grid.iter().find(|j| !(**j >= 0.0)) {
        return Err(Error::InvalidParams(format!("coupling must be >= 0, got {j}")));
    }
    Ok(j_grid
        .iter()
        .map(|&j| ThresholdPoint { j, threshold: threshold_pumping(&params.with_coupling(j)) })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn rates() -> ModelParams {
        ModelParams { gamma1: 0.1, gamma2: 0.1, gamma_r1: 0.5, r1_prime: 0.01, ..Default::default() }
    }

    #[test]
    fn uncoupled_modes_at_single_site_threshold() {
        let s = non_condensed_spectrum(&rates().with_coupling(0.0), 10.0);
        assert_abs_diff_eq!(s.omega_plus.im, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.omega_minus.im, -0.05, epsilon = 1e-15);
    }

    #[test]
    fn coupled_modes_real_at_saturation() {
        let s = non_condensed_spectrum(&rates().with_coupling(0.1), 20.0);
        let w = 0.03f64.sqrt() / 2.0;
        assert_abs_diff_eq!(s.omega_plus.re, w, epsilon = 1e-12);
        assert_abs_diff_eq!(s.omega_minus.re, -w, epsilon = 1e-12);
        assert_abs_diff_eq!(s.omega_plus.im, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.omega_minus.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn unpumped_decay_modes() {
        let p = ModelParams { gamma1: 0.1, gamma2: 0.3, ..rates() }.with_coupling(0.0);
        let s = non_condensed_spectrum(&p, 0.0);
        let mut ims = [s.omega_plus.im, s.omega_minus.im];
        ims.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(ims[0], -0.15, epsilon = 1e-15);
        assert_abs_diff_eq!(ims[1], -0.05, epsilon = 1e-15);
    }

    #[test]
    fn trace_is_preserved() {
        let p = rates().with_detuning(0.3).with_coupling(0.07);
        let s = non_condensed_spectrum(&p, 14.0);
        let en = onsite_energies(&p, &FullState::empty(14.0));
        let d = s.omega_plus + s.omega_minus - en.e1 - en.e2;
        assert!(d.norm() < 1e-15);
        assert!(s.omega_plus.re >= s.omega_minus.re);
    }

    #[test]
    fn single_condensate_threshold() {
        let t = threshold_pumping(&rates().with_coupling(0.0)).unwrap();
        assert_abs_diff_eq!(t.n_r_th, 10.0, epsilon = 1e-10);
        assert_abs_diff_eq!(t.p_th, 5.0, epsilon = 1e-10);
    }

    #[test]
    fn saturated_threshold() {
        for j in [0.1, 1.0] {
            let t = threshold_pumping(&rates().with_coupling(j)).unwrap();
            assert_abs_diff_eq!(t.p_th, 10.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn needs_scattering() {
        let p = ModelParams { r1_prime: 0.0, ..rates() };
        assert!(matches!(threshold_pumping(&p), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn detuning_lowers_threshold() {
        let flat = threshold_pumping(&rates().with_coupling(0.1)).unwrap().p_th;
        let det = threshold_pumping(&rates().with_coupling(0.1).with_detuning(1.0)).unwrap().p_th;
        assert!(det < flat);
        assert!((det - 5.0).abs() < (flat - 5.0).abs());
    }

    #[test]
    fn sweep_over_coupling() {
        let pts = threshold_vs_coupling(&rates(), &[0.0]).unwrap();
        assert_abs_diff_eq!(pts[0].threshold.as_ref().unwrap().p_th, 5.0, epsilon = 1e-10);
        assert!(threshold_vs_coupling(&rates(), &[]).is_err());
        assert!(threshold_vs_coupling(&rates(), &[-0.1]).is_err());
    }
}
