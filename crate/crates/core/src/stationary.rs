//! Stationary condensate states: `Psi(t) = Psi(0) exp(-i Omega t)` with real
//! `Omega` and a constant reservoir.
//!
//! Imbalanced states are parametrized by the stimulated scattering rate
//! `R1 = R1' N_R1`. Particle balance on both sites fixes
//! `N_c2 = (R1 - gamma1) / gamma2 * N_c1`, and the reservoir equation fixes
//! the pumping `P1 = gamma_R1 N_R1 + R1 N_c1`. The remaining condition is that
//! one eigenvalue of the two-mode Hamiltonian is real.
//!
//! At fixed pumping, `N_c1` is a known function of `R1`, so every condensed
//! state is a root of a scalar function of `R1`; those roots are bracketed by
//! a sign-change scan and refined by bisection.

use num_complex::Complex64;
use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{gpe_rhs, onsite_energies, wrap_phase, FullState, ModelParams};
use crate::roots::{linspace, logspace, scan_roots};
use crate::spectrum::{non_condensed_spectrum, two_mode_eigenvalues};
use crate::stability::StabilityVerdict;

/// Largest `|Im Omega|` (meV) accepted for a root; larger values are jumps of
/// the principal square root, not zeros.
const IM_OMEGA_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    NonCondensed,
    PtBonding,
    PtAntibonding,
    SelfTrapped,
    Untrapped,
}

impl Branch {
    pub const ALL: [Branch; 5] = [
        Branch::NonCondensed,
        Branch::PtBonding,
        Branch::PtAntibonding,
        Branch::SelfTrapped,
        Branch::Untrapped,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::NonCondensed => "non_condensed",
            Branch::PtBonding => "pt_bonding",
            Branch::PtAntibonding => "pt_antibonding",
            Branch::SelfTrapped => "self_trapped",
            Branch::Untrapped => "untrapped",
        }
    }

    pub fn is_condensed(&self) -> bool {
        *self != Branch::NonCondensed
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which eigenvalue of the two-mode Hamiltonian is required to be real.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenBranch {
    /// Larger real part (antibonding-like).
    Plus,
    /// Smaller real part (bonding-like).
    Minus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryState {
    pub branch: Branch,
    pub omega: f64,
    pub n_c1: f64,
    pub n_c2: f64,
    pub n_r1: f64,
    pub delta_phi: f64,
    pub p1: f64,
    pub zeta: f64,
    pub stability: Option<StabilityVerdict>,
}

impl StationaryState {
    pub fn n_ct(&self) -> f64 {
        self.n_c1 + self.n_c2
    }

    /// Amplitudes with `phi1 = 0`.
    pub fn full_state(&self) -> FullState {
        FullState::new(
            Complex64::new(self.n_c1.sqrt(), 0.0),
            Complex64::from_polar(self.n_c2.sqrt(), self.delta_phi),
            self.n_r1,
        )
    }

    /// `(|dPsi/dt + i Omega Psi|, |dN_R1/dt|)` at the state's own pumping.
    pub fn residual(&self, params: &ModelParams) -> (f64, f64) {
        let p = params.with_pump(self.p1);
        let s = self.full_state();
        let r = gpe_rhs(&p, &s);
        let i_omega = Complex64::new(0.0, self.omega);
        let d1 = r.dpsi1 + i_omega * s.psi1;
        let d2 = r.dpsi2 + i_omega * s.psi2;
        ((d1.norm_sqr() + d2.norm_sqr()).sqrt(), r.dn_r1.abs())
    }

    pub fn is_stable(&self) -> Option<bool> {
        self.stability.as_ref().map(|v| v.is_stable())
    }
}

fn stationary_preconditions(params: &ModelParams) -> Result<()> {
    params.validate()?;
    if params.radiative_gamma != 0.0 {
        return Err(Error::RadiativeCouplingUnsupported("the stationary-state solver"));
    }
    if params.gamma2 <= 0.0 || params.r1_prime <= 0.0 || params.gamma_r1 <= 0.0 {
        return Err(Error::InvalidParams(
            "stationary states need gamma2 > 0, r1_prime > 0 and gamma_r1 > 0".into(),
        ));
    }
    if params.j_coupling <= 0.0 {
        return Err(Error::InvalidParams("stationary states need j_coupling > 0".into()));
    }
    Ok(())
}

/// Two-mode eigenvalues on the balance manifold at `(N_c1, R1)`.
fn eigen_at(params: &ModelParams, n_c1: f64, r1: f64, p1: f64) -> (Complex64, Complex64, Complex64) {
    let n_c2 = (r1 - params.gamma1) / params.gamma2 * n_c1;
    let s = FullState::new(
        Complex64::new(n_c1.max(0.0).sqrt(), 0.0),
        Complex64::new(n_c2.max(0.0).sqrt(), 0.0),
        r1 / params.r1_prime,
    );
    let en = onsite_energies(&params.with_pump(p1), &s);
    let (plus, minus) = two_mode_eigenvalues(en.e1, en.e2, params.coupling());
    (plus, minus, en.e1)
}

fn pick(pair: (Complex64, Complex64, Complex64), which: EigenBranch) -> Complex64 {
    match which {
        EigenBranch::Plus => pair.0,
        EigenBranch::Minus => pair.1,
    }
}

fn state_from_root(
    params: &ModelParams,
    n_c1: f64,
    r1: f64,
    p1: f64,
    which: EigenBranch,
    branch: Branch,
) -> StationaryState {
    let pair = eigen_at(params, n_c1, r1, p1);
    let omega = pick(pair, which).re;
    let ratio = (pair.2 - omega) / params.coupling();
    let n_c2 = (r1 - params.gamma1) / params.gamma2 * n_c1;
    let n_ct = n_c1 + n_c2;
    StationaryState {
        branch,
        omega,
        n_c1,
        n_c2,
        n_r1: r1 / params.r1_prime,
        delta_phi: wrap_phase(ratio.arg()),
        p1,
        zeta: (n_c1 - n_c2) / n_ct,
        stability: None,
    }
}

/// Whether the PT construction applies: equal charging energies and zero
/// effective detuning at the PT reservoir level.
pub fn is_pt_symmetric_model(params: &ModelParams) -> bool {
    params.u1 == params.u2
        && params.radiative_gamma == 0.0
        && params.effective_detuning(params.pt_reservoir()) == 0.0
}

/// The equal-population pair born on `R1(N_R1) = gamma1 + gamma2`, returned
/// as `[bonding (Omega-), antibonding (Omega+)]`.
pub fn pt_symmetric_states(params: &ModelParams, p1: f64) -> Result<[StationaryState; 2]> {
    stationary_preconditions(params)?;
    if params.u1 != params.u2 {
        return Err(Error::NotPtSymmetric(format!("U1 = {} != U2 = {}", params.u1, params.u2)));
    }
    let n_r1 = params.pt_reservoir();
    let detuning = params.effective_detuning(n_r1);
    if detuning != 0.0 {
        return Err(Error::NotPtSymmetric(format!("effective detuning {detuning} meV")));
    }
    let limit = 0.25 * params.gamma2 * params.gamma2;
    let j_sq = params.j_coupling * params.j_coupling;
    if j_sq < limit * (1.0 - 1e-12) {
        return Err(Error::PtBroken { j_sq, limit });
    }
    let p_onset = params.gamma_r1 * n_r1;
    if p1 < p_onset * (1.0 - 1e-14) {
        return Err(Error::BelowThreshold { p1, p_onset });
    }
    let r1 = params.scattering(n_r1);
    let n_c = ((p1 - p_onset) / r1).max(0.0);
    let p = params.with_pump(p1);
    let s = FullState::new(
        Complex64::new(n_c.sqrt(), 0.0),
        Complex64::new(n_c.sqrt(), 0.0),
        n_r1,
    );
    let en = onsite_energies(&p, &s);
    let centre = 0.5 * (en.e1.re + en.e2.re);
    let split = (j_sq - limit).max(0.0).sqrt();
    let make = |omega: f64, branch: Branch| {
        // First row of (H - Omega) Psi = 0 gives Psi2 / Psi1 = (E1 - Omega) / J.
        let ratio = (en.e1 - omega) / params.coupling();
        StationaryState {
            branch,
            omega,
            n_c1: n_c,
            n_c2: n_c,
            n_r1,
            delta_phi: wrap_phase(ratio.arg()),
            p1,
            zeta: 0.0,
            stability: None,
        }
    };
    Ok([make(centre - split, Branch::PtBonding), make(centre + split, Branch::PtAntibonding)])
}

/// Coupling at which the two PT states coalesce.
pub fn exceptional_point(params: &ModelParams) -> f64 {
    0.5 * params.gamma2
}

/// Settings of the sign-change scan in `N_c1` used by [`branches_vs_r1`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub points: usize,
    /// Upper end of the scan; `None` uses `10 P1 / gamma2 + 100`.
    pub n_max: Option<f64>,
    pub rel_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { points: 2000, n_max: None, rel_tol: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum R1Outcome {
    Found(Vec<StationaryState>),
    NoRoot,
    /// Zero-detuning line `R1 = gamma1 + gamma2`, where every `N_c1` gives a
    /// real eigenvalue (the PT pair for all pumpings).
    DegeneratePtLine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct R1Point {
    pub r1: f64,
    pub outcome: R1Outcome,
}

/// Stationary states of one eigen-branch for each stimulated scattering rate.
pub fn branches_vs_r1(
    params: &ModelParams,
    which: EigenBranch,
    r1_grid: &[f64],
    scan: &ScanOptions,
) -> Result<Vec<R1Point>> {
    stationary_preconditions(params)?;
    let n_max = scan
        .n_max
        .unwrap_or(10.0 * params.pump_p1.max(0.0) / params.gamma2 + 100.0);
    let n_grid = logspace(n_max * 1e-9, n_max, scan.points.max(2));
    let r_pt = params.gamma1 + params.gamma2;
    let points = r1_grid
        .iter()
        .map(|&r1| {
            if !(r1 > params.gamma1) {
                return R1Point { r1, outcome: R1Outcome::NoRoot };
            }
            if is_pt_symmetric_model(params) && (r1 - r_pt).abs() <= 1e-12 * r_pt {
                return R1Point { r1, outcome: R1Outcome::DegeneratePtLine };
            }
            let pump_of = |n: f64| params.gamma_r1 * r1 / params.r1_prime + r1 * n;
            let f = |n: f64| pick(eigen_at(params, n, r1, pump_of(n)), which).im;
            let states: Vec<StationaryState> = scan_roots(f, &n_grid, scan.rel_tol)
                .into_iter()
                .filter(|&n| n > 0.0 && f(n).abs() <= IM_OMEGA_TOL && pump_of(n) >= 0.0)
                .map(|n| {
                    let p1 = pump_of(n);
                    let branch = label(params, n, r1, p1, which);
                    state_from_root(params, n, r1, p1, which, branch)
                })
                .collect();
            let outcome = if states.is_empty() { R1Outcome::NoRoot } else { R1Outcome::Found(states) };
            R1Point { r1, outcome }
        })
        .collect();
    Ok(points)
}

/// Labels a root by the shape of its stationary curve `P1(R1)`.
///
/// Bonding-like roots are PT-like bonding states. For antibonding-like roots,
/// a rising `P1(R1)` marks the untrapped side of the fold; a falling one is
/// self-trapped below the PT line and PT-like antibonding above it.
fn label(params: &ModelParams, n_c1: f64, r1: f64, p1: f64, which: EigenBranch) -> Branch {
    if which == EigenBranch::Minus {
        return Branch::PtBonding;
    }
    let slope = pumping_slope(params, n_c1, r1, p1);
    if slope > 0.0 {
        Branch::Untrapped
    } else if r1 < params.gamma1 + params.gamma2 {
        Branch::SelfTrapped
    } else {
        Branch::PtAntibonding
    }
}

/// `dP1/dR1` along the antibonding stationary curve, from the implicit
/// derivative of `Im Omega+(N_c1, R1) = 0`.
fn pumping_slope(params: &ModelParams, n_c1: f64, r1: f64, p1: f64) -> f64 {
    let f = |n: f64, r: f64| eigen_at(params, n, r, p1).0.im;
    let hn = 1e-6 * n_c1.max(1e-12);
    let hr = 1e-6 * (r1 - params.gamma1);
    let f_n = (f(n_c1 + hn, r1) - f(n_c1 - hn, r1)) / (2.0 * hn);
    let f_r = (f(n_c1, r1 + hr) - f(n_c1, r1 - hr)) / (2.0 * hr);
    let dn_dr = -f_r / f_n;
    params.gamma_r1 / params.r1_prime + n_c1 + r1 * dn_dr
}

/// The `Psi = 0` state at pumping `p1`.
pub fn non_condensed_state(params: &ModelParams, p1: f64) -> StationaryState {
    let n_r1 = if params.gamma_r1 > 0.0 { p1 / params.gamma_r1 } else { 0.0 };
    let modes = non_condensed_spectrum(&params.with_pump(p1), n_r1);
    StationaryState {
        branch: Branch::NonCondensed,
        omega: modes.leading().re,
        n_c1: 0.0,
        n_c2: 0.0,
        n_r1,
        delta_phi: 0.0,
        p1,
        zeta: 0.0,
        stability: None,
    }
}

/// Scan grid in `R1` on `(gamma1, r_top)`, refined near both ends and around
/// the PT line where the roots crowd together.
fn r1_scan_grid(params: &ModelParams, r_top: f64) -> Vec<f64> {
    let g1 = params.gamma1;
    let width = r_top - g1;
    let mut grid: Vec<f64> = logspace(width * 1e-13, width, 1500)
        .into_iter()
        .map(|u| g1 + u)
        .collect();
    grid.extend(logspace(width * 1e-13, width, 600).into_iter().map(|u| r_top - u));
    grid.extend(linspace(g1, r_top, 2002).into_iter().skip(1).take(2000));
    let r_pt = g1 + params.gamma2;
    if r_pt > g1 && r_pt < r_top {
        let reach = (r_pt - g1).min(r_top - r_pt);
        for d in logspace(reach * 1e-12, reach, 600) {
            grid.push(r_pt - d);
            grid.push(r_pt + d);
        }
    }
    grid.retain(|r| *r > g1 && *r < r_top);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

fn same_state(a: &StationaryState, b: &StationaryState) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-6 * x.abs().max(y.abs()).max(1.0);
    close(a.n_c1, b.n_c1) && close(a.n_c2, b.n_c2) && close(a.omega, b.omega)
}

/// Every stationary state at pumping `p1`: the non-condensed state, the PT
/// pair when it applies, and all imbalanced roots of both eigen-branches.
pub fn all_states_at_pumping(params: &ModelParams, p1: f64) -> Result<Vec<StationaryState>> {
    stationary_preconditions(params)?;
    if !(p1 >= 0.0) {
        return Err(Error::InvalidParams(format!("pumping must be >= 0, got {p1}")));
    }
    let params = params.with_pump(p1);
    let mut states = vec![non_condensed_state(&params, p1)];

    if is_pt_symmetric_model(&params) {
        if let Ok(pair) = pt_symmetric_states(&params, p1) {
            states.extend(pair.into_iter().filter(|s| s.n_c1 > 0.0));
        }
    }

    let r_top = params.r1_prime * p1 / params.gamma_r1;
    if r_top > params.gamma1 {
        let grid = r1_scan_grid(&params, r_top);
        let n_of = |r1: f64| (p1 - params.gamma_r1 * r1 / params.r1_prime) / r1;
        for which in [EigenBranch::Plus, EigenBranch::Minus] {
            let f = |r1: f64| pick(eigen_at(&params, n_of(r1), r1, p1), which).im;
            for r1 in scan_roots(f, &grid, 1e-15) {
                let n = n_of(r1);
                if !(n > 0.0) || f(r1).abs() > IM_OMEGA_TOL {
                    continue;
                }
                let branch = label(&params, n, r1, p1, which);
                let candidate = state_from_root(&params, n, r1, p1, which, branch);
                if !states.iter().any(|s| same_state(s, &candidate)) {
                    states.push(candidate);
                }
            }
        }
    }

    states.sort_by(|a, b| {
        a.branch
            .cmp(&b.branch)
            .then(a.n_c1.partial_cmp(&b.n_c1).unwrap_or(Ordering::Equal))
    });
    Ok(states)
}
