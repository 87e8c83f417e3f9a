//! Time integration of the full and reduced models, steady-state detection,
//! pumping sweeps and basin-of-attraction maps.
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::integrate::{euler_maruyama_step, DormandPrince, Tolerances};
use crate::model::{gpe_rhs, reduced_from_full, wrap_phase, FullState, ModelParams, ReducedState};
use crate::stability::reduced_rhs;
use crate::stationary::{all_states_at_pumping, Branch, StationaryState};

/// Below this total condensate number the phase variables are not tracked.
pub const EMPTY_CONDENSATE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub t_final: f64,
    pub dt_max: f64,
    /// Sampling interval of the returned trajectory.
    pub sample_dt: f64,
    pub noise_sigma: f64,
    pub seed: u64,
    pub tol: Tolerances,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { t_final: 100.0, dt_max: 0.1, sample_dt: 0.1, noise_sigma: 0.0, seed: 0, tol: Tolerances::default() }
    }
}

impl EvolveOptions {
    fn check(&self) -> Result<()> {
        if !(self.t_final > 0.0) || !(self.dt_max > 0.0) || !(self.sample_dt > 0.0) {
            return Err(Error::InvalidParams("t_final, dt_max and sample_dt must be > 0".into()));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::InvalidParams("noise_sigma must be >= 0".into()));
        }
        Ok(())
    }

    fn sample_times(&self) -> Vec<f64> {
        let n = (self.t_final / self.sample_dt).round() as usize;
        let mut ts: Vec<f64> = (1..=n).map(|k| k as f64 * self.sample_dt).filter(|t| *t < self.t_final).collect();
        ts.push(self.t_final);
        ts.dedup();
        ts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<FullState>,
    /// `None` where the condensate is empty. `delta_phi` is unwrapped.
    pub reduced: Vec<Option<ReducedState>>,
}

impl Trajectory {
    fn from_samples(times: Vec<f64>, states: Vec<FullState>) -> Self {
        let mut reduced = Vec::with_capacity(states.len());
        let mut prev: Option<f64> = None;
        for s in &states {
            let r = if s.n_ct() > 0.0 { reduced_from_full(s).ok() } else { None };
            reduced.push(r.map(|mut r| {
                if let Some(p) = prev {
                    r.delta_phi = p + wrap_phase(r.delta_phi - p);
                }
                prev = Some(r.delta_phi);
                r
            }));
        }
        Self { times, states, reduced }
    }

    pub fn last(&self) -> &FullState {
        self.states.last().expect("trajectory has at least one sample")
    }
}

/// Integrates the full model from `init`.
pub fn evolve(params: &ModelParams, init: &FullState, opts: &EvolveOptions) -> Result<Trajectory> {
    params.validate()?;
    opts.check()?;
    if !init.is_valid() {
        return Err(Error::InvalidParams("initial state is not finite or has n_r1 < 0".into()));
    }
    let ts = opts.sample_times();
    let mut states = Vec::with_capacity(ts.len() + 1);
    let mut times = Vec::with_capacity(ts.len() + 1);
    times.push(0.0);
    states.push(*init);
    let mut rhs = |_t: f64, y: &[f64; 5]| gpe_rhs(params, &FullState::from_array(y)).to_array();
    if opts.noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let amp = opts.noise_sigma / 2f64.sqrt();
        let (mut t, mut y) = (0.0, init.to_array());
        for &target in &ts {
            while t < target {
                let h = opts.dt_max.min(target - t);
                let sd = amp * h.sqrt();
                let mut dw = [0.0; 5];
                for v in dw.iter_mut().take(4) {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    *v = sd * g;
                }
                y = euler_maruyama_step(&mut rhs, t, &y, h, &dw);
                y[4] = y[4].max(0.0);
                t = if h == target - t { target } else { t + h };
                if !y.iter().all(|v| v.is_finite()) {
                    return Err(Error::NonFinite { t });
                }
            }
            times.push(target);
            states.push(FullState::from_array(&y));
        }
    } else {
        let mut dp = DormandPrince::new(rhs, 0.0, init.to_array(), opts.dt_max, opts.tol);
        for &target in &ts {
            dp.advance_to(target)?;
            times.push(target);
            states.push(FullState::from_array(&dp.y));
        }
    }
    Ok(Trajectory::from_samples(times, states))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<ReducedState>,
}

/// Integrates the reduced equations; `delta_phi` is continuous by construction.
pub fn evolve_reduced(params: &ModelParams, init: &ReducedState, opts: &EvolveOptions) -> Result<ReducedTrajectory> {
    params.validate()?;
    opts.check()?;
    reduced_rhs(params, init)?;
    let rhs = |_t: f64, y: &[f64; 4]| match reduced_rhs(params, &ReducedState::from_array(y)) {
        Ok(r) => r.to_array(),
        Err(_) => [f64::NAN; 4],
    };
    let mut dp = DormandPrince::new(rhs, 0.0, init.to_array(), opts.dt_max, opts.tol);
    let mut times = vec![0.0];
    let mut states = vec![*init];
    for target in opts.sample_times() {
        if let Err(e) = dp.advance_to(target) {
            let zeta = dp.y[0];
            return Err(if zeta.abs() < 1.0 - 1e-12 { e } else { Error::ChartSingularity { zeta } });
        }
        times.push(target);
        states.push(ReducedState::from_array(&dp.y));
    }
    Ok(ReducedTrajectory { times, states })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SettleOptions {
    pub t_max: f64,
    pub dt_max: f64,
    /// The velocity must stay below `velocity_tol` for this long.
    pub window: f64,
    pub velocity_tol: f64,
    /// Interval between velocity checks.
    pub check_dt: f64,
    /// Relative distance accepted when matching to the stationary catalogue.
    pub match_tol: f64,
    pub tol: Tolerances,
}

impl Default for SettleOptions {
    fn default() -> Self {
        Self {
            t_max: 20_000.0,
            dt_max: 0.5,
            window: 10.0,
            velocity_tol: 1e-8,
            check_dt: 0.5,
            match_tol: 1e-3,
            // Tighter than the trajectory default so that integration error
            // at large N_cT stays below the velocity threshold.
            tol: Tolerances { rtol: 1e-11, atol: 1e-14 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SettleOutcome {
    Converged(FullState),
    NonConvergent(FullState),
}

impl SettleOutcome {
    pub fn state(&self) -> &FullState {
        match self {
            SettleOutcome::Converged(s) | SettleOutcome::NonConvergent(s) => s,
        }
    }

    pub fn converged(&self) -> bool {
        matches!(self, SettleOutcome::Converged(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SettleResult {
    pub outcome: SettleOutcome,
    pub t_end: f64,
    pub matched: Option<StationaryState>,
}

/// Norm of the reduced-variable velocity; only `dN_R1/dt` and the condensate
/// rate when the condensate is empty.
pub fn reduced_velocity(params: &ModelParams, s: &FullState) -> f64 {
    if s.n_ct() < EMPTY_CONDENSATE {
        let r = gpe_rhs(params, s);
        return r.dn_r1.abs().hypot(s.n_ct());
    }
    match reduced_from_full(s).and_then(|r| reduced_rhs(params, &r)) {
        Ok(rate) => rate.norm(),
        Err(_) => {
            // On the chart edge the full-model rates are used with the global
            // phase rotation removed.
            let r = gpe_rhs(params, s);
            let dn1 = 2.0 * (s.psi1.conj() * r.dpsi1).re;
            let dn2 = 2.0 * (s.psi2.conj() * r.dpsi2).re;
            (dn1 * dn1 + dn2 * dn2 + r.dn_r1 * r.dn_r1).sqrt()
        }
    }
}

fn phase_distance(a: f64, b: f64) -> f64 {
    wrap_phase(a - b).abs()
}

/// Largest relative coordinate distance of `s` to a catalogue state.
fn catalogue_distance(s: &FullState, st: &StationaryState) -> f64 {
    let n = s.n_ct();
    let dn = (n - st.n_ct()).abs() / st.n_ct().max(1.0);
    let dr = (s.n_r1 - st.n_r1).abs() / st.n_r1.max(1.0);
    if st.branch == Branch::NonCondensed {
        return dn.max(dr);
    }
    match reduced_from_full(s) {
        Ok(r) => dn.max(dr).max((r.zeta - st.zeta).abs()).max(phase_distance(r.delta_phi, st.delta_phi) / PI),
        Err(_) => f64::INFINITY,
    }
}

/// Nearest catalogue entry within `tol`.
pub fn match_state(s: &FullState, catalogue: &[StationaryState], tol: f64) -> Option<StationaryState> {
    catalogue
        .iter()
        .map(|st| (catalogue_distance(s, st), st))
        .filter(|(d, _)| *d <= tol)
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, st)| st.clone())
}

fn settle_with(
    params: &ModelParams,
    init: &FullState,
    opts: &SettleOptions,
    catalogue: Option<&[StationaryState]>,
) -> Result<SettleResult> {
    let rhs = |_t: f64, y: &[f64; 5]| gpe_rhs(params, &FullState::from_array(y)).to_array();
    let mut dp = DormandPrince::new(rhs, 0.0, init.to_array(), opts.dt_max, opts.tol);
    let mut quiet_since: Option<f64> = None;
    let mut converged = false;
    let mut k = 0u64;
    while dp.t < opts.t_max {
        k += 1;
        let target = (k as f64 * opts.check_dt).min(opts.t_max);
        dp.advance_to(target)?;
        let s = FullState::from_array(&dp.y);
        if reduced_velocity(params, &s) < opts.velocity_tol {
            let since = *quiet_since.get_or_insert(dp.t);
            if dp.t - since >= opts.window {
                converged = true;
                break;
            }
        } else {
            quiet_since = None;
        }
    }
    let end = FullState::from_array(&dp.y);
    let matched = if converged { catalogue.and_then(|c| match_state(&end, c, opts.match_tol)) } else { None };
    let outcome = if converged { SettleOutcome::Converged(end) } else { SettleOutcome::NonConvergent(end) };
    Ok(SettleResult { outcome, t_end: dp.t, matched })
}

/// Integrates until the state stops moving and matches the endpoint to the
/// stationary states at the current pumping.
pub fn settle(params: &ModelParams, init: &FullState, opts: &SettleOptions) -> Result<SettleResult> {
    params.validate()?;
    let catalogue = all_states_at_pumping(params, params.pump_p1).ok();
    settle_with(params, init, opts, catalogue.as_deref())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepDirection {
    Up,
    Down,
}

impl SweepDirection {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepDirection::Up => "up",
            SweepDirection::Down => "down",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepStep {
    pub p1: f64,
    pub n_ct_avg: f64,
    /// `NaN` when the condensate is empty throughout the window.
    pub zeta_avg: f64,
    /// Circular mean; `NaN` when the condensate is empty.
    pub delta_phi_avg: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub direction: SweepDirection,
    pub steps: Vec<SweepStep>,
    pub end_state: FullState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub t_hold: f64,
    /// Fraction of `t_hold` at the end of each step used for averages.
    pub average_fraction: f64,
    pub samples: usize,
    /// Condensate number restored before every up-sweep step whose
    /// condensate has decayed below it.
    pub seed_population: f64,
    pub seed_zeta: f64,
    pub seed_phase: f64,
    pub dt_max: f64,
    /// Relative spread of `N_cT` and `N_R1` in the averaging window below
    /// which a step counts as converged.
    pub converged_spread: f64,
    pub tol: Tolerances,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            t_hold: 3000.0,
            average_fraction: 0.1,
            samples: 64,
            seed_population: 1e-6,
            seed_zeta: 0.6,
            seed_phase: PI,
            dt_max: 0.5,
            converged_spread: 1e-4,
            tol: Tolerances::default(),
        }
    }
}

fn hold_step(params: &ModelParams, init: FullState, opts: &SweepOptions) -> Result<(SweepStep, FullState)> {
    let rhs = |_t: f64, y: &[f64; 5]| gpe_rhs(params, &FullState::from_array(y)).to_array();
    let mut dp = DormandPrince::new(rhs, 0.0, init.to_array(), opts.dt_max, opts.tol);
    let t_avg = opts.t_hold * (1.0 - opts.average_fraction.clamp(0.0, 1.0));
    dp.advance_to(t_avg)?;
    let n = opts.samples.max(1);
    let mut ns = Vec::with_capacity(n);
    let mut rs = Vec::with_capacity(n);
    let mut zetas = Vec::new();
    let (mut cs, mut sn) = (0.0, 0.0);
    for k in 0..n {
        let t = if n == 1 { opts.t_hold } else { t_avg + (opts.t_hold - t_avg) * k as f64 / (n - 1) as f64 };
        dp.advance_to(t)?;
        let s = FullState::from_array(&dp.y);
        ns.push(s.n_ct());
        rs.push(s.n_r1);
        if s.n_ct() >= EMPTY_CONDENSATE {
            if let Ok(r) = reduced_from_full(&s) {
                zetas.push(r.zeta);
                cs += r.delta_phi.cos();
                sn += r.delta_phi.sin();
            }
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let spread = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (hi - lo) / mean(v).abs().max(1.0)
    };
    let n_avg = mean(&ns);
    let (zeta_avg, phi_avg) = if zetas.is_empty() { (f64::NAN, f64::NAN) } else { (mean(&zetas), sn.atan2(cs)) };
    let converged = spread(&ns) <= opts.converged_spread && spread(&rs) <= opts.converged_spread;
    let step = SweepStep { p1: params.pump_p1, n_ct_avg: n_avg, zeta_avg, delta_phi_avg: phi_avg, converged };
    Ok((step, FullState::from_array(&dp.y)))
}

fn check_monotone(grid: &[f64], increasing: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyInput("pumping grid"));
    }
    let ok = grid.windows(2).all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] });
    if !ok || grid.iter().any(|p| !(*p >= 0.0)) {
        return Err(Error::InvalidParams("pumping grids must be strictly monotone and >= 0".into()));
    }
    Ok(())
}

/// Up-sweep from an empty cavity, then a down-sweep continuing from the
/// up-sweep endpoint. Each up step first restores a small condensate seed
/// so an unstable empty state can depart in finite time.
pub fn hysteresis_sweep(
    params: &ModelParams,
    p_up: &[f64],
    p_down: &[f64],
    opts: &SweepOptions,
) -> Result<(SweepResult, SweepResult)> {
    params.validate()?;
    check_monotone(p_up, true)?;
    check_monotone(p_down, false)?;
    if !(opts.t_hold > 0.0) || !(opts.dt_max > 0.0) || !(opts.seed_population >= 0.0) || !(opts.seed_zeta.abs() <= 1.0) {
        return Err(Error::InvalidParams("t_hold, dt_max must be > 0 and seed_population >= 0".into()));
    }
    let mut state = FullState::empty(0.0);
    let mut up = Vec::with_capacity(p_up.len());
    for &p1 in p_up {
        if state.n_ct() < opts.seed_population {
            let seed = ReducedState::new(opts.seed_zeta, opts.seed_phase, opts.seed_population, state.n_r1);
            state = FullState::from_reduced(&seed);
        }
        let (step, end) = hold_step(&params.with_pump(p1), state, opts)?;
        up.push(step);
        state = end;
    }
    let up_end = state;
    let mut down = Vec::with_capacity(p_down.len());
    for &p1 in p_down {
        let (step, end) = hold_step(&params.with_pump(p1), state, opts)?;
        down.push(step);
        state = end;
    }
    Ok((
        SweepResult { direction: SweepDirection::Up, steps: up, end_state: up_end },
        SweepResult { direction: SweepDirection::Down, steps: down, end_state: state },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasinLabel {
    Matched(Branch),
    Unmatched,
    NonConvergent,
}

impl BasinLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            BasinLabel::Matched(b) => b.as_str(),
            BasinLabel::Unmatched => "unmatched",
            BasinLabel::NonConvergent => "non_convergent",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasinMap {
    pub zeta_grid: Vec<f64>,
    pub phi_grid: Vec<f64>,
    /// `labels[i][j]` belongs to `(zeta_grid[i], phi_grid[j])`.
    pub labels: Vec<Vec<BasinLabel>>,
}

impl BasinMap {
    pub fn distinct_labels(&self) -> Vec<BasinLabel> {
        let mut out: Vec<BasinLabel> = Vec::new();
        for l in self.labels.iter().flatten() {
            if !out.contains(l) {
                out.push(*l);
            }
        }
        out
    }
}

/// Settles every `(zeta0, phi0)` cell from `N_cT = n_ct0`, `N_R1 = n_r10`.
pub fn basin_map(
    params: &ModelParams,
    zeta_grid: &[f64],
    phi_grid: &[f64],
    n_ct0: f64,
    n_r10: f64,
    opts: &SettleOptions,
) -> Result<BasinMap> {
    params.validate()?;
    if zeta_grid.is_empty() || phi_grid.is_empty() {
        return Err(Error::EmptyInput("basin grid"));
    }
    if zeta_grid.iter().any(|z| !(z.abs() < 1.0)) || phi_grid.iter().any(|p| !(*p > -PI && *p <= PI)) {
        return Err(Error::InvalidParams("basin grids need zeta in (-1, 1) and phi in (-pi, pi]".into()));
    }
    if !(n_ct0 > 0.0) || !(n_r10 >= 0.0) {
        return Err(Error::InvalidParams("basin map needs n_ct0 > 0 and n_r10 >= 0".into()));
    }
    let catalogue = all_states_at_pumping(params, params.pump_p1)?;
    let cells: Vec<(f64, f64)> = zeta_grid.iter().flat_map(|&z| phi_grid.iter().map(move |&p| (z, p))).collect();
    let flat: Vec<BasinLabel> = cells
        .par_iter()
        .map(|&(z, p)| {
            let init = FullState::from_reduced(&ReducedState::new(z, p, n_ct0, n_r10));
            match settle_with(params, &init, opts, Some(&catalogue)) {
                Ok(r) if r.outcome.converged() => match r.matched {
                    Some(st) => BasinLabel::Matched(st.branch),
                    None => BasinLabel::Unmatched,
                },
                _ => BasinLabel::NonConvergent,
            }
        })
        .collect();
    let labels = flat.chunks(phi_grid.len()).map(|c| c.to_vec()).collect();
    Ok(BasinMap { zeta_grid: zeta_grid.to_vec(), phi_grid: phi_grid.to_vec(), labels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stationary::pt_symmetric_states;
    use num_complex::Complex64;

    #[test]
    fn decoupled_decay_is_exponential() {
        let p = ModelParams::default().with_pump(0.0).with_coupling(0.0);
        let init = FullState::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), 0.0);
        let opts = EvolveOptions { t_final: 50.0, sample_dt: 5.0, ..Default::default() };
        let tr = evolve(&p, &init, &opts).unwrap();
        for (t, s) in tr.times.iter().zip(&tr.states) {
            assert!((s.n_c1() - (-p.gamma1 * t).exp()).abs() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn samples_hit_the_requested_times() {
        let p = ModelParams::default();
        let init = FullState::empty(0.0);
        let opts = EvolveOptions { t_final: 1.05, sample_dt: 0.5, ..Default::default() };
        let tr = evolve(&p, &init, &opts).unwrap();
        assert_eq!(tr.times, vec![0.0, 0.5, 1.0, 1.05]);
        assert!(tr.reduced.iter().all(|r| r.is_none()));
    }

    #[test]
    fn noise_is_seeded() {
        let p = ModelParams::default();
        let init = FullState::empty(20.0);
        let opts = EvolveOptions { t_final: 5.0, noise_sigma: 0.01, seed: 7, ..Default::default() };
        let a = evolve(&p, &init, &opts).unwrap();
        let b = evolve(&p, &init, &opts).unwrap();
        let c = evolve(&p, &init, &EvolveOptions { seed: 8, ..opts }).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.last(), c.last());
        assert!(a.last().n_ct() > 0.0);
    }

    #[test]
    fn unwrapped_phase_has_no_jumps() {
        let p = ModelParams::default().with_detuning(1.0).with_pump(0.0);
        let init = FullState::from_reduced(&ReducedState::new(0.0, 0.0, 10.0, 0.0));
        let tr = evolve(&p, &init, &EvolveOptions { t_final: 30.0, ..Default::default() }).unwrap();
        let phis: Vec<f64> = tr.reduced.iter().map(|r| r.unwrap().delta_phi).collect();
        assert!(phis.windows(2).all(|w| (w[1] - w[0]).abs() < PI));
        assert!(phis.last().unwrap().abs() > 2.0 * PI);
    }

    #[test]
    fn pt_bonding_attracts_small_perturbations() {
        let p = ModelParams::default();
        let [minus, _] = pt_symmetric_states(&p, 11.0).unwrap();
        let mut init = minus.full_state();
        init.psi1 *= 1.0 + 1e-6;
        let r = settle(&p, &init, &SettleOptions::default()).unwrap();
        assert!(r.outcome.converged());
        assert_eq!(r.matched.unwrap().branch, Branch::PtBonding);
    }

    #[test]
    fn empty_cavity_below_threshold() {
        let p = ModelParams::default().with_pump(5.0);
        let r = settle(&p, &FullState::empty(0.0), &SettleOptions::default()).unwrap();
        assert_eq!(r.matched.unwrap().branch, Branch::NonCondensed);
    }

    #[test]
    fn sweep_grids_are_checked() {
        let p = ModelParams::default();
        let o = SweepOptions::default();
        assert!(hysteresis_sweep(&p, &[1.0, 0.5], &[0.5], &o).is_err());
        assert!(hysteresis_sweep(&p, &[], &[0.5], &o).is_err());
    }
}
