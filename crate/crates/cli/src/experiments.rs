//! Experiment runners. Each returns its tables fully in memory; nothing is
//! written until every table has been computed.

use anyhow::{Context, Result};
use polariton_bjj::dynamics::{self, basin_map, hysteresis_sweep, SettleOptions, SweepOptions};
use polariton_bjj::emission::{emission_map, emitted_weight, stable_states_for_emission, Geometry, Grids, Widths};
use polariton_bjj::integrate::{DormandPrince, Tolerances};
use polariton_bjj::reduced::{pendulum_rhs, PendulumState};
use polariton_bjj::spectrum::threshold_vs_coupling;
use polariton_bjj::stability::classify_all;
use polariton_bjj::stationary::all_states_at_pumping;
use polariton_bjj::{FullState, ModelParams, ReducedState};
use std::cell::RefCell;
use std::f64::consts::PI;

use crate::config::{self, Equations, Experiment, Initial, Linspace};

pub struct Table {
    pub name: String,
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: impl Into<String>, header: &'static [&'static str]) -> Self {
        Self { name: name.into(), header, rows: Vec::new() }
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(w.into_inner()?)
    }
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn check_grid(name: &str, g: &Linspace) -> Result<Vec<f64>> {
    anyhow::ensure!(g.points >= 1 && g.start.is_finite() && g.stop.is_finite(), "{name}: needs finite bounds and points >= 1");
    Ok(g.values())
}

fn reduced_initial(i: &Initial) -> ReducedState {
    ReducedState::new(i.zeta, i.delta_phi, i.n_ct, i.n_r1)
}

pub fn run(model: &ModelParams, experiment: &Experiment) -> Result<Vec<Table>> {
    let name = experiment.name();
    match experiment {
        Experiment::Threshold(o) => threshold(model, o),
        Experiment::Stationary(o) => stationary(model, o),
        Experiment::Stability(o) => stability(model, o),
        Experiment::Evolve(o) => evolve(model, o),
        Experiment::Hysteresis(o) => hysteresis(model, o),
        Experiment::Basin(o) => basin(model, o),
        Experiment::Emission(o) => emission(model, o),
        Experiment::Reduced(o) => reduced(model, o),
    }
    .with_context(|| format!("experiment {name}"))
}

fn threshold(model: &ModelParams, o: &config::ThresholdOptions) -> Result<Vec<Table>> {
    let js = check_grid("j_grid", &o.j_grid)?;
    let mut t = Table::new("threshold.csv", &["J", "detuning", "N_Rth", "P_th"]);
    for &det in &o.detunings {
        for pt in threshold_vs_coupling(&model.with_detuning(det), &js)? {
            let th = pt.threshold?;
            t.rows.push(vec![num(pt.j), num(det), num(th.n_r_th), num(th.p_th)]);
        }
    }
    Ok(vec![t])
}

const STATIONARY_HEADER: &[&str] =
    &["P1", "branch", "Omega", "N_c1", "N_c2", "N_R1", "zeta", "delta_phi", "max_growth", "stable"];

fn stationary_table(model: &ModelParams, ps: &[f64], name: String) -> Result<Table> {
    let mut t = Table::new(name, STATIONARY_HEADER);
    for &p1 in ps {
        let mut states = all_states_at_pumping(model, p1)?;
        classify_all(model, &mut states);
        for st in &states {
            let (growth, stable) = match &st.stability {
                Some(v) => (v.max_growth, v.is_stable().to_string()),
                None => (f64::NAN, "unknown".to_string()),
            };
            t.rows.push(vec![
                num(p1),
                st.branch.as_str().to_string(),
                num(st.omega),
                num(st.n_c1),
                num(st.n_c2),
                num(st.n_r1),
                num(st.zeta),
                num(st.delta_phi),
                num(growth),
                stable,
            ]);
        }
    }
    Ok(t)
}

fn stationary(model: &ModelParams, o: &config::StationaryOptions) -> Result<Vec<Table>> {
    let ps = check_grid("p_grid", &o.p_grid)?;
    match o.detunings.as_slice() {
        [] => Ok(vec![stationary_table(model, &ps, "stationary.csv".into())?]),
        [d] => Ok(vec![stationary_table(&model.with_detuning(*d), &ps, "stationary.csv".into())?]),
        many => many
            .iter()
            .map(|d| stationary_table(&model.with_detuning(*d), &ps, format!("stationary_detuning_{d}.csv")))
            .collect(),
    }
}

fn stability(model: &ModelParams, o: &config::StabilityOptions) -> Result<Vec<Table>> {
    let mut t = Table::new("stability.csv", &["P1", "branch", "k", "re_lambda", "im_lambda"]);
    for &p1 in &o.p_values {
        let mut states = all_states_at_pumping(model, p1)?;
        classify_all(model, &mut states);
        for st in &states {
            let Some(v) = &st.stability else { continue };
            for (k, ev) in v.eigenvalues.iter().enumerate() {
                t.rows.push(vec![num(p1), st.branch.as_str().to_string(), k.to_string(), num(ev.re), num(ev.im)]);
            }
        }
    }
    Ok(vec![t])
}

fn evolve(model: &ModelParams, o: &config::EvolveOptions) -> Result<Vec<Table>> {
    let opts = dynamics::EvolveOptions {
        t_final: o.t_final,
        dt_max: o.dt_max,
        sample_dt: o.sample_dt,
        noise_sigma: o.noise_sigma,
        seed: o.seed,
        tol: Tolerances { rtol: o.rtol, atol: o.atol },
    };
    let tr = dynamics::evolve(model, &FullState::from_reduced(&reduced_initial(&o.initial)), &opts)?;
    let mut t = Table::new("evolve.csv", &["t", "N_c1", "N_c2", "N_R1", "zeta", "delta_phi_unwrapped"]);
    for ((time, s), r) in tr.times.iter().zip(&tr.states).zip(&tr.reduced) {
        let (z, phi) = r.map_or((f64::NAN, f64::NAN), |r| (r.zeta, r.delta_phi));
        t.rows.push(vec![num(*time), num(s.n_c1()), num(s.n_c2()), num(s.n_r1), num(z), num(phi)]);
    }
    Ok(vec![t])
}

fn hysteresis(model: &ModelParams, o: &config::HysteresisOptions) -> Result<Vec<Table>> {
    anyhow::ensure!(o.p_step > 0.0 && o.p_stop > o.p_start, "need p_step > 0 and p_stop > p_start");
    let n = ((o.p_stop - o.p_start) / o.p_step + 1e-9).floor() as usize;
    let up: Vec<f64> = (0..=n).map(|k| o.p_start + k as f64 * o.p_step).collect();
    let down: Vec<f64> = up.iter().rev().copied().collect();
    let opts = SweepOptions {
        t_hold: o.t_hold,
        average_fraction: o.average_fraction,
        samples: o.samples,
        seed_population: o.seed_population,
        seed_zeta: o.seed_zeta,
        seed_phase: o.seed_phase,
        dt_max: o.dt_max,
        converged_spread: o.converged_spread,
        ..Default::default()
    };
    let (u, d) = hysteresis_sweep(model, &up, &down, &opts)?;
    let mut t = Table::new("hysteresis.csv", &["direction", "P1", "N_cT_avg", "zeta_avg", "converged"]);
    for sweep in [&u, &d] {
        for s in &sweep.steps {
            t.rows.push(vec![
                sweep.direction.as_str().to_string(),
                num(s.p1),
                num(s.n_ct_avg),
                num(s.zeta_avg),
                s.converged.to_string(),
            ]);
        }
    }
    Ok(vec![t])
}

fn settle_options(c: &config::SettleConfig) -> SettleOptions {
    SettleOptions {
        t_max: c.t_max,
        dt_max: c.dt_max,
        window: c.window,
        velocity_tol: c.velocity_tol,
        check_dt: c.check_dt,
        match_tol: c.match_tol,
        tol: Tolerances { rtol: c.rtol, atol: c.atol },
    }
}

fn basin(model: &ModelParams, o: &config::BasinOptions) -> Result<Vec<Table>> {
    anyhow::ensure!(o.zeta_points >= 1 && o.phi_points >= 1, "basin grids need at least one point");
    let zetas = polariton_bjj::roots::linspace(-o.zeta_max, o.zeta_max, o.zeta_points);
    let phis: Vec<f64> = (0..o.phi_points).map(|k| -PI + (k as f64 + 0.5) * 2.0 * PI / o.phi_points as f64).collect();
    let map = basin_map(model, &zetas, &phis, o.n_ct0, o.n_r10, &settle_options(&o.settle))?;
    let mut t = Table::new("basin.csv", &["zeta0", "phi0", "label"]);
    for (z, row) in map.zeta_grid.iter().zip(&map.labels) {
        for (p, l) in map.phi_grid.iter().zip(row) {
            t.rows.push(vec![num(*z), num(*p), l.as_str().to_string()]);
        }
    }
    Ok(vec![t])
}

fn emission(model: &ModelParams, o: &config::EmissionOptions) -> Result<Vec<Table>> {
    let p1 = o.p1.unwrap_or(model.pump_p1);
    let geometry = Geometry { x1: o.x1, x2: o.x2, radius: o.radius };
    let widths = Widths { sigma_x: o.sigma_x.unwrap_or(0.5 * o.radius), sigma_omega: o.sigma_omega };
    let states = stable_states_for_emission(model, p1)?;
    let auto = Grids::auto(&states, &widths)?;
    let grids = Grids {
        x: match &o.x_grid {
            Some(g) => check_grid("x_grid", g)?,
            None => auto.x,
        },
        omega: match &o.omega_grid {
            Some(g) => check_grid("omega_grid", g)?,
            None => auto.omega,
        },
    };
    let map = emission_map(&states, &geometry, &widths, &grids)?;
    let mut t = Table::new("emission.csv", &["x", "Omega", "intensity"]);
    for (x, row) in map.x_grid.iter().zip(&map.intensity) {
        for (w, v) in map.omega_grid.iter().zip(row) {
            t.rows.push(vec![num(*x), num(*w), num(*v)]);
        }
    }
    let mut s = Table::new("emission_states.csv", &["P1", "branch", "Omega", "N_c1", "N_c2", "delta_phi", "weight"]);
    for st in &states {
        s.rows.push(vec![
            num(p1),
            st.branch.as_str().to_string(),
            num(st.omega),
            num(st.n_c1),
            num(st.n_c2),
            num(st.delta_phi),
            num(emitted_weight(st, &geometry, &widths)),
        ]);
    }
    Ok(vec![t, s])
}

fn reduced(model: &ModelParams, o: &config::ReducedOptions) -> Result<Vec<Table>> {
    let init = reduced_initial(&o.initial);
    let tol = Tolerances { rtol: o.rtol, atol: o.atol };
    let mut t = Table::new("reduced.csv", &["t", "zeta", "delta_phi", "N_cT", "N_R1"]);
    match o.equations {
        Equations::Reduced => {
            let opts = dynamics::EvolveOptions {
                t_final: o.t_final,
                dt_max: o.dt_max,
                sample_dt: o.sample_dt,
                tol,
                ..Default::default()
            };
            let tr = dynamics::evolve_reduced(model, &init, &opts)?;
            for (time, s) in tr.times.iter().zip(&tr.states) {
                t.rows.push(vec![num(*time), num(s.zeta), num(s.delta_phi), num(s.n_ct), num(s.n_r1)]);
            }
        }
        Equations::Pendulum => {
            anyhow::ensure!(o.t_final > 0.0 && o.sample_dt > 0.0 && o.dt_max > 0.0, "times must be > 0");
            let sign = if init.zeta < 0.0 { -1.0 } else { 1.0 };
            let start = PendulumState::from_reduced(model, &init);
            let failure = RefCell::new(None);
            let rhs = |_t: f64, y: &[f64; 5]| match pendulum_rhs(model, &PendulumState::from_array(y)) {
                Ok(r) => r.to_array(),
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    [f64::NAN; 5]
                }
            };
            let mut dp = DormandPrince::new(rhs, 0.0, start.to_array(), o.dt_max, tol);
            let push = |t: &mut Table, time: f64, y: &[f64; 5]| {
                let s = PendulumState::from_array(y);
                let zeta = sign * (1.0 - s.eta * s.eta).max(0.0).sqrt();
                t.rows.push(vec![num(time), num(zeta), num(s.delta_phi), num(s.n_ct), num(s.n_r1)]);
            };
            push(&mut t, 0.0, &dp.y);
            let n = (o.t_final / o.sample_dt).ceil() as usize;
            for k in 1..=n {
                let target = (k as f64 * o.sample_dt).min(o.t_final);
                let step = dp.advance_to(target);
                if let Some(e) = failure.borrow_mut().take() {
                    return Err(e.into());
                }
                step?;
                push(&mut t, target, &dp.y);
            }
        }
    }
    Ok(vec![t])
}
