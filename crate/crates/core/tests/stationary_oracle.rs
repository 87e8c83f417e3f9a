//! Stationary states checked against balance relations that follow directly
//! from the mean-field equations.

use num_complex::Complex64;
use polariton_bjj::emission::{emitted_weight, emission_map, Geometry, Grids, Widths};
use polariton_bjj::roots::linspace;
use polariton_bjj::spectrum::non_condensed_spectrum;
use polariton_bjj::stationary::{all_states_at_pumping, Branch};
use polariton_bjj::ModelParams;

fn catalogue_params() -> Vec<(ModelParams, f64)> {
    let base = ModelParams::default();
    let mut out = Vec::new();
    for det in [-0.05, 0.0, 0.05, 1.0] {
        for p1 in [9.0, 10.5, 11.0, 15.0, 30.0, 50.0] {
            out.push((base.with_detuning(det), p1));
        }
    }
    out.push((ModelParams { u2: 0.02, ..base }, 20.0));
    out
}

#[test]
fn condensed_states_balance_gain_loss_and_current() {
    let mut seen = 0;
    for (p, p1) in catalogue_params() {
        for st in all_states_at_pumping(&p, p1).unwrap() {
            if !st.branch.is_condensed() {
                continue;
            }
            seen += 1;
            let (n1, n2, nr) = (st.n_c1, st.n_c2, st.n_r1);
            let j = p.j_coupling;
            // Reservoir balance.
            let res = p1 - p.gamma_r1 * nr - p.r1_prime * nr * n1;
            assert!(res.abs() < 1e-8 * p1, "{st:?}: reservoir {res}");
            // Net gain equals net loss.
            let gain = p.r1_prime * nr * n1 - p.gamma1 * n1 - p.gamma2 * n2;
            assert!(gain.abs() < 1e-8 * (n1 + n2), "{st:?}: gain {gain}");
            // Tunneling current feeds the loss of site 2.
            let current = 2.0 * j * (n1 * n2).sqrt() * st.delta_phi.sin() - p.gamma2 * n2;
            assert!(current.abs() < 1e-8 * (n1 + n2), "{st:?}: current {current}");
            // The frequency read from site 2.
            let (_, v2r) = p.real_potentials(nr);
            let v12 = p.effective_detuning(nr);
            let from_site2 = p.eps2 + v2r + p.u2 * n2 - j * (n1 / n2).sqrt() * st.delta_phi.cos();
            let from_site1 = p.eps2 + v2r + v12 + p.u1 * n1 - j * (n2 / n1).sqrt() * st.delta_phi.cos();
            assert!((st.omega - from_site2).abs() < 1e-9, "{st:?}: {from_site2}");
            assert!((st.omega - from_site1).abs() < 1e-9, "{st:?}: {from_site1}");
        }
    }
    assert!(seen > 30, "{seen}");
}

#[test]
fn pt_pair_has_equal_populations_and_threshold_reservoir() {
    let p = ModelParams::default();
    for p1 in [10.5, 11.0, 20.0, 50.0] {
        let states = all_states_at_pumping(&p, p1).unwrap();
        for b in [Branch::PtBonding, Branch::PtAntibonding] {
            let st = states.iter().find(|s| s.branch == b).unwrap();
            assert!((st.n_c1 - st.n_c2).abs() < 1e-9 * st.n_c1);
            assert!((st.n_r1 - (p.gamma1 + p.gamma2) / p.r1_prime).abs() < 1e-9);
        }
    }
}

#[test]
fn non_condensed_frequencies_solve_the_secular_equation() {
    for (p, p1) in catalogue_params() {
        let nr = p1 / p.gamma_r1;
        let modes = non_condensed_spectrum(&p.with_pump(p1), nr);
        let (v1r, v2r) = p.real_potentials(nr);
        let e1 = Complex64::new(p.eps1 + v1r, p.v1_imag(nr));
        let e2 = Complex64::new(p.eps2 + v2r, p.v2_imag());
        let k = p.coupling();
        for w in [modes.omega_plus, modes.omega_minus] {
            let sec = (e1 - w) * (e2 - w) - k * k;
            assert!(sec.norm() < 1e-12, "{sec}");
        }
    }
}

#[test]
fn catalogue_at_p11() {
    let states = all_states_at_pumping(&ModelParams::default(), 11.0).unwrap();
    let mut branches: Vec<Branch> = states.iter().map(|s| s.branch).collect();
    branches.sort_by_key(|b| b.as_str());
    assert_eq!(
        branches,
        vec![Branch::NonCondensed, Branch::PtAntibonding, Branch::PtBonding, Branch::SelfTrapped, Branch::Untrapped]
    );
    let st = states.iter().find(|s| s.branch == Branch::SelfTrapped).unwrap();
    assert!(st.zeta > 0.9 && st.zeta < 1.0);
    assert!((st.delta_phi.abs() - std::f64::consts::PI).abs() < 0.1);
}

#[test]
fn map_integral_is_the_emitted_weight() {
    let p = ModelParams::default();
    let geo = Geometry::default();
    let w = Widths::for_geometry(&geo);
    let states: Vec<_> = all_states_at_pumping(&p, 11.0).unwrap().into_iter().filter(|s| s.branch.is_condensed()).collect();
    let lo = states.iter().map(|s| s.omega).fold(f64::INFINITY, f64::min) - 0.3;
    let hi = states.iter().map(|s| s.omega).fold(f64::NEG_INFINITY, f64::max) + 0.3;
    let grids = Grids { x: linspace(-40.0, 40.0, 1601), omega: linspace(lo, hi, 2001) };
    for st in &states {
        let m = emission_map(std::slice::from_ref(st), &geo, &w, &grids).unwrap();
        let wt = emitted_weight(st, &geo, &w);
        assert!((m.integral() - wt).abs() < 1e-6 * wt, "{} vs {wt}", m.integral());
    }
}
