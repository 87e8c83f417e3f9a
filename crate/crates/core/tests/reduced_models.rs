use polariton_bjj::dynamics::{evolve, EvolveOptions};
use polariton_bjj::integrate::{DormandPrince, Tolerances};
use polariton_bjj::model::wrap_phase;
use polariton_bjj::reduced::{josephson_rhs, locking_criterion, pendulum_rhs, LockTarget, PendulumState};
use polariton_bjj::stability::reduced_rhs;
use polariton_bjj::stationary::{all_states_at_pumping, Branch};
use polariton_bjj::{FullState, ModelParams, ReducedState};
use std::f64::consts::PI;

#[test]
fn pendulum_phase_tracks_the_full_model() {
    let p = ModelParams::default().with_pump(50.0);
    let tol = Tolerances { rtol: 1e-11, atol: 1e-13 };
    let r0 = ReducedState::new(0.999, PI + 0.04, 450.0, 10.0);
    let opts = EvolveOptions { t_final: 200.0, dt_max: 0.05, sample_dt: 0.5, tol, ..Default::default() };
    let full = evolve(&p, &FullState::from_reduced(&r0), &opts).unwrap();
    let start = PendulumState::from_reduced(&p, &r0);
    let rhs = |_t: f64, y: &[f64; 5]| pendulum_rhs(&p, &PendulumState::from_array(y)).unwrap().to_array();
    let mut pend = DormandPrince::new(rhs, 0.0, start.to_array(), 0.05, tol);
    let mut compared = 0;
    for (t, r) in full.times.iter().zip(&full.reduced).skip(1) {
        let r = r.unwrap();
        if (1.0 - r.zeta * r.zeta).sqrt() >= 0.1 {
            break;
        }
        pend.advance_to(*t).unwrap();
        let d = wrap_phase(pend.y[0] - r.delta_phi).abs();
        assert!(d < 0.2, "t = {t}: {d}");
        compared += 1;
    }
    assert!(compared > 300, "{compared}");
}

#[test]
fn josephson_model_is_the_small_imbalance_limit() {
    let p = ModelParams { u2: 0.015, ..ModelParams::default().with_detuning(0.02) };
    let at = |z: f64| ReducedState::new(z, 0.7, 40.0, 18.0);
    let exact = reduced_rhs(&p, &at(0.0)).unwrap();
    let jj = josephson_rhs(&p, &at(0.0));
    assert!((exact.dzeta - jj.dzeta).abs() < 1e-15);
    assert!((exact.ddelta_phi - jj.ddelta_phi).abs() < 1e-15);
    // Away from zeta = 0 the mismatch is first order in zeta.
    let mut last = f64::INFINITY;
    for z in [1e-1, 1e-2, 1e-3, 1e-4] {
        let e = reduced_rhs(&p, &at(z)).unwrap();
        let j = josephson_rhs(&p, &at(z));
        let err = (e.dzeta - j.dzeta).abs().max((e.ddelta_phi - j.ddelta_phi).abs());
        assert!(err < 2.0 * z, "{z}: {err}");
        assert!(err < last);
        last = err;
    }
    assert!(!josephson_rhs(&p, &at(0.3)).valid);
}

#[test]
fn self_trapped_phase_agrees_with_lock_target() {
    let base = ModelParams::default();
    let mut checked = 0;
    for det in [-3.0, -1.0, -0.5, 0.0, 0.5, 1.0] {
        for p1 in [11.0, 20.0, 50.0] {
            let p = base.with_detuning(det).with_pump(p1);
            for st in all_states_at_pumping(&p, p1).unwrap().iter().filter(|s| s.branch == Branch::SelfTrapped) {
                let target = locking_criterion(&p, st.n_ct());
                assert_eq!(target, LockTarget::PiLock);
                assert!(wrap_phase(st.delta_phi - target.phase()).abs() < 0.1, "{st:?}");
                checked += 1;
            }
        }
    }
    assert!(checked >= 10, "{checked}");
}

#[test]
fn lock_target_flips_with_the_bias_sign() {
    let p = ModelParams::default().with_pump(0.0);
    let u = p.u_mean();
    for det in [-1.0, -0.3, 0.2, 1.0] {
        for n in [1.0, 10.0, 50.0, 100.0, 500.0] {
            let want = if det + u * n > 0.0 { LockTarget::PiLock } else { LockTarget::ZeroLock };
            assert_eq!(locking_criterion(&p.with_detuning(det), n), want, "det {det}, N {n}");
        }
    }
}
