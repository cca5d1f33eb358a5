//! Analytic propagators vs the RK4 referee on randomized initial data,
//! plus conservation and branch-calibration checks.

mod common;

use common::*;
use pulseforge::rspace::{
    propagate_negez, propagate_regular, propagate_singular, rk4_regular_reference,
    rk4_singular_reference, NegEzArc, RVector, RegularArc, SingularArc,
};
use rand::Rng;

fn assert_close(a: &RVector, b: &RVector, tol: f64, what: &str) {
    assert!(
        (a.x - b.x).abs() < tol && (a.y - b.y).abs() < tol && (a.z - b.z).abs() < tol,
        "{what}: {a:?} vs {b:?}"
    );
}

#[test]
fn singular_propagator_vs_rk4_over_a_period() {
    let mut r = rng(21);
    for i in 0..20 {
        let r0 = random_sd_branch_point(&mut r, f64::INFINITY);
        let arc = SingularArc::from_initial(r0).unwrap();
        let period = arc.period();
        for k in 1..=5 {
            let t = period * k as f64 / 5.0;
            let rk = rk4_singular_reference(r0, t, 1e-5);
            assert_close(
                &propagate_singular(&arc, t),
                &rk,
                1e-8,
                &format!("singular #{i} at t={t}"),
            );
        }
    }
}

#[test]
fn regular_propagator_vs_rk4_over_a_period() {
    let mut r = rng(22);
    for i in 0..20 {
        let r0 = RVector::new(
            r.gen_range(-1.0..1.0),
            r.gen_range(-1.0..1.0),
            r.gen_range(-1.0..1.0),
        );
        let delta = if r.gen_bool(0.5) { 1.5 } else { -1.5 };
        let arc = RegularArc::new(delta, 1.0, r0);
        let period = 2.0 * std::f64::consts::PI / arc.w;
        for k in 1..=5 {
            let t = period * k as f64 / 5.0;
            let rk = rk4_regular_reference(r0, delta, 1.0, t, 1e-5);
            assert_close(
                &propagate_regular(&arc, t),
                &rk,
                1e-8,
                &format!("regular #{i} at t={t}"),
            );
        }
    }
}

#[test]
fn constants_of_motion_drift_below_1e9() {
    let mut r = rng(23);
    for _ in 0..10 {
        let r0 = random_sd_branch_point(&mut r, f64::INFINITY);
        let arc = SingularArc::from_initial(r0).unwrap();
        // t in [0, 8K/A]
        let span = 2.0 * arc.period();
        for k in 0..=40 {
            let p = propagate_singular(&arc, span * k as f64 / 40.0);
            assert!((p.norm2() - r0.norm2()).abs() < 1e-9);
            assert!((p.energy_s() - arc.es).abs() < 1e-9);
            assert!((p.energy_z() - arc.ez).abs() < 1e-9);
        }
    }
    for _ in 0..10 {
        let r0 = RVector::new(
            r.gen_range(-1.0..1.0),
            r.gen_range(-1.0..1.0),
            r.gen_range(-1.0..1.0),
        );
        let arc = RegularArc::new(-1.5, 1.0, r0);
        let e0 = arc.energy_r(&r0);
        for k in 0..=40 {
            let p = propagate_regular(&arc, 0.2 * k as f64);
            assert!((p.norm2() - r0.norm2()).abs() < 1e-10);
            assert!((arc.energy_r(&p) - e0).abs() < 1e-10);
        }
    }
}

#[test]
fn negez_branch_calibrated_against_rk4() {
    // Frequency and modulus of the nd-branch are fixed by the RK4 referee:
    // u = (o/2)t + u₀ and m = 1 − q²/o².
    let mut r = rng(24);
    let mut tested = 0;
    while tested < 10 {
        let rx = r.gen_range(1.1..1.8);
        let ry = r.gen_range(-0.4..0.4);
        let rz = r.gen_range(0.5..1.2) * if r.gen_bool(0.5) { 1.0 } else { -1.0 };
        let r0 = RVector::new(rx, ry, rz);
        let Ok(arc) = NegEzArc::from_initial(r0) else {
            continue;
        };
        tested += 1;
        for k in 1..=5 {
            let t = 0.3 * k as f64;
            let rk = rk4_singular_reference(r0, t, 1e-5);
            assert_close(
                &propagate_negez(&arc, t),
                &rk,
                1e-8,
                &format!("negez {r0:?} at t={t}"),
            );
        }
    }
}

#[test]
fn singular_period_brings_the_point_back() {
    let mut r = rng(25);
    for _ in 0..10 {
        let r0 = random_sd_branch_point(&mut r, f64::INFINITY);
        let arc = SingularArc::from_initial(r0).unwrap();
        assert_close(
            &propagate_singular(&arc, arc.period()),
            &r0,
            1e-9,
            "period return",
        );
    }
}
