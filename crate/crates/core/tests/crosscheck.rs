//! Cross-formulation validation: the Euler-angle (RIO) singular flow must
//! reproduce the main-formulation optimum, mapped sample by sample.

use pulseforge::protocol::ControlProtocol;
use pulseforge::rio::{euler_trajectory, integrate_rio, rio_adjoints, rio_rhs, EulerPoint};
use pulseforge::rspace::{RVector, SingularArc};
use pulseforge::verify::{integrate, QubitState};

const P1: f64 = 0.3002237;
const P2: f64 = -1.12045;

struct Mapped {
    t: Vec<f64>,
    theta: Vec<f64>,
    gamma: Vec<f64>,
}

fn mapped_optimum_trajectory(h: f64) -> Mapped {
    let arc = SingularArc::from_initial(RVector::new(P1, -P2, 0.0)).unwrap();
    let protocol = ControlProtocol::singular(arc, arc.period(), 1.5, 1.0);
    let traj = integrate(&protocol, &QubitState::ground(), 0.0, h).unwrap();
    let euler = euler_trajectory(&traj);
    Mapped {
        t: euler.iter().map(|e| e.t).collect(),
        theta: euler.iter().map(|e| e.theta).collect(),
        gamma: euler.iter().map(|e| e.gamma).collect(),
    }
}

/// 5-point first and second derivatives on a uniform grid with stride `k`.
fn stencil(f: &[f64], i: usize, k: usize, h: f64) -> (f64, f64) {
    let hk = h * k as f64;
    let (m2, m1, p1, p2) = (f[i - 2 * k], f[i - k], f[i + k], f[i + 2 * k]);
    let d1 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * hk);
    let d2 = (-p2 + 16.0 * p1 - 30.0 * f[i] + 16.0 * m1 - m2) / (12.0 * hk * hk);
    (d1, d2)
}

#[test]
fn rio_ode_residual_along_mapped_optimum() {
    let h = 1e-4;
    let map = mapped_optimum_trajectory(h);
    let n = map.t.len();
    let (q1, q2) = rio_adjoints(P1, P2);
    let stride = 50;
    let mut checked = 0;
    let mut max_resid: f64 = 0.0;
    let (lo, hi) = (n * 15 / 100, n * 85 / 100);
    let mut i = lo;
    while i < hi {
        let (th_d1, th_d2) = stencil(&map.theta, i, stride, h);
        let (ga_d1, ga_d2) = stencil(&map.gamma, i, stride, h);
        assert!(ga_d1 > 0.0, "gamma must increase in the interior");
        let dtheta = th_d1 / ga_d1;
        let d2theta = (th_d2 * ga_d1 - th_d1 * ga_d2) / ga_d1.powi(3);
        let p = EulerPoint {
            theta: map.theta[i],
            phi: 0.0,
            gamma: map.gamma[i],
            dtheta,
        };
        let rhs = rio_rhs(&p, q1, q2).unwrap();
        max_resid = max_resid.max((d2theta - rhs).abs());
        checked += 1;
        i += 500;
    }
    assert!(checked > 50);
    assert!(max_resid < 1e-5, "max RIO residual {max_resid}");
}

#[test]
fn rio_integration_reproduces_mapped_theta() {
    let h = 1e-4;
    let map = mapped_optimum_trajectory(h);
    let n = map.t.len();
    let (q1, q2) = rio_adjoints(P1, P2);
    let stride = 50;
    let start_idx = n * 10 / 100;
    let end_idx = n * 90 / 100;
    let (th_d1, _) = stencil(&map.theta, start_idx, stride, h);
    let (ga_d1, _) = stencil(&map.gamma, start_idx, stride, h);
    let start = EulerPoint {
        theta: map.theta[start_idx],
        phi: 0.0,
        gamma: map.gamma[start_idx],
        dtheta: th_d1 / ga_d1,
    };
    let rio = integrate_rio(&start, q1, q2, map.gamma[end_idx], 5e-4);
    assert!(!rio.truncated, "pole hit before the end of the window");

    // Compare θ(γ) against the mapped trajectory by linear interpolation in γ.
    let gammas = &map.gamma[start_idx..=end_idx];
    let thetas = &map.theta[start_idx..=end_idx];
    let mut max_dev: f64 = 0.0;
    for s in &rio.samples {
        let j = match gammas.binary_search_by(|g| g.partial_cmp(&s.gamma).unwrap()) {
            Ok(j) => j,
            Err(j) => j,
        };
        if j == 0 || j >= gammas.len() {
            continue;
        }
        let w = (s.gamma - gammas[j - 1]) / (gammas[j] - gammas[j - 1]);
        let th_map = thetas[j - 1] + w * (thetas[j] - thetas[j - 1]);
        max_dev = max_dev.max((s.theta - th_map).abs());
    }
    assert!(max_dev < 1e-4, "max θ deviation {max_dev}");
}

#[test]
fn rio_control_matches_main_singular_control() {
    // Δ_s from the Euler chart equals −R_z pointwise along the optimum.
    let h = 1e-4;
    let arc = SingularArc::from_initial(RVector::new(P1, -P2, 0.0)).unwrap();
    let map = mapped_optimum_trajectory(h);
    let (q1, q2) = rio_adjoints(P1, P2);
    let n = map.t.len();
    for i in (n / 10..n * 9 / 10).step_by(911) {
        let ds_rio =
            pulseforge::rio::rio_singular_control(map.theta[i], map.gamma[i], q1, q2);
        let ds_main = -arc.r_at(map.t[i]).z;
        assert!(
            (ds_rio - ds_main).abs() < 1e-6,
            "Δ_s mismatch at t={}: {ds_rio} vs {ds_main}",
            map.t[i]
        );
    }
}

#[test]
fn mapped_transfer_runs_pole_to_pole() {
    let map = mapped_optimum_trajectory(2e-4);
    assert!(map.theta[0] < 1e-6);
    assert!((map.theta[map.theta.len() - 1] - std::f64::consts::PI).abs() < 2e-3);
}
