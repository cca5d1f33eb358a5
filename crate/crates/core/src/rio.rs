//! Euler-angle formulation of the singular flow (the RIO picture).
//!
//! The wave function is charted as
//!
//! ```text
//! ψ = (cos(θ/2)·e^{iφ/2}, sin(θ/2)·e^{−iφ/2})·e^{−iγ/2},
//! ```
//!
//! and, with γ as the independent variable (γ̇ > 0 assumed), the singular
//! flow collapses to one second-order ODE,
//!
//! ```text
//! θ″ = (P₁ sin γ − P₂ cos γ)(sin²θ + θ′²)^{3/2} + cos θ sin θ + 2θ′² cot θ,
//! ```
//!
//! with the singular control `Δ_s = Ω sin θ (P₁ sin γ − P₂ cos γ)`. The
//! adjoints `(P₁, P₂)` of this formulation are a rotation of the main ones:
//! `(P₁, P₂) = (p₂, −p₁)` (see [`rio_adjoints`]); with that mapping the two
//! Δ_s formulas agree pointwise along mapped trajectories.
//!
//! The chart is singular at the poles (`cot θ`); integrations guard a
//! neighborhood of `θ ∈ {0, π}` and truncate with a diagnostic rather than
//! stepping across.

use crate::ode;
use crate::verify::TrajectoryPoint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Pole exclusion: integrations keep `θ ∈ (ε, π − ε)`.
pub const POLE_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RioError {
    #[error("θ = {theta} too close to a coordinate pole")]
    PoleApproach { theta: f64 },
}

/// A point of the Euler-angle flow; `dtheta` is `dθ/dγ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerPoint {
    pub theta: f64,
    pub phi: f64,
    pub gamma: f64,
    pub dtheta: f64,
}

/// Right-hand side `θ″(γ)` of the singular-flow ODE.
pub fn rio_rhs(p: &EulerPoint, p1: f64, p2: f64) -> Result<f64, RioError> {
    let s = p.theta.sin();
    if s.abs() < POLE_GUARD {
        return Err(RioError::PoleApproach { theta: p.theta });
    }
    let c = p.theta.cos();
    let drive = p1 * p.gamma.sin() - p2 * p.gamma.cos();
    Ok(drive * (s * s + p.dtheta * p.dtheta).powf(1.5) + c * s + 2.0 * p.dtheta * p.dtheta * c / s)
}

/// The singular control at a point of the flow (`Ω = 1` scaled).
pub fn rio_singular_control(theta: f64, gamma: f64, p1: f64, p2: f64) -> f64 {
    theta.sin() * (p1 * gamma.sin() - p2 * gamma.cos())
}

/// One recorded sample of a RIO integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RioSample {
    pub gamma: f64,
    pub theta: f64,
    pub dtheta: f64,
    pub delta_s: f64,
}

/// A RIO trajectory; `truncated` marks a pole approach before `γ_f`.
#[derive(Debug, Clone, PartialEq)]
pub struct RioTrajectory {
    pub samples: Vec<RioSample>,
    pub truncated: bool,
}

/// RK4 integration of the θ(γ) equation from `start.gamma` to `gamma_f`,
/// emitting the singular control along the way.
pub fn integrate_rio(start: &EulerPoint, p1: f64, p2: f64, gamma_f: f64, h: f64) -> RioTrajectory {
    assert!(h > 0.0);
    let span = gamma_f - start.gamma;
    let n = (span.abs() / h).ceil().max(1.0) as usize;
    let hh = span / n as f64;
    let mut samples = Vec::with_capacity(n + 1);
    let mut y = [start.theta, start.dtheta];
    let mut gamma = start.gamma;
    let mut truncated = false;
    let push = |samples: &mut Vec<RioSample>, gamma: f64, y: &[f64; 2]| {
        samples.push(RioSample {
            gamma,
            theta: y[0],
            dtheta: y[1],
            delta_s: rio_singular_control(y[0], gamma, p1, p2),
        });
    };
    push(&mut samples, gamma, &y);
    let mut rhs = |g: f64, y: &[f64; 2]| -> [f64; 2] {
        let p = EulerPoint {
            theta: y[0],
            phi: 0.0,
            gamma: g,
            dtheta: y[1],
        };
        match rio_rhs(&p, p1, p2) {
            Ok(dd) => [y[1], dd],
            Err(_) => [f64::NAN, f64::NAN],
        }
    };
    for _ in 0..n {
        let next = ode::rk4_step(&mut rhs, gamma, &y, hh);
        if !next[0].is_finite()
            || !next[1].is_finite()
            || next[0].sin().abs() < POLE_GUARD
        {
            truncated = true;
            break;
        }
        y = next;
        gamma += hh;
        push(&mut samples, gamma, &y);
    }
    RioTrajectory { samples, truncated }
}

/// Extract `(θ, φ_raw, γ_raw)` from `(a, b)`:
/// `θ = 2·atan2(|b|, |a|)`, `φ = arg a − arg b`, `γ = −(arg a + arg b)`.
/// The raw phases live on branches; unwrap along a trajectory with
/// [`euler_trajectory`].
pub fn euler_angles_from_state(a: Complex64, b: Complex64) -> (f64, f64, f64) {
    let theta = 2.0 * b.norm().atan2(a.norm());
    let (pa, pb) = (a.arg(), b.arg());
    (theta, pa - pb, -(pa + pb))
}

/// A mapped trajectory sample in the Euler chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerSample {
    pub t: f64,
    pub theta: f64,
    pub phi: f64,
    pub gamma: f64,
}

/// Map an integrated state trajectory into the Euler chart, unwrapping the
/// phases by continuity.
pub fn euler_trajectory(traj: &[TrajectoryPoint]) -> Vec<EulerSample> {
    let mut out = Vec::with_capacity(traj.len());
    let (mut prev_phi, mut prev_gamma) = (f64::NAN, f64::NAN);
    for pt in traj {
        let (theta, mut phi, mut gamma) = euler_angles_from_state(pt.state.a, pt.state.b);
        if prev_phi.is_finite() {
            phi -= 2.0 * std::f64::consts::PI * ((phi - prev_phi) / (2.0 * std::f64::consts::PI)).round();
            gamma -=
                2.0 * std::f64::consts::PI * ((gamma - prev_gamma) / (2.0 * std::f64::consts::PI)).round();
        }
        prev_phi = phi;
        prev_gamma = gamma;
        out.push(EulerSample {
            t: pt.t,
            theta,
            phi,
            gamma,
        });
    }
    out
}

/// Map the main-formulation adjoints `(p₁, p₂)` to the Euler-angle ones.
///
/// From `R_z = −sinθ(p₁cosγ + p₂sinγ)` and `Δ_s = −R_z`, matching
/// `Δ_s = sinθ(P₁sinγ − P₂cosγ)` forces `(P₁, P₂) = (p₂, −p₁)`.
pub fn rio_adjoints(p1: f64, p2: f64) -> (f64, f64) {
    (p2, -p1)
}
