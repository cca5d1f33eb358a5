//! Pontryagin structure of the extremal flow: the coupled `(I, R)` dynamics,
//! the pseudo-Hamiltonian, and the switching functions.
//!
//! The adjoint wave function never appears explicitly; the vector
//! `I = Im⟨χ|σ|ψ⟩` is its complete reduced surrogate. The coupled linear
//! dynamics are
//!
//! ```text
//! İ = M(Δ,Ω)·I + Ω·N·R,     Ṙ = M(Δ,Ω)·R,
//! M = [[0, Δ, 0], [−Δ, 0, −Ω], [0, Ω, 0]],   N = [[0,0,0],[0,0,−1],[0,1,0]],
//! ```
//!
//! with pseudo-Hamiltonian `H_P = ½(−Δ·I_z + Ω·I_x + Ω·R_x) − 1`, equal to
//! zero along free-final-time extremals. The switching functions are
//! `Φ_Δ = I_z` and `Φ_Ω = I_x + R_x`.

use crate::ode;
use crate::protocol::ControlProtocol;
use crate::rspace::RVector;
use serde::{Deserialize, Serialize};

/// The reduced adjoint surrogate `I = Im⟨χ|σ|ψ⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl IVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

/// A point of the extremal flow together with the controls acting there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PontryaginPoint {
    pub i: IVector,
    pub r: RVector,
    pub delta: f64,
    pub omega: f64,
}

/// `H_P = ½(−Δ·I_z + Ω·I_x + Ω·R_x) − 1`.
pub fn pontryagin_h(p: &PontryaginPoint) -> f64 {
    0.5 * (-p.delta * p.i.z + p.omega * p.i.x + p.omega * p.r.x) - 1.0
}

/// `(Φ_Δ, Φ_Ω) = (I_z, I_x + R_x)`. The bang rules are
/// `Δ = Δ₀·sgn(Φ_Δ)` and `Ω = Ω₀·sgn(Φ_Ω)` where the functions are nonzero.
pub fn switching_functions(p: &PontryaginPoint) -> (f64, f64) {
    (p.i.z, p.i.x + p.r.x)
}

/// `Φ̇_Δ = Ω(I_y + R_y)`.
pub fn phi_delta_dot(p: &PontryaginPoint) -> f64 {
    p.omega * (p.i.y + p.r.y)
}

/// `Φ̈_Ω = −Δ²(I_x+R_x) − ΔΩ(I_z+2R_z)`.
pub fn phi_omega_ddot(p: &PontryaginPoint) -> f64 {
    -p.delta * p.delta * (p.i.x + p.r.x) - p.delta * p.omega * (p.i.z + 2.0 * p.r.z)
}

/// The I-vector forced on a Δ-singular arc by `Φ_Δ = Φ̇_Δ = 0` and `H_P = 0`:
/// `I_z = 0`, `I_y = −R_y`, `I_x = 2/Ω₀ − R_x`.
pub fn singular_i_seed(r: &RVector, omega0: f64) -> IVector {
    IVector::new(2.0 / omega0 - r.x, -r.y, 0.0)
}

/// The unique Ω-singular point: `I_z = −2/Δ₀`, `R_z = 1/Δ₀`, forcing
/// `Ω_s = 0`. Returned as `(I_z, R_z, Ω_s)`; at this point `Φ_Ω`, `Φ̇_Ω`,
/// `Φ̈_Ω` all vanish with `Ω = 0` (checked in tests), which is why
/// Ω-singular arcs play no role in reaching a target from the ground state.
pub fn omega_singular_witness(delta0: f64) -> (f64, f64, f64) {
    (-2.0 / delta0, 1.0 / delta0, 0.0)
}

fn ir_rhs(delta: f64, omega: f64, y: &[f64; 6]) -> [f64; 6] {
    let (ix, iy, iz, rx, ry, rz) = (y[0], y[1], y[2], y[3], y[4], y[5]);
    [
        delta * iy,
        -delta * ix - omega * iz - omega * rz,
        omega * iy + omega * ry,
        delta * ry,
        -delta * rx - omega * rz,
        omega * ry,
    ]
}

/// RK4 integration of the coupled `(I, R)` system under a control protocol.
pub fn propagate_ir(
    i0: IVector,
    r0: RVector,
    controls: &ControlProtocol,
    t: f64,
    h: f64,
) -> (IVector, RVector) {
    let y = ode::rk4_integrate(
        |tt, y: &[f64; 6]| {
            let (d, o) = controls.controls_at(tt);
            ir_rhs(d, o, y)
        },
        0.0,
        [i0.x, i0.y, i0.z, r0.x, r0.y, r0.z],
        t,
        h,
    );
    (IVector::new(y[0], y[1], y[2]), RVector::new(y[3], y[4], y[5]))
}

/// Like [`propagate_ir`], but with the singular feedback `Δ = −Ω₀²·R_z`
/// closed on the integrated R (a self-consistency check of the singular
/// manifold rather than an open-loop replay).
pub fn propagate_ir_feedback(
    i0: IVector,
    r0: RVector,
    omega0: f64,
    t: f64,
    h: f64,
) -> (IVector, RVector) {
    let y = ode::rk4_integrate(
        |_, y: &[f64; 6]| {
            let d = -omega0 * omega0 * y[5];
            ir_rhs(d, omega0, y)
        },
        0.0,
        [i0.x, i0.y, i0.z, r0.x, r0.y, r0.z],
        t,
        h,
    );
    (IVector::new(y[0], y[1], y[2]), RVector::new(y[3], y[4], y[5]))
}
