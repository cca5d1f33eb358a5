//! Synthesis and verification of robust time-optimal control pulses for a
//! two-level quantum system.
//!
//! The control problem has two bounded controls, a detuning `Δ(t)` with
//! `|Δ| ≤ Δ₀` and a Rabi frequency `Ω(t)` with `|Ω| ≤ Ω₀`, and asks for the
//! shortest protocol that reaches a target state (or gate) while being
//! insensitive, to second order, to a constant relative error `α` on `Ω`.
//! Everything here works in scaled units with `Ω₀ = 1` and time in units of
//! `1/Ω₀`.
//!
//! The pipeline, mirrored by the module layout:
//!
//! * [`elliptic`] — Jacobi elliptic functions and the elliptic integrals the
//!   closed-form trajectories are written in.
//! * [`rspace`] — analytic propagation of the reduced 3-vector `R` under
//!   singular and bang controls, plus RK4 referees for every closed form.
//! * [`ncr`] — the robustness integral `𝓡(t) = ∫ R_x dt` in closed form.
//! * [`extremal`] — the coupled `(I, R)` extremal flow, the Pontryagin
//!   Hamiltonian and switching-function diagnostics.
//! * [`shooting`] — scenario solvers that root-find the adjoint constants
//!   and emit verified candidate protocols.
//! * [`protocol`] / [`verify`] — piecewise control schedules, Schrödinger
//!   integration, fidelities and robustness sweeps.
//! * [`rio`] / [`geometric`] — two independent formulations of the same
//!   problem used for cross-validation.

pub mod elliptic;
pub mod extremal;
pub mod geometric;
pub mod ncr;
pub mod ode;
pub mod protocol;
pub mod quad;
pub mod rio;
pub mod roots;
pub mod rspace;
pub mod shooting;
pub mod verify;

pub use elliptic::{EllipticError, EllipticModulus, JacobiTriple};
pub use protocol::{ArcSegment, ControlProtocol};
pub use rspace::{NegEzArc, RVector, RegularArc, RspaceError, SingularArc};
pub use shooting::{AdjointParams, CandidateSolution, UfClass};
pub use verify::QubitState;
