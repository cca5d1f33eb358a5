//! The robustness integral `𝓡(t) = ∫₀ᵗ R_x(t′) dt′` in closed form.
//!
//! `𝓡(t_f) = 0` is the necessary condition for second-order robustness that
//! the shooting solvers root-find on. On singular arcs the integral reduces
//! to third-kind elliptic integrals at characteristic `m`,
//!
//! ```text
//! 𝓡(t) = (E_s + s²/2)·t − (s²/√(r²+s²))·[Π(m; u, m) − Π(m; u₀, m)],
//! ```
//!
//! on bang arcs to circular functions. Multi-period `u` is handled by the
//! quasi-periodicity of the second-kind integral inside `pi_mm`, never by
//! naive large-argument evaluation.
//!
//! The sign of the bang-arc `R_y⁽⁰⁾` term: the source formula carries
//! `[cos(ωt) − 1]`, which fails both `d𝓡/dt = R_x` and direct quadrature;
//! the form implemented here uses `[1 − cos(ωt)]` and passes both (see the
//! tests against the Gauss–Legendre referee).

use crate::elliptic;
use crate::rspace::{RegularArc, RspaceError, SingularArc};

/// Closed-form `𝓡(t)` along a singular arc (valid for any `t ≥ 0`,
/// including many periods).
pub fn ncr_singular(arc: &SingularArc, t: f64) -> f64 {
    let uf = arc.u_at(t);
    let pi_diff = elliptic::pi_mm(uf, arc.m) - elliptic::pi_mm(arc.u0, arc.m);
    (arc.es + 0.5 * arc.s2) * t - arc.s2 / (arc.r2 + arc.s2).sqrt() * pi_diff
}

/// Closed-form `𝓡(t)` along a bang arc:
/// `R_x⁽⁰⁾t + (Δ/ω³)(sin ωt − ωt)(ΔR_x⁽⁰⁾ + ΩR_z⁽⁰⁾) + (Δ/ω²)(1 − cos ωt)R_y⁽⁰⁾`.
pub fn ncr_regular(arc: &RegularArc, t: f64) -> f64 {
    let (d, o, w) = (arc.delta, arc.omega, arc.w);
    let r0 = arc.r0;
    let (s, c) = (w * t).sin_cos();
    r0.x * t + d / w.powi(3) * (s - w * t) * (d * r0.x + o * r0.z) + d / (w * w) * (1.0 - c) * r0.y
}

/// `𝓡` over a bang arc on `[0, t_s]` concatenated with the singular arc
/// re-seeded at `R(t_s)`, up to `t_f`. Fails when the singular branch is not
/// admissible at the switching point (`E_z ≤ 0`).
pub fn ncr_concat(reg: &RegularArc, t_s: f64, t_f: f64) -> Result<f64, RspaceError> {
    debug_assert!(t_s >= 0.0 && t_f >= t_s);
    if t_s >= t_f {
        return Ok(ncr_regular(reg, t_f));
    }
    let switch_point = reg.r_at(t_s);
    let arc = SingularArc::from_initial(switch_point)?;
    Ok(ncr_regular(reg, t_s) + ncr_singular(&arc, t_f - t_s))
}
