//! The reduced R-space: analytic propagation of the 3-vector `R` under
//! singular and bang (regular) controls, in scaled units `Ω₀ = 1`.
//!
//! Under the singular feedback `Δ = −R_z` (scaled) the reduced dynamics
//!
//! ```text
//! Ṙ_x = −R_z R_y,   Ṙ_y = R_z R_x − R_z,   Ṙ_z = R_y
//! ```
//!
//! conserve `|R|²`, `E_s = R_x + R_z²/2` and the effective energy
//! `E_z = R_y²/2 + (1−E_s)R_z²/2 + R_z⁴/8`, and integrate in Jacobi
//! elliptic functions. `E_z > 0` gives the oscillating `sd` branch
//! ([`SingularArc`]), `E_z < 0` with `E_s > 1` the non-crossing `nd`
//! branch ([`NegEzArc`]), and `E_z < 0` with `E_s < 1` has no solution.
//! Bang arcs follow `Ṙ = M₀R` with the Rodrigues closed form
//! ([`RegularArc`]).
//!
//! Every closed form here has an RK4 referee (`rk4_singular_reference`,
//! `rk4_regular_reference`) integrating the defining ODE directly.

use crate::elliptic::{self, EllipticError, EllipticModulus};
use crate::ode;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RspaceError {
    #[error("singular sd-branch requires E_z > 0, got E_z = {ez}")]
    NonPositiveEz { ez: f64 },
    #[error("negative-E_z branch requires E_z < 0, got E_z = {ez}")]
    NonNegativeEz { ez: f64 },
    #[error("negative-E_z branch requires E_s > 1 (got E_s = {es}): no solution")]
    NoSolution { es: f64 },
    #[error("degenerate arc (r² = {r2}, s² = {s2})")]
    Degenerate { r2: f64, s2: f64 },
    #[error("state (a, b) not normalized: |a|²+|b|² = {norm2}")]
    NotNormalized { norm2: f64 },
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
}

/// The reduced adjoint-state observable, `R = p_e⟨ψ|σ|ψ⟩ + Re(p_f⟨ψ⊥|σ|ψ⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl RVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm2(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// `E_s = R_x + R_z²/2`, conserved on singular arcs.
    pub fn energy_s(&self) -> f64 {
        self.x + 0.5 * self.z * self.z
    }

    /// Effective energy of the R_z oscillator, conserved on singular arcs.
    pub fn energy_z(&self) -> f64 {
        let es = self.energy_s();
        0.5 * self.y * self.y + 0.5 * (1.0 - es) * self.z * self.z + 0.125 * self.z.powi(4)
    }
}

/// The adjoint constants of the extended control problem. `p_f = p₁ + i·p₂`
/// couples to the robustness functional `F`, `p_e` to `E`; `p_e = 0` for
/// state-to-state transfers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjointParams {
    pub p1: f64,
    pub p2: f64,
    pub pe: f64,
}

impl AdjointParams {
    pub fn new(p1: f64, p2: f64, pe: f64) -> Self {
        Self { p1, p2, pe }
    }

    pub fn state_to_state(p1: f64, p2: f64) -> Self {
        Self { p1, p2, pe: 0.0 }
    }
}

/// One analytically integrable singular arc with `E_z > 0`.
///
/// `R_z(t) = (rs/√(r²+s²))·sd(u, m)` with `u = A·t + u₀`; the sign of the
/// initial `R_y` is absorbed into the sign of the product `rs` (`rs_signed`),
/// keeping `r, s ≥ 0` individually.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularArc {
    pub es: f64,
    pub ez: f64,
    pub r2: f64,
    pub s2: f64,
    pub m: EllipticModulus,
    /// `A = √(r²+s²)/2`, the u-vs-t rate.
    pub a_rate: f64,
    pub u0: f64,
    pub rs_signed: f64,
}

impl SingularArc {
    /// Build the arc through `r0`. Fails when `E_z ≤ 0` (the sd branch does
    /// not exist there; see [`NegEzArc`]).
    pub fn from_initial(r0: RVector) -> Result<Self, RspaceError> {
        let eps = if r0.y >= 0.0 { 1.0 } else { -1.0 };
        Self::from_initial_signed(r0, eps)
    }

    /// Like [`SingularArc::from_initial`] with an explicit `ε = sgn(rs)`.
    /// Only meaningful at turning points (`R_y = 0`), where both time
    /// directions generate valid arcs; elsewhere the sign must match
    /// `sgn(R_y)` for the round trip to hold.
    pub fn from_initial_signed(r0: RVector, eps: f64) -> Result<Self, RspaceError> {
        let es = r0.energy_s();
        let ez = r0.energy_z();
        if ez <= 0.0 {
            return Err(RspaceError::NonPositiveEz { ez });
        }
        let disc = ((1.0 - es).powi(2) + 2.0 * ez).sqrt();
        let r2 = -2.0 * (1.0 - es) + 2.0 * disc;
        let s2 = 2.0 * (1.0 - es) + 2.0 * disc;
        if r2 <= 0.0 || s2 <= 0.0 {
            return Err(RspaceError::Degenerate { r2, s2 });
        }
        let m = EllipticModulus::new(r2 / (r2 + s2))?;
        let a_rate = 0.5 * (r2 + s2).sqrt();
        let rs_signed = eps.signum() * (r2 * s2).sqrt();
        let u0 = elliptic::inverse_sd((r2 + s2).sqrt() / rs_signed * r0.z, m)?;
        Ok(Self {
            es,
            ez,
            r2,
            s2,
            m,
            a_rate,
            u0,
            rs_signed,
        })
    }

    #[inline]
    pub fn u_at(&self, t: f64) -> f64 {
        self.a_rate * t + self.u0
    }

    /// Quarter period of R_z in the `u` variable.
    pub fn quarter_period_u(&self) -> f64 {
        elliptic::complete_k(self.m)
    }

    /// Full period of R_z in time, `4K(m)/A`.
    pub fn period(&self) -> f64 {
        4.0 * elliptic::complete_k(self.m) / self.a_rate
    }

    /// Closed-form `R(t)`; valid for any real `t`.
    pub fn r_at(&self, t: f64) -> RVector {
        self.r_at_u(self.u_at(t))
    }

    /// Same, parameterized by `u` directly.
    pub fn r_at_u(&self, u: f64) -> RVector {
        let t = elliptic::jacobi(u, self.m);
        let nd2 = 1.0 / (t.dn * t.dn);
        RVector {
            x: self.es + 0.5 * self.s2 - 0.5 * self.s2 * nd2,
            y: 0.5 * self.rs_signed * t.cn * nd2,
            z: self.rs_signed / (self.r2 + self.s2).sqrt() * t.sn / t.dn,
        }
    }

    /// Amplitude of the R_z oscillation (`max |R_z| = r`).
    pub fn rz_amplitude(&self) -> f64 {
        self.r2.sqrt()
    }
}

/// Propagate a singular arc for a time `t` from its generating point.
pub fn propagate_singular(arc: &SingularArc, t: f64) -> RVector {
    arc.r_at(t)
}

/// A bang arc: constant `Δ = ±Δ₀`, `Ω = ±Ω₀`, rotation rate `ω = √(Δ² + Ω²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularArc {
    pub delta: f64,
    pub omega: f64,
    pub w: f64,
    pub r0: RVector,
}

impl RegularArc {
    pub fn new(delta: f64, omega: f64, r0: RVector) -> Self {
        Self {
            delta,
            omega,
            w: delta.hypot(omega),
            r0,
        }
    }

    /// The conserved `E_r = Δ·R_z − Ω·R_x`.
    pub fn energy_r(&self, r: &RVector) -> f64 {
        self.delta * r.z - self.omega * r.x
    }

    /// `R(t) = e^{M₀t} R(0)` by the Rodrigues form
    /// `e^{M₀t} = 1 + (1 − cos ωt) M₀²/ω² + sin(ωt) M₀/ω`.
    pub fn r_at(&self, t: f64) -> RVector {
        let (d, o, w) = (self.delta, self.omega, self.w);
        let (s, c) = (w * t).sin_cos();
        let f1 = (1.0 - c) / (w * w);
        let sw = s / w;
        let r = self.r0;
        // M₀ rows: (0, Δ, 0), (−Δ, 0, −Ω), (0, Ω, 0)
        let m_r = [d * r.y, -d * r.x - o * r.z, o * r.y];
        // M₀² rows: (−Δ², 0, −ΔΩ), (0, −ω², 0), (−ΔΩ, 0, −Ω²)
        let m2_r = [
            -d * d * r.x - d * o * r.z,
            -w * w * r.y,
            -d * o * r.x - o * o * r.z,
        ];
        RVector {
            x: r.x + f1 * m2_r[0] + sw * m_r[0],
            y: r.y + f1 * m2_r[1] + sw * m_r[1],
            z: r.z + f1 * m2_r[2] + sw * m_r[2],
        }
    }
}

/// Propagate a regular (bang) arc for a time `t`.
pub fn propagate_regular(arc: &RegularArc, t: f64) -> RVector {
    arc.r_at(t)
}

/// The `E_z < 0` singular branch (`E_s > 1` required): `R_z` never changes
/// sign and follows `R_z = q·nd(u, m)` with `u = (o/2)·t + u₀` and
/// `m = 1 − q²/o²`.
///
/// The stated source formulas (`m = (o²−q²)/2`, rate `o²/2`) fail the RK4
/// referee; the forms used here match it to ~1e−14 (see tests). The sign of
/// the non-crossing `R_z` lives in `q` (`|q| = √q2`); `o > 0` always.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegEzArc {
    pub es: f64,
    pub ez: f64,
    pub o2: f64,
    pub q2: f64,
    /// Signed lower root: `sgn(q) = sgn(R_z)` on the whole arc.
    pub q: f64,
    pub m: EllipticModulus,
    pub u0: f64,
}

/// Admissibility of the `E_z < 0` branch for given energies: `E_z` must be
/// negative and `E_s > 1` (both roots of the turning-point polynomial are
/// then positive). For `E_s < 1` both roots are negative and the motion has
/// no solution. Note that real initial points always satisfy `E_s > 1`
/// whenever `E_z < 0` (every term of `E_z` is nonnegative when `E_s ≤ 1`),
/// so the no-solution case can only be probed through raw energies.
pub fn negez_branch_admissible(es: f64, ez: f64) -> Result<(), RspaceError> {
    if ez >= 0.0 {
        return Err(RspaceError::NonNegativeEz { ez });
    }
    if es <= 1.0 {
        return Err(RspaceError::NoSolution { es });
    }
    Ok(())
}

impl NegEzArc {
    pub fn from_initial(r0: RVector) -> Result<Self, RspaceError> {
        let es = r0.energy_s();
        let ez = r0.energy_z();
        negez_branch_admissible(es, ez)?;
        let disc = ((es - 1.0).powi(2) + 2.0 * ez).max(0.0).sqrt();
        let o2 = 2.0 * ((es - 1.0) + disc);
        let q2 = 2.0 * ((es - 1.0) - disc);
        if q2 <= 0.0 || o2 <= q2 {
            return Err(RspaceError::Degenerate { r2: o2, s2: q2 });
        }
        let m = EllipticModulus::new(1.0 - q2 / o2)?;
        let q = q2.sqrt().copysign(r0.z);
        let u0_mag = elliptic::inverse_nd(r0.z / q, m)?;
        // nd rises on [0, K]; sn·cn ≥ 0 there, so sgn(Ṙ_z) = sgn(q)·sgn(u₀ side).
        let u0 = if r0.y * q >= 0.0 { u0_mag } else { -u0_mag };
        Ok(Self {
            es,
            ez,
            o2,
            q2,
            q,
            m,
            u0,
        })
    }

    pub fn u_at(&self, t: f64) -> f64 {
        0.5 * self.o2.sqrt() * t + self.u0
    }

    pub fn r_at(&self, t: f64) -> RVector {
        let o = self.o2.sqrt();
        let u = self.u_at(t);
        let tr = elliptic::jacobi(u, self.m);
        let z = self.q / tr.dn;
        let y = self.q * 0.5 * o * self.m.get() * tr.sn * tr.cn / (tr.dn * tr.dn);
        RVector {
            x: self.es - 0.5 * z * z,
            y,
            z,
        }
    }
}

/// Propagate the negative-`E_z` branch for a time `t`.
pub fn propagate_negez(arc: &NegEzArc, t: f64) -> RVector {
    arc.r_at(t)
}

/// The singular feedback control `Δ_s = −Ω₀²·R_z`.
pub fn singular_control(r: &RVector, omega0: f64) -> f64 {
    -omega0 * omega0 * r.z
}

/// Project a normalized state `(a, b)` and adjoint constants onto `R`:
///
/// ```text
/// R = p₁·(Re(a²−b²), −Im(a²+b²), −2Re(ab))
///   + p₂·(−Im(a²−b²), −Re(a²+b²), 2Im(ab))
///   + p_e·(2Re(a*b), 2Im(a*b), |a|²−|b|²)
/// ```
///
/// The three coefficient vectors are orthonormal for normalized states, so
/// `|R|² = p₁² + p₂² + p_e²`.
pub fn r_from_state(a: Complex64, b: Complex64, adj: &AdjointParams) -> Result<RVector, RspaceError> {
    let norm2 = a.norm_sqr() + b.norm_sqr();
    if (norm2 - 1.0).abs() > 1e-10 {
        return Err(RspaceError::NotNormalized { norm2 });
    }
    let a2mb2 = a * a - b * b;
    let a2pb2 = a * a + b * b;
    let ab = a * b;
    let acb = a.conj() * b;
    Ok(RVector {
        x: adj.p1 * a2mb2.re - adj.p2 * a2mb2.im + adj.pe * 2.0 * acb.re,
        y: -adj.p1 * a2pb2.im - adj.p2 * a2pb2.re + adj.pe * 2.0 * acb.im,
        z: -adj.p1 * 2.0 * ab.re + adj.p2 * 2.0 * ab.im + adj.pe * (a.norm_sqr() - b.norm_sqr()),
    })
}

/// RK4 referee for the singular feedback flow (`Δ = −R_z`, `Ω = 1`, scaled).
pub fn rk4_singular_reference(r0: RVector, t: f64, h: f64) -> RVector {
    let y = ode::rk4_integrate(
        |_, y: &[f64; 3]| [-y[2] * y[1], y[2] * y[0] - y[2], y[1]],
        0.0,
        [r0.x, r0.y, r0.z],
        t,
        h,
    );
    RVector::new(y[0], y[1], y[2])
}

/// RK4 referee for the bang flow `Ṙ = M₀R`.
pub fn rk4_regular_reference(r0: RVector, delta: f64, omega: f64, t: f64, h: f64) -> RVector {
    let y = ode::rk4_integrate(
        |_, y: &[f64; 3]| {
            [
                delta * y[1],
                -delta * y[0] - omega * y[2],
                omega * y[1],
            ]
        },
        0.0,
        [r0.x, r0.y, r0.z],
        t,
        h,
    );
    RVector::new(y[0], y[1], y[2])
}
