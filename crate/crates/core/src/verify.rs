//! Ground-truth verification: numerical integration of the two-level
//! Schrödinger equation, fidelities, robustness functionals and α-sweeps.
//!
//! The Hamiltonian (scaled units) is
//!
//! ```text
//! H = ½ [[−Δ(t), (1+α)Ω(t)], [(1+α)Ω(t), Δ(t)]],
//! ```
//!
//! where `α` is the constant relative error on the coupling. Alongside the
//! state the same RK4 stepper accumulates the robustness functionals
//! `E(t) = ∫ e`, `F(t) = ∫ f` with `e = Ω·Re(a* b)` and `f = (Ω/2)(a²−b²)`;
//! `F(t_f) = 0` is the second-order robustness condition for state
//! transfers, and `E(t_f) = F(t_f) = 0` for gates.

use crate::ode;
use crate::protocol::ControlProtocol;
use crate::rspace::{r_from_state, AdjointParams, RVector, RspaceError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("norm drift {drift} exceeds 1e-7 (step too large?)")]
    NormDrift { drift: f64 },
    #[error("state not normalized: |a|²+|b|² = {norm2}")]
    NotNormalized { norm2: f64 },
    #[error(transparent)]
    Rspace(#[from] RspaceError),
}

/// A normalized two-level state (or an SU(2) propagator through its
/// Cayley–Klein column `(a, b)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    pub a: Complex64,
    pub b: Complex64,
}

impl QubitState {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self, VerifyError> {
        let norm2 = a.norm_sqr() + b.norm_sqr();
        if (norm2 - 1.0).abs() > 1e-9 {
            return Err(VerifyError::NotNormalized { norm2 });
        }
        Ok(Self { a, b })
    }

    /// `|0⟩ = (1, 0)` — also the identity propagator's first column.
    pub fn ground() -> Self {
        Self {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    /// First column of the target gate `−iσ_x`: `(0, −i)`.
    pub fn not_gate_target() -> Self {
        Self {
            a: Complex64::new(0.0, 0.0),
            b: Complex64::new(0.0, -1.0),
        }
    }

    /// Target of the half transfer to the `−y` Bloch axis (global phase
    /// dropped): `((1+i)/2, (1−i)/2)`.
    pub fn half_transfer_target() -> Self {
        Self {
            a: Complex64::new(0.5, 0.5),
            b: Complex64::new(0.5, -0.5),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    /// Population of the excited level, `|b|²`.
    pub fn population_excited(&self) -> f64 {
        self.b.norm_sqr()
    }
}

/// Accumulated robustness functionals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustnessFunctionals {
    pub e_int: f64,
    pub f_int: Complex64,
}

/// One recorded step of an integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub state: QubitState,
    pub functionals: RobustnessFunctionals,
}

fn rhs(protocol: &ControlProtocol, alpha: f64, t: f64, y: &[f64; 7]) -> [f64; 7] {
    let (delta, omega) = protocol.controls_at(t);
    let a = Complex64::new(y[0], y[1]);
    let b = Complex64::new(y[2], y[3]);
    let w = (1.0 + alpha) * omega;
    // i·ȧ = ½(−Δ a + (1+α)Ω b);  i·ḃ = ½((1+α)Ω a + Δ b)
    let da = Complex64::new(0.0, -0.5) * (-delta * a + w * b);
    let db = Complex64::new(0.0, -0.5) * (w * a + delta * b);
    // e and f are defined with the nominal coupling Ω(t)
    let e = omega * (a.conj() * b).re;
    let f = 0.5 * omega * (a * a - b * b);
    [da.re, da.im, db.re, db.im, e, f.re, f.im]
}

fn pack(psi0: &QubitState) -> [f64; 7] {
    [
        psi0.a.re, psi0.a.im, psi0.b.re, psi0.b.im, 0.0, 0.0, 0.0,
    ]
}

fn unpack(y: &[f64; 7]) -> (QubitState, RobustnessFunctionals) {
    (
        QubitState {
            a: Complex64::new(y[0], y[1]),
            b: Complex64::new(y[2], y[3]),
        },
        RobustnessFunctionals {
            e_int: y[4],
            f_int: Complex64::new(y[5], y[6]),
        },
    )
}

/// RK4 integration recording every step. Singular arcs are evaluated
/// analytically at the stage times.
pub fn integrate(
    protocol: &ControlProtocol,
    psi0: &QubitState,
    alpha: f64,
    h: f64,
) -> Result<Vec<TrajectoryPoint>, VerifyError> {
    assert!(h > 0.0);
    let tf = protocol.duration();
    let mut out = Vec::new();
    ode::rk4_trace(
        |t, y| rhs(protocol, alpha, t, y),
        0.0,
        pack(psi0),
        tf,
        h,
        |t, y| {
            let (state, functionals) = unpack(y);
            out.push(TrajectoryPoint {
                t,
                state,
                functionals,
            });
        },
    );
    let last = out.last().expect("at least the initial point");
    let drift = (last.state.norm_sqr() - 1.0).abs();
    if drift > 1e-7 {
        return Err(VerifyError::NormDrift { drift });
    }
    Ok(out)
}

/// Same integration without storing the trajectory.
pub fn integrate_final(
    protocol: &ControlProtocol,
    psi0: &QubitState,
    alpha: f64,
    h: f64,
) -> Result<(QubitState, RobustnessFunctionals), VerifyError> {
    assert!(h > 0.0);
    let tf = protocol.duration();
    let y = ode::rk4_integrate(|t, y| rhs(protocol, alpha, t, y), 0.0, pack(psi0), tf, h);
    let (state, functionals) = unpack(&y);
    let drift = (state.norm_sqr() - 1.0).abs();
    if drift > 1e-7 {
        return Err(VerifyError::NormDrift { drift });
    }
    Ok((state, functionals))
}

/// State fidelity `|⟨target|ψ⟩|²`.
pub fn fidelity_state(psi: &QubitState, target: &QubitState) -> f64 {
    let ov = target.a.conj() * psi.a + target.b.conj() * psi.b;
    ov.norm_sqr()
}

/// Gate fidelity against the fixed target `−iσ_x` (first column `(0, −i)`):
/// `𝓕_g = Re⟨ψ_f|ψ⟩ = −Im b(t_f)`.
pub fn fidelity_gate(psi: &QubitState) -> f64 {
    -psi.b.im
}

/// `−log₁₀` merit of an infidelity, floored at 1e−16.
pub fn merit(infidelity: f64) -> f64 {
    -infidelity.max(1e-16).log10()
}

/// `(|F(t_f)|, |E(t_f)|)` from accumulated functionals — the second-order
/// robustness conditions (only `|F|` matters for state transfers).
pub fn check_robustness_conditions(functionals: &RobustnessFunctionals) -> (f64, f64) {
    (functionals.f_int.norm(), functionals.e_int.abs())
}

/// Which infidelity a sweep reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FidelityMetric {
    /// `1 − |b(t_f)|²` — phase-free population transfer.
    PopulationTransfer,
    /// `1 − |⟨target|ψ⟩|²`.
    State(QubitState),
    /// `1 − 𝓕_g` against the `−iσ_x` gate.
    Gate,
}

impl FidelityMetric {
    pub fn infidelity(&self, psi: &QubitState) -> f64 {
        match self {
            FidelityMetric::PopulationTransfer => 1.0 - psi.population_excited(),
            FidelityMetric::State(target) => 1.0 - fidelity_state(psi, target),
            FidelityMetric::Gate => 1.0 - fidelity_gate(psi),
        }
    }
}

/// Result of an inhomogeneity sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub alphas: Vec<f64>,
    pub infidelities: Vec<f64>,
    /// Coefficient of α² from a least-squares fit of `c₀ + c₂α² + c₄α⁴` on
    /// the sub-grid `|α| ≤ 0.02`. The α⁴ term is part of the model so that
    /// the quartic tail of robust protocols does not leak into `c₂`; for a
    /// protocol with residual `F(t_f)` this estimates `|F(t_f)|²`.
    pub fitted_quadratic_coeff: f64,
    /// Log-log slope of infidelity vs α on `α ∈ [0.005, 0.05]` (≈2 for a
    /// non-robust pulse, ≈4 when the α² term is nulled).
    pub fitted_loglog_slope: f64,
}

/// Sweep the infidelity over a symmetric α grid of `n` points.
pub fn robustness_sweep(
    protocol: &ControlProtocol,
    psi0: &QubitState,
    metric: FidelityMetric,
    alpha_max: f64,
    n: usize,
    h: f64,
) -> Result<SweepResult, VerifyError> {
    let alphas: Vec<f64> = if alpha_max == 0.0 || n < 2 {
        vec![0.0]
    } else {
        (0..n)
            .map(|i| -alpha_max + 2.0 * alpha_max * i as f64 / (n - 1) as f64)
            .collect()
    };
    use rayon::prelude::*;
    let infidelities: Vec<f64> = alphas
        .par_iter()
        .map(|&alpha| {
            integrate_final(protocol, psi0, alpha, h).map(|(psi, _)| metric.infidelity(&psi))
        })
        .collect::<Result<_, _>>()?;
    let fitted_quadratic_coeff = fit_quadratic_coeff(&alphas, &infidelities);
    let fitted_loglog_slope = fit_loglog_slope(&alphas, &infidelities);
    Ok(SweepResult {
        alphas,
        infidelities,
        fitted_quadratic_coeff,
        fitted_loglog_slope,
    })
}

/// α² coefficient of `c₀ + c₂α² + c₄α⁴` on `|α| ≤ 0.02` (falls back to the
/// plain quadratic model when fewer than three distinct α² values exist).
pub fn fit_quadratic_coeff(alphas: &[f64], infidelities: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = alphas
        .iter()
        .zip(infidelities)
        .filter(|(a, _)| a.abs() <= 0.02 + 1e-12)
        .map(|(a, i)| (a * a, *i))
        .collect();
    let mut xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-18);
    if xs.len() >= 3 {
        // Normal equations for [1, x, x²] with x = α², scaled for conditioning.
        let s = xs.last().copied().unwrap_or(1.0).max(1e-300);
        let mut m = [[0.0f64; 3]; 3];
        let mut rhs = [0.0f64; 3];
        for &(x, y) in &pts {
            let u = x / s;
            let row = [1.0, u, u * u];
            for i in 0..3 {
                for j in 0..3 {
                    m[i][j] += row[i] * row[j];
                }
                rhs[i] += row[i] * y;
            }
        }
        if let Some(c) = solve3(m, rhs) {
            return c[1] / s;
        }
    }
    if xs.len() >= 2 {
        // c₀ + c₂α²
        let (mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        let n = pts.len() as f64;
        for &(x, y) in &pts {
            sx += x;
            sxx += x * x;
            sy += y;
            sxy += x * y;
        }
        let denom = n * sxx - sx * sx;
        if denom.abs() > 1e-300 {
            return (n * sxy - sx * sy) / denom;
        }
    }
    f64::NAN
}

/// Slope of `log₁₀(infid)` vs `log₁₀(α)` on `α ∈ [0.005, 0.05]`.
pub fn fit_loglog_slope(alphas: &[f64], infidelities: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = alphas
        .iter()
        .zip(infidelities)
        .filter(|(a, i)| **a >= 0.005 - 1e-12 && **a <= 0.05 + 1e-12 && **i > 0.0)
        .map(|(a, i)| (a.log10(), i.max(1e-300).log10()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let (mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in &pts {
        sx += x;
        sxx += x * x;
        sy += y;
        sxy += x * y;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..3 {
                    m[row][k] -= f * m[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    Some([b[0] / m[0][0], b[1] / m[1][1], b[2] / m[2][2]])
}

/// The resonant π-pulse (`Δ = 0`, `Ω = Ω₀ = 1`, duration π): the reference
/// non-robust protocol. Its `|∫f|²` is exactly `π²/4` (f ≡ ½ along it), and
/// as a gate it implements `−iσ_x` nominally.
pub fn pi_pulse_protocol(delta0: f64) -> ControlProtocol {
    ControlProtocol::bang(0.0, 1.0, std::f64::consts::PI, delta0, 1.0)
}

/// Project the integrated state onto R with the given adjoint constants —
/// the reduction's defining consistency: along a protocol this must track
/// the analytic R-space propagation.
pub fn r_projection(psi: &QubitState, adj: &AdjointParams) -> Result<RVector, VerifyError> {
    Ok(r_from_state(psi.a, psi.b, adj)?)
}
