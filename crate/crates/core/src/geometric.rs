//! First-order geometric model: robust control of the dephasing-driven
//! two-level system with a single bounded control `|Δ| ≤ Δ₀`.
//!
//! First-order robustness closes the curve `g₁(t) = ∫₀ᵗ e^{−iφ} dt′`
//! (`b₁ = x₁ + i y₁`) back to the origin. Extremals are circle arcs of
//! radius `1/Δ₀` (bangs) and straight lines (singular arcs, `Δ_s = 0`,
//! allowed only on the unit adjoint circle `p₁² + q₁² = 1`). The
//! second-order pair `(x₂, y₂)` is integrated along but not controlled.

use crate::quad::gl64;
use serde::{Deserialize, Serialize};

/// State of the geometric model (`φ` is the accumulated phase ∫Δ, `p_phi`
/// its adjoint momentum).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct G1Point {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
    pub phi: f64,
    pub p_phi: f64,
}

impl G1Point {
    pub fn origin() -> Self {
        Self {
            x1: 0.0,
            y1: 0.0,
            x2: 0.0,
            y2: 0.0,
            phi: 0.0,
            p_phi: 0.0,
        }
    }
}

/// Bang propagation for time `t` with `Δ = ε·Δ₀`:
/// `(x₁, y₁)` follows the circle of radius `1/Δ₀`, `φ` advances linearly,
/// and `(x₂, y₂)` are integrated by quadrature of their dynamics
/// `ẋ₂ = −cos φ·y₁ + sin φ·x₁`, `ẏ₂ = cos φ·x₁ + sin φ·y₁`.
///
/// The adjoint momentum is *not* evolved here (it needs the adjoint
/// constants); see [`p_phi_closed_form`].
pub fn geometric_bang(start: &G1Point, eps_sign: f64, delta0: f64, t: f64) -> G1Point {
    assert!(delta0 > 0.0);
    let w = eps_sign.signum() * delta0;
    let phi0 = start.phi;
    let x1 = |tau: f64| start.x1 + (phi0.cos() - (w * tau + phi0).cos()) / w;
    let y1 = |tau: f64| start.y1 - ((w * tau + phi0).sin() - phi0.sin()) / w;
    let segs = (t.abs() * delta0).ceil() as usize + 1;
    let x2 = start.x2
        + gl64().integrate_composite(0.0, t, segs, |tau| {
            let f = w * tau + phi0;
            -f.cos() * y1(tau) + f.sin() * x1(tau)
        });
    let y2 = start.y2
        + gl64().integrate_composite(0.0, t, segs, |tau| {
            let f = w * tau + phi0;
            f.cos() * x1(tau) + f.sin() * y1(tau)
        });
    G1Point {
        x1: x1(t),
        y1: y1(t),
        x2,
        y2,
        phi: w * t + phi0,
        p_phi: start.p_phi,
    }
}

/// Singular propagation: straight-line motion at unit speed with constant
/// `φ = φ_s`, `Δ_s = 0`, `p_φ ≡ 0`:
/// `x₁(t) = x₁⁽⁰⁾ + sin(φ_s)·t`, `y₁(t) = y₁⁽⁰⁾ − cos(φ_s)·t`.
pub fn geometric_singular(start: &G1Point, phi_s: f64, t: f64) -> G1Point {
    let x1 = |tau: f64| start.x1 + phi_s.sin() * tau;
    let y1 = |tau: f64| start.y1 - phi_s.cos() * tau;
    let segs = t.abs().ceil() as usize + 1;
    let x2 = start.x2
        + gl64().integrate_composite(0.0, t, segs, |tau| {
            -phi_s.cos() * y1(tau) + phi_s.sin() * x1(tau)
        });
    let y2 = start.y2
        + gl64().integrate_composite(0.0, t, segs, |tau| {
            phi_s.cos() * x1(tau) + phi_s.sin() * y1(tau)
        });
    G1Point {
        x1: x1(t),
        y1: y1(t),
        x2,
        y2,
        phi: phi_s,
        p_phi: 0.0,
    }
}

/// Momentum along the first bang (`Δ(0) = +Δ₀`, unit adjoint norm), in the
/// cosine form `p_φ(t) = p_φ⁽⁰⁾ − cos(Δ₀t − θ)/Δ₀`, where `θ` encodes the
/// adjoint direction (`q₁ = −cos θ`, `p₁ = sin θ`) and `p_φ⁽⁰⁾` is the
/// constant offset of that form.
pub fn p_phi_closed_form(p_phi0: f64, theta_adj: f64, delta0: f64, t: f64) -> f64 {
    p_phi0 - (delta0 * t - theta_adj).cos() / delta0
}

/// All zeros of the momentum (switching times) in `[0, horizon]`:
/// solutions of `cos(Δ₀t − θ) = p_φ⁽⁰⁾Δ₀`, i.e. `Δ₀t = θ ± η [2π]` with
/// `η = arccos(p_φ⁽⁰⁾Δ₀)`. Empty when `|p_φ⁽⁰⁾| > 1/Δ₀`.
pub fn geometric_switch_times(p_phi0: f64, theta_adj: f64, delta0: f64, horizon: f64) -> Vec<f64> {
    let c = p_phi0 * delta0;
    if c.abs() > 1.0 {
        return Vec::new();
    }
    let eta = c.clamp(-1.0, 1.0).acos();
    let period = 2.0 * std::f64::consts::PI;
    let mut out = Vec::new();
    for branch in [theta_adj + eta, theta_adj - eta] {
        // smallest k with (branch + 2πk)/Δ₀ ≥ 0
        let k0 = (-branch / period).ceil() as i64;
        let mut k = k0;
        loop {
            let t = (branch + period * k as f64) / delta0;
            if t > horizon + 1e-12 {
                break;
            }
            if t >= -1e-12 {
                out.push(t.max(0.0));
            }
            k += 1;
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-10);
    out
}

/// A bang–singular–bang sequence closing the first-order robustness curve.
///
/// For a diagonal target with phase `θ_f` (`φ_f = 2θ_f + 4kπ`), closure of
/// `(x₁, y₁)` forces the adjoint angle `θ ≡ φ_f/2 [π]` (branch with
/// `sin θ ≤ 0`), a singular length `τ = 2|sin θ|/Δ₀`, and bang durations
/// `t₁ = θ/Δ₀`, `t₃ = (φ_f − θ)/Δ₀`. The momentum constant is `1/Δ₀`
/// (tangential zeros — singular entry and exit).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BangSingularBang {
    pub theta_adj: f64,
    pub t1: f64,
    pub tau: f64,
    pub t3: f64,
    pub phi_f: f64,
    pub p_phi0: f64,
}

/// Construct the closing bang–singular–bang sequence for target phase
/// `θ_f` (avoid multiples of π, where the singular segment degenerates).
pub fn not_gate_construction(theta_f: f64, delta0: f64) -> BangSingularBang {
    assert!(delta0 > 0.0);
    let tau_dir = std::f64::consts::TAU;
    // θ ≡ θ_f [π] with sin θ ≤ 0, reduced into [0, 2π)
    let mut theta = theta_f.rem_euclid(tau_dir);
    if theta.sin() > 0.0 {
        theta = (theta + std::f64::consts::PI).rem_euclid(tau_dir);
    }
    let t1 = theta / delta0;
    let tau = 2.0 * theta.sin().abs() / delta0;
    // φ_f = 2θ_f + 4kπ, smallest k with t3 = (φ_f − θ)/Δ₀ ≥ 0
    let base = 2.0 * theta_f;
    let k = ((theta - base) / (2.0 * tau_dir)).ceil();
    let phi_f = base + 2.0 * tau_dir * k;
    let t3 = (phi_f - theta) / delta0;
    BangSingularBang {
        theta_adj: theta,
        t1,
        tau,
        t3,
        phi_f,
        p_phi0: 1.0 / delta0,
    }
}

impl BangSingularBang {
    /// Execute the sequence from the origin.
    pub fn execute(&self, delta0: f64) -> G1Point {
        let p0 = G1Point::origin();
        let p1 = geometric_bang(&p0, 1.0, delta0, self.t1);
        let p2 = geometric_singular(&p1, self.theta_adj, self.tau);
        geometric_bang(&p2, 1.0, delta0, self.t3)
    }

    pub fn total_time(&self) -> f64 {
        self.t1 + self.tau + self.t3
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bang_from_origin_is_the_canonical_circle() {
        let d0 = 1.5;
        let p = geometric_bang(&G1Point::origin(), 1.0, d0, 0.7);
        // circle centered (1/Δ₀, 0) of radius 1/Δ₀
        let r2 = (p.x1 - 1.0 / d0).powi(2) + p.y1 * p.y1;
        assert!((r2 - 1.0 / (d0 * d0)).abs() < 1e-14);
        assert!((p.phi - d0 * 0.7).abs() < 1e-15);
        // t = 0 identity, full circle closes
        let id = geometric_bang(&G1Point::origin(), 1.0, d0, 0.0);
        assert_eq!(id.x1, 0.0);
        let full = geometric_bang(&G1Point::origin(), 1.0, d0, std::f64::consts::TAU / d0);
        assert!(full.x1.abs() < 1e-13 && full.y1.abs() < 1e-13);
    }

    #[test]
    fn bang_x2y2_matches_rk4() {
        let d0 = 1.5;
        let t = 0.9;
        let p = geometric_bang(&G1Point::origin(), 1.0, d0, t);
        let y = crate::ode::rk4_integrate(
            |tt, y: &[f64; 5]| {
                let f = d0 * tt;
                [
                    f.sin(),
                    -f.cos(),
                    -f.cos() * y[1] + f.sin() * y[0],
                    f.cos() * y[0] + f.sin() * y[1],
                    d0,
                ]
            },
            0.0,
            [0.0; 5],
            t,
            1e-5,
        );
        assert!((p.x1 - y[0]).abs() < 1e-9);
        assert!((p.y1 - y[1]).abs() < 1e-9);
        assert!((p.x2 - y[2]).abs() < 1e-9);
        assert!((p.y2 - y[3]).abs() < 1e-9);
    }

    #[test]
    fn singular_moves_in_straight_line() {
        let start = G1Point::origin();
        let p = geometric_singular(&start, 0.0, 1.3);
        // φ_s = 0: motion along −y only
        assert_eq!(p.x1, 0.0);
        assert!((p.y1 + 1.3).abs() < 1e-15);
        assert_eq!(p.p_phi, 0.0);
        // unit speed
        let q = geometric_singular(&start, 0.9, 2.0);
        let disp = (q.x1 * q.x1 + q.y1 * q.y1).sqrt();
        assert!((disp - 2.0).abs() < 1e-13);
        // H_P = p₁ sin φ − q₁ cos φ − 1 = 0 with p₁ = sin φ_s, q₁ = −cos φ_s
        let (p1a, q1a) = (0.9f64.sin(), -(0.9f64.cos()));
        assert!((p1a * 0.9f64.sin() - q1a * 0.9f64.cos() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn switch_times_structure() {
        let d0 = 1.5;
        // |p_φ⁰| > 1/Δ₀: no zeros
        assert!(geometric_switch_times(2.0 / d0, 0.4, d0, 50.0).is_empty());
        // p_φ⁰ = 0: η = π/2, times (θ ± π/2)/Δ₀ mod 2π/Δ₀
        let theta = 0.4;
        let times = geometric_switch_times(0.0, theta, d0, 20.0);
        assert!(!times.is_empty());
        for &t in &times {
            let resid = (d0 * t - theta).cos();
            assert!(resid.abs() < 1e-10);
            // transversal zero: sign change of p_φ across it
            let before = p_phi_closed_form(0.0, theta, d0, t - 1e-4);
            let after = p_phi_closed_form(0.0, theta, d0, t + 1e-4);
            assert!(before * after < 0.0);
        }
    }

    #[test]
    fn not_gate_sequence_closes() {
        let d0 = 1.5;
        for theta_f in [0.9, 2.3, -0.6] {
            let seq = not_gate_construction(theta_f, d0);
            assert!(seq.t1 >= 0.0 && seq.tau >= 0.0 && seq.t3 >= 0.0);
            let end = seq.execute(d0);
            assert!(end.x1.abs() < 1e-6, "x1 = {} at θ_f = {theta_f}", end.x1);
            assert!(end.y1.abs() < 1e-6, "y1 = {} at θ_f = {theta_f}", end.y1);
            assert!((end.phi - seq.phi_f).abs() < 1e-12);
            // φ_f ≡ 2θ_f  [4π]
            let k = (end.phi - 2.0 * theta_f) / (4.0 * std::f64::consts::PI);
            assert!((k - k.round()).abs() < 1e-10);
            // singular entry/exit are the tangential momentum zeros
            let switches = geometric_switch_times(seq.p_phi0, seq.theta_adj, d0, seq.t1 + 1e-9);
            assert!(switches.iter().any(|&t| (t - seq.t1).abs() < 1e-9));
        }
    }
}
