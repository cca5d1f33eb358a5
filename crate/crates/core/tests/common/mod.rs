//! Shared test oracles, independent of the library's evaluation paths:
//! adaptive Simpson quadrature in the amplitude variable for the elliptic
//! integrals, and bisection inversion for the Jacobi amplitude.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (whole, m, fm) = simpson(&f, a, fa, b, fb);
    recurse(&f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// First-kind incomplete integral in the amplitude form,
/// `F(φ|m) = ∫₀^φ dθ/√(1 − m sin²θ)` by quadrature.
pub fn oracle_f_phi(phi: f64, m: f64) -> f64 {
    adaptive_simpson(|t| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, phi, 1e-13)
}

/// Quarter period by quadrature.
pub fn oracle_k(m: f64) -> f64 {
    oracle_f_phi(std::f64::consts::FRAC_PI_2, m)
}

/// Second-kind incomplete integral `E(φ|m) = ∫₀^φ √(1 − m sin²θ) dθ`.
pub fn oracle_e_phi(phi: f64, m: f64) -> f64 {
    adaptive_simpson(|t| (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, phi, 1e-13)
}

/// Third-kind integral at characteristic `m`,
/// `Π(m; φ|m) = ∫₀^φ dθ/(1 − m sin²θ)^{3/2}`.
pub fn oracle_pi_mm_phi(phi: f64, m: f64) -> f64 {
    adaptive_simpson(|t| (1.0 - m * t.sin().powi(2)).powf(-1.5), 0.0, phi, 1e-13)
}

/// Amplitude `am(u, m)` for `|u| ≤ K(m)` by bisection on the quadrature
/// oracle (the inverse of `oracle_f_phi`).
pub fn oracle_amplitude(u: f64, m: f64) -> f64 {
    let mut lo = -std::f64::consts::FRAC_PI_2;
    let mut hi = std::f64::consts::FRAC_PI_2;
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if oracle_f_phi(mid, m) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `(sn, cn, dn)(u, m)` for `|u| < K(m)` through the bisection amplitude.
pub fn oracle_jacobi(u: f64, m: f64) -> (f64, f64, f64) {
    let phi = oracle_amplitude(u, m);
    let sn = phi.sin();
    (sn, phi.cos(), (1.0 - m * sn * sn).sqrt())
}

/// Random point with a positive effective energy `E_z` (the sd-branch
/// domain), bounded modulus, and the control-amplitude bound `r ≤ Δ₀`.
pub fn random_sd_branch_point(r: &mut ChaCha8Rng, delta0: f64) -> pulseforge::RVector {
    loop {
        let p = pulseforge::RVector::new(
            r.gen_range(-0.8..0.95),
            r.gen_range(-1.4..1.4),
            r.gen_range(-0.9..0.9),
        );
        if p.energy_z() > 0.05 {
            if let Ok(arc) = pulseforge::SingularArc::from_initial(p) {
                if arc.m.get() < 0.95 && arc.rz_amplitude() <= delta0 {
                    return p;
                }
            }
        }
    }
}
