//! Jacobi elliptic functions and elliptic integrals.
//!
//! Everything uses the parameter convention `m = k²` with `0 ≤ m < 1`
//! (`scipy`-style). The Jacobi functions are computed by the descending
//! Landen transformation on the arithmetic-geometric mean, the complete
//! integral of the first kind by the AGM directly, and the incomplete
//! second-kind integral through Carlson symmetric forms. The second-kind
//! integral uses the `u`-parameterization,
//!
//! ```text
//! E(u, m) = ∫₀ᵘ dn²(υ, m) dυ,
//! ```
//!
//! which is the convention under which the third-kind reduction
//!
//! ```text
//! Π(m; u, m) = [E(u, m) − m·sn·cn/dn] / (1 − m)
//! ```
//!
//! holds exactly (d/du of the right-hand side is nd², see the unit tests).
//!
//! Accuracy is ~1e−15 relative for `m ≤ 0.99`; closer to `m = 1` the
//! Landen recursion still converges but the last couple of digits degrade.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Errors from domain violations or (exceptional) non-convergence.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EllipticError {
    #[error("elliptic parameter m = {0} outside [0, 1)")]
    ModulusOutOfRange(f64),
    #[error("argument {x} outside the domain of {function}")]
    ArgumentOutOfRange { function: &'static str, x: f64 },
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
}

/// Validated elliptic parameter `m ∈ [0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(m: f64) -> Result<Self, EllipticError> {
        if !(0.0..1.0).contains(&m) {
            return Err(EllipticError::ModulusOutOfRange(m));
        }
        Ok(Self(m))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for EllipticModulus {
    type Error = EllipticError;
    fn try_from(m: f64) -> Result<Self, Self::Error> {
        Self::new(m)
    }
}

impl From<EllipticModulus> for f64 {
    fn from(m: EllipticModulus) -> f64 {
        m.0
    }
}

/// The triple `(sn, cn, dn)` at a common argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// Below this parameter the Landen recursion is replaced by the first-order
/// series in `m` (relative error O(m²) ≤ 1e−24).
const SMALL_M: f64 = 1e-12;
const AGM_TOL: f64 = 1e-15;
const MAX_LEVELS: usize = 32;

/// sn, cn, dn via the descending Landen transformation.
///
/// Periodic: 4K(m) for sn and cn, 2K(m) for dn; sn odd, cn and dn even.
pub fn jacobi(u: f64, m: EllipticModulus) -> JacobiTriple {
    let mv = m.get();
    if mv < SMALL_M {
        return jacobi_series(u, mv);
    }
    // Reduce modulo the full period; all three functions are 4K-periodic
    // and the phase recursion is most accurate for small |u|.
    let k4 = 4.0 * complete_k(m);
    let ur = u - (u / k4).round() * k4;
    jacobi_landen(ur, mv)
}

fn jacobi_series(u: f64, m: f64) -> JacobiTriple {
    let (s, c) = u.sin_cos();
    let corr = 0.25 * m * (u - s * c);
    JacobiTriple {
        sn: s - corr * c,
        cn: c + corr * s,
        dn: 1.0 - 0.5 * m * s * s,
    }
}

fn jacobi_landen(u: f64, m: f64) -> JacobiTriple {
    let mut a = [0.0f64; MAX_LEVELS];
    let mut c = [0.0f64; MAX_LEVELS];
    a[0] = 1.0;
    c[0] = m.sqrt();
    let mut b = (1.0 - m).sqrt();
    let mut levels = 0;
    for n in 1..MAX_LEVELS {
        a[n] = 0.5 * (a[n - 1] + b);
        c[n] = 0.5 * (a[n - 1] - b);
        b = (a[n - 1] * b).sqrt();
        levels = n;
        if c[n].abs() <= AGM_TOL * a[n] {
            break;
        }
    }
    // phi_N = 2^N a_N u, then phi_{n-1} = (phi_n + asin(c_n/a_n sin phi_n))/2.
    let mut phi = (1u64 << levels) as f64 * a[levels] * u;
    for n in (1..=levels).rev() {
        let s = (c[n] / a[n] * phi.sin()).clamp(-1.0, 1.0).asin();
        phi = 0.5 * (phi + s);
    }
    let (sn, cn) = phi.sin_cos();
    let dn = (1.0 - m * sn * sn).sqrt();
    JacobiTriple { sn, cn, dn }
}

/// sd = sn/dn. Period 4K(m), odd, range `[−1/√(1−m), 1/√(1−m)]`.
pub fn sd(u: f64, m: EllipticModulus) -> f64 {
    let t = jacobi(u, m);
    t.sn / t.dn
}

/// nd = 1/dn. Period 2K(m), even, range `[1, 1/√(1−m)]`.
pub fn nd(u: f64, m: EllipticModulus) -> f64 {
    1.0 / jacobi(u, m).dn
}

/// Complete elliptic integral of the first kind, `K(m) = π / (2·agm(1, √(1−m)))`.
pub fn complete_k(m: EllipticModulus) -> f64 {
    let mv = m.get();
    let mut a = 1.0f64;
    let mut b = (1.0 - mv).sqrt();
    while (a - b).abs() > AGM_TOL * a {
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    PI / (2.0 * a)
}

/// Complete elliptic integral of the second kind via Carlson forms.
pub fn complete_e(m: EllipticModulus) -> f64 {
    let mv = m.get();
    carlson_rf(0.0, 1.0 - mv, 1.0) - mv / 3.0 * carlson_rd(0.0, 1.0 - mv, 1.0)
}

/// Incomplete integral of the second kind in the `u`-form, `∫₀ᵘ dn² dυ`.
///
/// Odd in `u` and quasi-periodic: `E(u + 2nK, m) = E(u, m) + 2n·E(m)`.
pub fn incomplete_e(u: f64, m: EllipticModulus) -> f64 {
    if u < 0.0 {
        return -incomplete_e(-u, m);
    }
    let mv = m.get();
    if mv < SMALL_M {
        return u - 0.25 * mv * (2.0 * u - (2.0 * u).sin());
    }
    let kk = complete_k(m);
    let ec = complete_e(m);
    let n = (u / (2.0 * kk)).floor();
    let w = u - 2.0 * kk * n;
    let ew = if w <= kk {
        e_fundamental(w, mv)
    } else {
        // dn² is even about u = K over one 2K period.
        2.0 * ec - e_fundamental(2.0 * kk - w, mv)
    };
    2.0 * n * ec + ew
}

/// E(w, m) for w in [0, K], via E(φ|m) with sin φ = sn(w, m).
fn e_fundamental(w: f64, m: f64) -> f64 {
    let s = jacobi_landen(w, m).sn.clamp(0.0, 1.0);
    let s2 = s * s;
    let cc = (1.0 - s2).max(0.0);
    let q = 1.0 - m * s2;
    s * carlson_rf(cc, q, 1.0) - m / 3.0 * s * s2 * carlson_rd(cc, q, 1.0)
}

/// Third-kind integral at characteristic equal to the parameter,
/// `Π(m; u, m) = ∫₀ᵘ nd²(υ, m) dυ`, evaluated through the second-kind
/// reduction (never by quadrature).
pub fn pi_mm(u: f64, m: EllipticModulus) -> f64 {
    let mv = m.get();
    let t = jacobi(u, m);
    (incomplete_e(u, m) - mv * t.sn * t.cn / t.dn) / (1.0 - mv)
}

/// Principal inverse of sd: the unique `u ∈ [−K(m), K(m)]` with `sd(u, m) = x`.
///
/// Requires `|x| ≤ 1/√(1−m)`. Seeded by the exact first-kind inversion
/// (`sn = x/√(1+m x²)` through an arcsin), polished by Newton, with a
/// bisection fallback if Newton stalls.
pub fn inverse_sd(x: f64, m: EllipticModulus) -> Result<f64, EllipticError> {
    let mv = m.get();
    let bound = 1.0 / (1.0 - mv).sqrt();
    if !(x.abs() <= bound * (1.0 + 1e-9)) {
        return Err(EllipticError::ArgumentOutOfRange {
            function: "inverse_sd",
            x,
        });
    }
    let x = x.clamp(-bound, bound);
    let s = (x / (1.0 + mv * x * x).sqrt()).clamp(-1.0, 1.0);
    let mut u = s * carlson_rf(1.0 - s * s, 1.0 - mv * s * s, 1.0);
    let kk = complete_k(m);
    u = u.clamp(-kk, kk);
    let mut converged = false;
    for _ in 0..4 {
        let t = jacobi(u, m);
        let f = t.sn / t.dn - x;
        let df = t.cn / (t.dn * t.dn);
        if df.abs() < 1e-300 {
            break;
        }
        let du = f / df;
        u = (u - du).clamp(-kk, kk);
        if du.abs() <= 1e-15 * (1.0 + u.abs()) {
            converged = true;
            break;
        }
    }
    if !converged && (sd(u, m) - x).abs() > 1e-10 * (1.0 + x.abs()) {
        u = bisect_monotone(|v| sd(v, m) - x, -kk, kk)
            .ok_or(EllipticError::NoConvergence("inverse_sd"))?;
    }
    Ok(u)
}

/// Inverse of nd on the rising branch: `u ∈ [0, K(m)]` with `nd(u, m) = y`.
///
/// Requires `y ∈ [1, 1/√(1−m)]`.
pub fn inverse_nd(y: f64, m: EllipticModulus) -> Result<f64, EllipticError> {
    let mv = m.get();
    let bound = 1.0 / (1.0 - mv).sqrt();
    if !(y >= 1.0 - 1e-12 && y <= bound * (1.0 + 1e-9)) {
        return Err(EllipticError::ArgumentOutOfRange {
            function: "inverse_nd",
            x: y,
        });
    }
    let y = y.clamp(1.0, bound);
    if mv < SMALL_M {
        // nd ≈ 1 + (m/2) sin²u; invert the series.
        let s2 = ((y - 1.0) * 2.0 / mv.max(1e-300)).clamp(0.0, 1.0);
        return Ok(s2.sqrt().asin());
    }
    let s = (((1.0 - 1.0 / (y * y)) / mv).clamp(0.0, 1.0)).sqrt();
    let u = s * carlson_rf(1.0 - s * s, 1.0 - mv * s * s, 1.0);
    Ok(u.clamp(0.0, complete_k(m)))
}

fn bisect_monotone<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Option<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo * fhi > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || hi - lo < 1e-16 * (1.0 + mid.abs()) {
            return Some(mid);
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Carlson symmetric integral R_F(x, y, z).
///
/// Press et al., Numerical Recipes 3rd ed., §6.12; error tolerance set for
/// full double precision.
pub(crate) fn carlson_rf(x: f64, y: f64, z: f64) -> f64 {
    const ERRTOL: f64 = 0.0025;
    const THIRD: f64 = 1.0 / 3.0;
    let (mut xt, mut yt, mut zt) = (x, y, z);
    let (mut dx, mut dy, mut dz);
    let mut ave;
    loop {
        let sx = xt.sqrt();
        let sy = yt.sqrt();
        let sz = zt.sqrt();
        let lam = sx * (sy + sz) + sy * sz;
        xt = 0.25 * (xt + lam);
        yt = 0.25 * (yt + lam);
        zt = 0.25 * (zt + lam);
        ave = THIRD * (xt + yt + zt);
        dx = (ave - xt) / ave;
        dy = (ave - yt) / ave;
        dz = (ave - zt) / ave;
        if dx.abs().max(dy.abs()).max(dz.abs()) < ERRTOL {
            break;
        }
    }
    let e2 = dx * dy - dz * dz;
    let e3 = dx * dy * dz;
    (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / ave.sqrt()
}

/// Carlson symmetric integral R_D(x, y, z) (degenerate third kind).
pub(crate) fn carlson_rd(x: f64, y: f64, z: f64) -> f64 {
    const ERRTOL: f64 = 0.0015;
    let (mut xt, mut yt, mut zt) = (x, y, z);
    let mut sum = 0.0;
    let mut fac = 1.0;
    let (mut dx, mut dy, mut dz);
    let mut ave;
    loop {
        let sx = xt.sqrt();
        let sy = yt.sqrt();
        let sz = zt.sqrt();
        let lam = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (zt + lam));
        fac *= 0.25;
        xt = 0.25 * (xt + lam);
        yt = 0.25 * (yt + lam);
        zt = 0.25 * (zt + lam);
        ave = 0.2 * (xt + yt + 3.0 * zt);
        dx = (ave - xt) / ave;
        dy = (ave - yt) / ave;
        dz = (ave - zt) / ave;
        if dx.abs().max(dy.abs()).max(dz.abs()) < ERRTOL {
            break;
        }
    }
    let ea = dx * dy;
    let eb = dz * dz;
    let ec = ea - eb;
    let ed = ea - 6.0 * eb;
    let ee = ed + ec + ec;
    3.0 * sum
        + fac
            * (1.0 + ed * (-3.0 / 14.0 + 9.0 / 88.0 * ed - 4.5 / 26.0 * dz * ee)
                + dz * (1.0 / 6.0 * ee + dz * (-9.0 / 22.0 * ec + 3.0 / 26.0 * dz * ea)))
            / (ave * ave.sqrt())
}
