//! Fixed-step classical Runge–Kutta (RK4).
//!
//! Used both by the numerical verification path and as the in-repo referee
//! for every analytic propagator in this crate.

/// One RK4 step of size `h` for `y' = f(t, y)`.
#[inline]
pub fn rk4_step<const N: usize, F>(f: &mut F, t: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, y);
    let mut ytmp = [0.0; N];
    for i in 0..N {
        ytmp[i] = y[i] + 0.5 * h * k1[i];
    }
    let k2 = f(t + 0.5 * h, &ytmp);
    for i in 0..N {
        ytmp[i] = y[i] + 0.5 * h * k2[i];
    }
    let k3 = f(t + 0.5 * h, &ytmp);
    for i in 0..N {
        ytmp[i] = y[i] + h * k3[i];
    }
    let k4 = f(t + h, &ytmp);
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrate from `t0` to `t1` with steps of at most `h` (the step count is
/// rounded up so the final time is hit exactly). Negative spans integrate
/// backwards.
pub fn rk4_integrate<const N: usize, F>(mut f: F, t0: f64, y0: [f64; N], t1: f64, h: f64) -> [f64; N]
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    assert!(h > 0.0, "step must be positive");
    let span = t1 - t0;
    if span == 0.0 {
        return y0;
    }
    let n = (span.abs() / h).ceil().max(1.0) as usize;
    let hh = span / n as f64;
    let mut y = y0;
    let mut t = t0;
    for _ in 0..n {
        y = rk4_step(&mut f, t, &y, hh);
        t += hh;
    }
    y
}

/// Like [`rk4_integrate`] but invokes `observe(t, &y)` after every step
/// (and once for the initial state).
pub fn rk4_trace<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    h: f64,
    mut observe: O,
) -> [f64; N]
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]),
{
    assert!(h > 0.0, "step must be positive");
    observe(t0, &y0);
    let span = t1 - t0;
    if span == 0.0 {
        return y0;
    }
    let n = (span.abs() / h).ceil().max(1.0) as usize;
    let hh = span / n as f64;
    let mut y = y0;
    let mut t = t0;
    for _ in 0..n {
        y = rk4_step(&mut f, t, &y, hh);
        t += hh;
        observe(t, &y);
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_fourth_order() {
        // y' = -y, y(0) = 1, exact e^{-1}
        let coarse = rk4_integrate(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 1.0, 1e-2)[0];
        let fine = rk4_integrate(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 1.0, 5e-3)[0];
        let exact = (-1.0f64).exp();
        let ratio = (coarse - exact).abs() / (fine - exact).abs();
        assert!((ratio - 16.0).abs() < 1.5, "order-4 error ratio, got {ratio}");
    }

    #[test]
    fn harmonic_oscillator_round_trip() {
        let y = rk4_integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            2.0 * std::f64::consts::PI,
            1e-4,
        );
        assert!((y[0] - 1.0).abs() < 1e-10);
        assert!(y[1].abs() < 1e-10);
    }
}
