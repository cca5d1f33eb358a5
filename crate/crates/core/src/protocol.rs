//! Piecewise control schedules.
//!
//! A [`ControlProtocol`] is an ordered list of arcs, each either a bang
//! (constant `Δ`, `Ω`), a singular arc (the feedback law `Δ_s = −Ω₀²R_z`
//! replayed open-loop by evaluating the analytic arc — no interpolation
//! error), or a sampled waveform (linear interpolation, for protocols read
//! back from files).

use crate::rspace::{singular_control, SingularArc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("control bound violated: |{name}| reaches {value}, bound {bound}")]
    BoundViolated {
        name: &'static str,
        value: f64,
        bound: f64,
    },
    #[error("sampled waveform needs at least 2 strictly increasing time stamps")]
    BadWaveform,
    #[error("arc duration must be nonnegative, got {0}")]
    NegativeDuration(f64),
}

/// One piece of a control schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArcSegment {
    Regular {
        delta: f64,
        omega: f64,
        duration: f64,
    },
    Singular {
        arc: SingularArc,
        omega0: f64,
        duration: f64,
    },
    Sampled {
        times: Vec<f64>,
        deltas: Vec<f64>,
        omegas: Vec<f64>,
    },
}

impl ArcSegment {
    pub fn duration(&self) -> f64 {
        match self {
            ArcSegment::Regular { duration, .. } | ArcSegment::Singular { duration, .. } => {
                *duration
            }
            ArcSegment::Sampled { times, .. } => times.last().copied().unwrap_or(0.0),
        }
    }

    /// Controls `(Δ, Ω)` at local time `τ ∈ [0, duration]`.
    pub fn controls_at(&self, tau: f64) -> (f64, f64) {
        match self {
            ArcSegment::Regular { delta, omega, .. } => (*delta, *omega),
            ArcSegment::Singular { arc, omega0, .. } => {
                (singular_control(&arc.r_at(tau), *omega0), *omega0)
            }
            ArcSegment::Sampled {
                times,
                deltas,
                omegas,
            } => {
                let n = times.len();
                if n == 0 {
                    return (0.0, 0.0);
                }
                if tau <= times[0] {
                    return (deltas[0], omegas[0]);
                }
                if tau >= times[n - 1] {
                    return (deltas[n - 1], omegas[n - 1]);
                }
                let i = match times.binary_search_by(|t| t.partial_cmp(&tau).unwrap()) {
                    Ok(i) => return (deltas[i], omegas[i]),
                    Err(i) => i,
                };
                let w = (tau - times[i - 1]) / (times[i] - times[i - 1]);
                (
                    deltas[i - 1] + w * (deltas[i] - deltas[i - 1]),
                    omegas[i - 1] + w * (omegas[i] - omegas[i - 1]),
                )
            }
        }
    }
}

/// An ordered control schedule with its bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlProtocol {
    pub segments: Vec<ArcSegment>,
    pub delta0: f64,
    pub omega0: f64,
}

impl ControlProtocol {
    pub fn new(segments: Vec<ArcSegment>, delta0: f64, omega0: f64) -> Result<Self, ProtocolError> {
        let p = Self {
            segments,
            delta0,
            omega0,
        };
        p.validate()?;
        Ok(p)
    }

    /// A single-bang protocol.
    pub fn bang(delta: f64, omega: f64, duration: f64, delta0: f64, omega0: f64) -> Self {
        Self {
            segments: vec![ArcSegment::Regular {
                delta,
                omega,
                duration,
            }],
            delta0,
            omega0,
        }
    }

    /// A pure singular protocol of the given duration.
    pub fn singular(arc: SingularArc, duration: f64, delta0: f64, omega0: f64) -> Self {
        Self {
            segments: vec![ArcSegment::Singular {
                arc,
                omega0,
                duration,
            }],
            delta0,
            omega0,
        }
    }

    /// Check the pointwise bounds `|Δ| ≤ Δ₀`, `|Ω| ≤ Ω₀`. Singular arcs are
    /// checked through their analytic amplitude `max|Δ_s| = Ω₀²·r`, bangs and
    /// samples through their values.
    pub fn validate(&self) -> Result<(), ProtocolError> {
        let tol = 1e-12;
        for seg in &self.segments {
            match seg {
                ArcSegment::Regular {
                    delta,
                    omega,
                    duration,
                } => {
                    if *duration < 0.0 {
                        return Err(ProtocolError::NegativeDuration(*duration));
                    }
                    if delta.abs() > self.delta0 + tol {
                        return Err(ProtocolError::BoundViolated {
                            name: "delta",
                            value: *delta,
                            bound: self.delta0,
                        });
                    }
                    if omega.abs() > self.omega0 + tol {
                        return Err(ProtocolError::BoundViolated {
                            name: "omega",
                            value: *omega,
                            bound: self.omega0,
                        });
                    }
                }
                ArcSegment::Singular {
                    arc,
                    omega0,
                    duration,
                } => {
                    if *duration < 0.0 {
                        return Err(ProtocolError::NegativeDuration(*duration));
                    }
                    let amp = omega0 * omega0 * arc.rz_amplitude();
                    if amp > self.delta0 + tol {
                        return Err(ProtocolError::BoundViolated {
                            name: "delta",
                            value: amp,
                            bound: self.delta0,
                        });
                    }
                }
                ArcSegment::Sampled {
                    times,
                    deltas,
                    omegas,
                } => {
                    if times.len() < 2
                        || times.len() != deltas.len()
                        || times.len() != omegas.len()
                        || times.windows(2).any(|w| w[1] <= w[0])
                    {
                        return Err(ProtocolError::BadWaveform);
                    }
                    for &d in deltas {
                        if d.abs() > self.delta0 + 1e-9 {
                            return Err(ProtocolError::BoundViolated {
                                name: "delta",
                                value: d,
                                bound: self.delta0,
                            });
                        }
                    }
                    for &o in omegas {
                        if o.abs() > self.omega0 + 1e-9 {
                            return Err(ProtocolError::BoundViolated {
                                name: "omega",
                                value: o,
                                bound: self.omega0,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(ArcSegment::duration).sum()
    }

    /// Controls `(Δ, Ω)` at global time `t` (clamped into `[0, duration]`).
    pub fn controls_at(&self, t: f64) -> (f64, f64) {
        let mut start = 0.0;
        for (i, seg) in self.segments.iter().enumerate() {
            let d = seg.duration();
            if t < start + d || i == self.segments.len() - 1 {
                return seg.controls_at((t - start).clamp(0.0, d));
            }
            start += d;
        }
        (0.0, 0.0)
    }

    /// Sample `(t, Δ, Ω)` rows at the given rate; the row count is
    /// `ceil(duration/rate) + 1` and the last row lands exactly on the end.
    pub fn sample(&self, rate: f64) -> Vec<(f64, f64, f64)> {
        assert!(rate > 0.0);
        let tf = self.duration();
        let n = (tf / rate).ceil() as usize;
        let mut rows = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let t = (i as f64 * rate).min(tf);
            let (d, o) = self.controls_at(t);
            rows.push((t, d, o));
        }
        rows
    }

    /// Build a sampled protocol from waveform rows `(t, Δ, Ω)`.
    pub fn from_waveform(
        rows: &[(f64, f64, f64)],
        delta0: f64,
        omega0: f64,
    ) -> Result<Self, ProtocolError> {
        let times: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let deltas: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let omegas: Vec<f64> = rows.iter().map(|r| r.2).collect();
        Self::new(
            vec![ArcSegment::Sampled {
                times,
                deltas,
                omegas,
            }],
            delta0,
            omega0,
        )
    }
}
