//! Reference trajectories with analytic rate and acceleration.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::control::AxisRef;
use crate::error::{GimbalError, Result};

fn default_edge() -> f64 {
    0.02
}
fn default_width() -> f64 {
    0.5
}
fn default_polarity() -> f64 {
    1.0
}

/// One axis of a reference, as written in a scenario file (degrees).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceSpec {
    Sine {
        amplitude_deg: f64,
        frequency_hz: f64,
        #[serde(default)]
        phase_deg: f64,
        #[serde(default)]
        offset_deg: f64,
    },
    Cosine {
        amplitude_deg: f64,
        frequency_hz: f64,
        #[serde(default)]
        phase_deg: f64,
        #[serde(default)]
        offset_deg: f64,
    },
    /// Square wave starting at `+amplitude`, with raised-cosine edges.
    Pulse {
        amplitude_deg: f64,
        period_s: f64,
        #[serde(default = "default_width")]
        width: f64,
        #[serde(default = "default_edge")]
        edge_s: f64,
        #[serde(default = "default_polarity")]
        polarity: f64,
    },
    /// Constant amplitude, frequency rising linearly from `f0` to `f1`.
    Chirp {
        amplitude_deg: f64,
        f0_hz: f64,
        f1_hz: f64,
        duration_s: f64,
    },
    /// Amplitude falling log-linearly, frequency rising linearly.
    Sweep {
        amplitude_start_deg: f64,
        amplitude_end_deg: f64,
        f0_hz: f64,
        f1_hz: f64,
        duration_s: f64,
        #[serde(default)]
        phase_deg: f64,
    },
    Hold {
        value_deg: f64,
    },
}

/// A compiled reference in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    Sine {
        amp: f64,
        omega: f64,
        phase: f64,
        offset: f64,
    },
    Pulse {
        amp: f64,
        period: f64,
        width: f64,
        edge: f64,
    },
    Chirp {
        amp: f64,
        f0: f64,
        f1: f64,
        duration: f64,
        phase: f64,
    },
    Sweep {
        a0: f64,
        a1: f64,
        f0: f64,
        f1: f64,
        duration: f64,
        phase: f64,
    },
    Hold {
        value: f64,
    },
}

impl ReferenceSpec {
    /// Largest excursion from zero, degrees.
    pub fn peak_deg(&self) -> f64 {
        match *self {
            ReferenceSpec::Sine {
                amplitude_deg,
                offset_deg,
                ..
            }
            | ReferenceSpec::Cosine {
                amplitude_deg,
                offset_deg,
                ..
            } => amplitude_deg.abs() + offset_deg.abs(),
            ReferenceSpec::Pulse { amplitude_deg, .. }
            | ReferenceSpec::Chirp { amplitude_deg, .. } => amplitude_deg.abs(),
            ReferenceSpec::Sweep {
                amplitude_start_deg,
                amplitude_end_deg,
                ..
            } => amplitude_start_deg.abs().max(amplitude_end_deg.abs()),
            ReferenceSpec::Hold { value_deg } => value_deg.abs(),
        }
    }

    pub fn is_chirp(&self) -> bool {
        matches!(self, ReferenceSpec::Chirp { .. })
    }

    /// Validate and convert to radians. `limit_rad` is the axis field of regard.
    pub fn compile(&self, limit_rad: f64) -> Result<Reference> {
        let peak = self.peak_deg();
        if !peak.is_finite() || peak > limit_rad.to_degrees() + 1e-9 {
            return Err(GimbalError::AmplitudeExceedsFor {
                amplitude_deg: peak,
                limit_deg: limit_rad.to_degrees(),
            });
        }
        let bad = |m: &str| Err(GimbalError::Config(format!("reference: {m}")));
        Ok(match *self {
            ReferenceSpec::Sine {
                amplitude_deg,
                frequency_hz,
                phase_deg,
                offset_deg,
            } => Reference::Sine {
                amp: amplitude_deg.to_radians(),
                omega: TAU * frequency_hz,
                phase: phase_deg.to_radians(),
                offset: offset_deg.to_radians(),
            },
            ReferenceSpec::Cosine {
                amplitude_deg,
                frequency_hz,
                phase_deg,
                offset_deg,
            } => Reference::Sine {
                amp: amplitude_deg.to_radians(),
                omega: TAU * frequency_hz,
                phase: phase_deg.to_radians() + PI / 2.0,
                offset: offset_deg.to_radians(),
            },
            ReferenceSpec::Pulse {
                amplitude_deg,
                period_s,
                width,
                edge_s,
                polarity,
            } => {
                if !(period_s > 0.0 && width > 0.0 && width < 1.0 && edge_s > 0.0) {
                    return bad("pulse needs period > 0, 0 < width < 1, edge > 0");
                }
                if edge_s > width.min(1.0 - width) * period_s {
                    return bad("pulse edge longer than a pulse level");
                }
                Reference::Pulse {
                    amp: polarity.signum() * amplitude_deg.to_radians(),
                    period: period_s,
                    width,
                    edge: edge_s,
                }
            }
            ReferenceSpec::Chirp {
                amplitude_deg,
                f0_hz,
                f1_hz,
                duration_s,
            } => {
                if !(duration_s > 0.0) {
                    return bad("chirp duration must be positive");
                }
                Reference::Chirp {
                    amp: amplitude_deg.to_radians(),
                    f0: f0_hz,
                    f1: f1_hz,
                    duration: duration_s,
                    phase: 0.0,
                }
            }
            ReferenceSpec::Sweep {
                amplitude_start_deg,
                amplitude_end_deg,
                f0_hz,
                f1_hz,
                duration_s,
                phase_deg,
            } => {
                if !(duration_s > 0.0) {
                    return bad("sweep duration must be positive");
                }
                if !(amplitude_start_deg > 0.0 && amplitude_end_deg > 0.0) {
                    return bad("sweep amplitudes must be positive");
                }
                Reference::Sweep {
                    a0: amplitude_start_deg.to_radians(),
                    a1: amplitude_end_deg.to_radians(),
                    f0: f0_hz,
                    f1: f1_hz,
                    duration: duration_s,
                    phase: phase_deg.to_radians(),
                }
            }
            ReferenceSpec::Hold { value_deg } => Reference::Hold {
                value: value_deg.to_radians(),
            },
        })
    }
}

/// Raised-cosine transition from `from` to `to` over `edge`, `tau` into it.
fn ramp(from: f64, to: f64, tau: f64, edge: f64) -> AxisRef {
    let d = to - from;
    let w = PI / edge;
    AxisRef::new(
        from + 0.5 * d * (1.0 - (w * tau).cos()),
        0.5 * d * w * (w * tau).sin(),
        0.5 * d * w * w * (w * tau).cos(),
    )
}

impl Reference {
    pub fn eval(&self, t: f64) -> AxisRef {
        match *self {
            Reference::Sine {
                amp,
                omega,
                phase,
                offset,
            } => {
                let (s, c) = (omega * t + phase).sin_cos();
                AxisRef::new(offset + amp * s, amp * omega * c, -amp * omega * omega * s)
            }
            Reference::Pulse {
                amp,
                period,
                width,
                edge,
            } => {
                let k = (t / period).floor();
                let tau = t - k * period;
                let fall = width * period;
                let start = if k == 0.0 { 0.0 } else { -amp };
                if tau < edge {
                    ramp(start, amp, tau, edge)
                } else if tau < fall {
                    AxisRef::new(amp, 0.0, 0.0)
                } else if tau < fall + edge {
                    ramp(amp, -amp, tau - fall, edge)
                } else {
                    AxisRef::new(-amp, 0.0, 0.0)
                }
            }
            Reference::Chirp {
                amp,
                f0,
                f1,
                duration,
                phase,
            } => {
                let k = (f1 - f0) / duration;
                let ph = TAU * (f0 * t + 0.5 * k * t * t) + phase;
                let w = TAU * (f0 + k * t);
                let dw = TAU * k;
                let (s, c) = ph.sin_cos();
                AxisRef::new(amp * s, amp * w * c, amp * (dw * c - w * w * s))
            }
            Reference::Sweep {
                a0,
                a1,
                f0,
                f1,
                duration,
                phase,
            } => {
                let g = (a1 / a0).ln() / duration;
                let a = a0 * (g * t).exp();
                let (da, dda) = (g * a, g * g * a);
                let k = (f1 - f0) / duration;
                let ph = TAU * (f0 * t + 0.5 * k * t * t) + phase;
                let w = TAU * (f0 + k * t);
                let dw = TAU * k;
                let (s, c) = ph.sin_cos();
                AxisRef::new(
                    a * s,
                    da * s + a * w * c,
                    dda * s + 2.0 * da * w * c + a * (dw * c - w * w * s),
                )
            }
            Reference::Hold { value } => AxisRef::new(value, 0.0, 0.0),
        }
    }

    /// Instantaneous frequency, Hz, where defined.
    pub fn frequency(&self, t: f64) -> Option<f64> {
        match *self {
            Reference::Sine { omega, .. } => Some(omega / TAU),
            Reference::Chirp {
                f0, f1, duration, ..
            }
            | Reference::Sweep {
                f0, f1, duration, ..
            } => Some(f0 + (f1 - f0) * t / duration),
            Reference::Pulse { period, .. } => Some(1.0 / period),
            Reference::Hold { .. } => None,
        }
    }

    /// Envelope amplitude at `t`, rad.
    pub fn amplitude(&self, t: f64) -> f64 {
        match *self {
            Reference::Sine { amp, .. }
            | Reference::Pulse { amp, .. }
            | Reference::Chirp { amp, .. } => amp.abs(),
            Reference::Sweep {
                a0, a1, duration, ..
            } => a0 * (a1 / a0).powf(t / duration),
            Reference::Hold { value } => value.abs(),
        }
    }
}

/// Sample a reference at `fs` from 0 to `duration` inclusive.
pub fn gen_reference(
    spec: &ReferenceSpec,
    limit_rad: f64,
    duration: f64,
    fs: f64,
) -> Result<Vec<(f64, AxisRef)>> {
    if !(fs > 0.0 && duration > 0.0) {
        return Err(GimbalError::Config(
            "sample rate and duration must be positive".into(),
        ));
    }
    let r = spec.compile(limit_rad)?;
    let n = (duration * fs).round() as usize;
    Ok((0..=n)
        .map(|i| {
            let t = i as f64 / fs;
            (t, r.eval(t))
        })
        .collect())
}

/// The amplitude-decreasing, frequency-increasing excitation used to collect
/// compensator training data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub azimuth_start_deg: f64,
    pub azimuth_end_deg: f64,
    pub elevation_start_deg: f64,
    pub elevation_end_deg: f64,
    pub f0_hz: f64,
    pub f1_hz: f64,
    pub duration_s: f64,
    /// Phase of the elevation axis relative to azimuth, degrees.
    pub elevation_phase_deg: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            azimuth_start_deg: 30.0,
            azimuth_end_deg: 1.0,
            elevation_start_deg: 15.0,
            elevation_end_deg: 1.0,
            f0_hz: 0.5,
            f1_hz: 5.0,
            duration_s: 30.0,
            elevation_phase_deg: 0.0,
        }
    }
}

impl SweepConfig {
    pub fn references(&self) -> [ReferenceSpec; 2] {
        [
            ReferenceSpec::Sweep {
                amplitude_start_deg: self.azimuth_start_deg,
                amplitude_end_deg: self.azimuth_end_deg,
                f0_hz: self.f0_hz,
                f1_hz: self.f1_hz,
                duration_s: self.duration_s,
                phase_deg: 0.0,
            },
            ReferenceSpec::Sweep {
                amplitude_start_deg: self.elevation_start_deg,
                amplitude_end_deg: self.elevation_end_deg,
                f0_hz: self.f0_hz,
                f1_hz: self.f1_hz,
                duration_s: self.duration_s,
                phase_deg: self.elevation_phase_deg,
            },
        ]
    }
}

/// Sampled training sweep for both axes.
pub fn generate_training_sweep(
    cfg: &SweepConfig,
    for_limits: [f64; 2],
    fs: f64,
) -> Result<Vec<(f64, [AxisRef; 2])>> {
    let [a, e] = cfg.references();
    let ya = gen_reference(&a, for_limits[0], cfg.duration_s, fs)?;
    let ye = gen_reference(&e, for_limits[1], cfg.duration_s, fs)?;
    Ok(ya
        .into_iter()
        .zip(ye)
        .map(|((t, ra), (_, re))| (t, [ra, re]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const WIDE: f64 = 1.0;

    fn fd_check(r: &Reference, ts: &[f64]) {
        let h = 1e-5;
        for &t in ts {
            let c = r.eval(t);
            let (p, m) = (r.eval(t + h), r.eval(t - h));
            let rate = (p.pos - m.pos) / (2.0 * h);
            let acc = (p.rate - m.rate) / (2.0 * h);
            assert!(
                (rate - c.rate).abs() < 1e-6 * (1.0 + c.rate.abs()),
                "rate at {t}: {rate} vs {}",
                c.rate
            );
            assert!(
                (acc - c.accel).abs() < 1e-4 * (1.0 + c.accel.abs()),
                "accel at {t}: {acc} vs {}",
                c.accel
            );
        }
    }

    #[test]
    fn sine_quarter_period_peak() {
        let s = ReferenceSpec::Sine {
            amplitude_deg: 5.0,
            frequency_hz: 1.0,
            phase_deg: 0.0,
            offset_deg: 0.0,
        };
        let r = s.compile(WIDE).unwrap();
        assert_relative_eq!(r.eval(0.25).pos.to_degrees(), 5.0, epsilon = 1e-12);
        fd_check(&r, &[0.1, 0.33, 0.9]);
    }

    #[test]
    fn pulse_levels() {
        let s = ReferenceSpec::Pulse {
            amplitude_deg: 3.0,
            period_s: 2.0,
            width: 0.5,
            edge_s: 0.02,
            polarity: 1.0,
        };
        let r = s.compile(WIDE).unwrap();
        assert_eq!(r.eval(0.0).pos, 0.0);
        for t in [0.5, 0.99, 2.5, 4.9] {
            assert_relative_eq!(r.eval(t).pos.to_degrees(), 3.0, epsilon = 1e-12);
        }
        for t in [1.5, 1.99, 3.5] {
            assert_relative_eq!(r.eval(t).pos.to_degrees(), -3.0, epsilon = 1e-12);
        }
        // continuous across edge ends
        for t in [0.02, 1.02, 2.0, 2.02] {
            let (a, b) = (r.eval(t - 1e-9), r.eval(t + 1e-9));
            assert!((a.pos - b.pos).abs() < 1e-8 && (a.rate - b.rate).abs() < 1e-5);
        }
        fd_check(&r, &[0.005, 1.013, 2.007]);
    }

    #[test]
    fn chirp_instantaneous_frequency() {
        let s = ReferenceSpec::Chirp {
            amplitude_deg: 1.0,
            f0_hz: 0.0,
            f1_hz: 20.0,
            duration_s: 10.0,
        };
        let r = s.compile(WIDE).unwrap();
        assert_relative_eq!(r.frequency(2.5).unwrap(), 5.0, epsilon = 1e-12);
        // rate / (A·2π) at a zero crossing of the phase equals f
        fd_check(&r, &[0.7, 2.5, 7.3]);
    }

    #[test]
    fn sweep_endpoints_and_derivatives() {
        let cfg = SweepConfig::default();
        let [a, _] = cfg.references();
        let r = a.compile(WIDE).unwrap();
        assert_relative_eq!(r.amplitude(0.0).to_degrees(), 30.0, epsilon = 1e-12);
        assert_relative_eq!(
            r.amplitude(cfg.duration_s).to_degrees(),
            1.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(r.frequency(0.0).unwrap(), 0.5);
        assert_relative_eq!(r.frequency(cfg.duration_s).unwrap(), 5.0, epsilon = 1e-12);
        fd_check(&r, &[0.3, 11.0, 29.0]);
    }

    #[test]
    fn sweep_fd_error_is_second_order() {
        let [a, _] = SweepConfig::default().references();
        let r = a.compile(WIDE).unwrap();
        let t = 7.7;
        let err =
            |h: f64| ((r.eval(t + h).pos - r.eval(t - h).pos) / (2.0 * h) - r.eval(t).rate).abs();
        let slope = (err(1e-2) / err(5e-3)).log2();
        assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
    }

    #[test]
    fn amplitude_beyond_field_of_regard() {
        let s = ReferenceSpec::Sine {
            amplitude_deg: 25.0,
            frequency_hz: 1.0,
            phase_deg: 0.0,
            offset_deg: 0.0,
        };
        assert!(matches!(
            s.compile(20f64.to_radians()),
            Err(GimbalError::AmplitudeExceedsFor { .. })
        ));
    }

    #[test]
    fn degrees_in_json() {
        let s: ReferenceSpec = serde_json::from_str(r#"{"kind":"hold","value_deg":90}"#).unwrap();
        let r = s.compile(PI).unwrap();
        assert_relative_eq!(r.eval(3.0).pos, PI / 2.0);
    }
}
