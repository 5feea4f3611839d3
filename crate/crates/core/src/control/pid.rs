//! Cascaded position → rate → torque PID per axis.

use serde::{Deserialize, Serialize};

use crate::control::{AxisRef, Refs};
use crate::dynamics::{saturate, TorqueCommand};

/// Gains of one PID loop. Limits ≤ 0 disable the corresponding clamp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LoopGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Cutoff of the first-order derivative filter, Hz.
    pub d_filter_hz: f64,
    /// Bound on the integrator contribution (output units).
    pub i_clamp: f64,
    /// Output saturation.
    pub out_limit: f64,
}

impl Default for LoopGains {
    fn default() -> Self {
        Self {
            kp: 0.0,
            ki: 0.0,
            kd: 0.0,
            d_filter_hz: 100.0,
            i_clamp: 0.0,
            out_limit: 0.0,
        }
    }
}

/// A PID with the derivative taken on the (filtered) measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct PidLoop {
    pub gains: LoopGains,
    integ: f64,
    d_term: f64,
    prev_meas: Option<f64>,
}

impl PidLoop {
    pub fn new(gains: LoopGains) -> Self {
        Self {
            gains,
            integ: 0.0,
            d_term: 0.0,
            prev_meas: None,
        }
    }

    pub fn integrator(&self) -> f64 {
        self.integ
    }

    pub fn reset(&mut self) {
        self.integ = 0.0;
        self.d_term = 0.0;
        self.prev_meas = None;
    }

    pub fn step(&mut self, setpoint: f64, meas: f64, dt: f64) -> f64 {
        let g = &self.gains;
        let e = setpoint - meas;
        self.integ = saturate(self.integ + g.ki * e * dt, g.i_clamp);
        if g.kd != 0.0 {
            if let Some(prev) = self.prev_meas {
                let tau = 1.0 / (2.0 * std::f64::consts::PI * g.d_filter_hz);
                self.d_term = (tau * self.d_term - g.kd * (meas - prev)) / (tau + dt);
            }
        }
        self.prev_meas = Some(meas);
        saturate(g.kp * e + self.integ + self.d_term, g.out_limit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AxisPidGains {
    /// Position loop, output rad/s.
    pub position: LoopGains,
    /// Rate loop, output N·m.
    pub rate: LoopGains,
    /// Add the reference rate to the rate command.
    pub rate_ff: bool,
    /// Gain on the reference acceleration added to the torque, kg·m².
    pub accel_ff: f64,
}

impl Default for AxisPidGains {
    fn default() -> Self {
        Self {
            position: LoopGains::default(),
            rate: LoopGains::default(),
            rate_ff: true,
            accel_ff: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PidGains {
    pub yaw: AxisPidGains,
    pub pitch: AxisPidGains,
}

impl PidGains {
    /// Crossover-based tuning on the decoupled double integrator `J·s²`:
    /// rate loop at `w_rate` rad/s with its integral corner a fifth of that,
    /// position loop at `w_pos` rad/s.
    pub fn from_bandwidth(j_yaw: f64, j_pitch: f64, w_rate: f64, w_pos: f64) -> Self {
        let axis = |j: f64| AxisPidGains {
            position: LoopGains {
                kp: w_pos,
                ki: w_pos * w_pos / 10.0,
                i_clamp: 1.0,
                ..LoopGains::default()
            },
            rate: LoopGains {
                kp: j * w_rate,
                ki: j * w_rate * w_rate / 5.0,
                i_clamp: 0.5,
                ..LoopGains::default()
            },
            rate_ff: true,
            accel_ff: 0.0,
        };
        Self {
            yaw: axis(j_yaw),
            pitch: axis(j_pitch),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct AxisCascade {
    gains: AxisPidGains,
    pos: PidLoop,
    rate: PidLoop,
}

impl AxisCascade {
    fn new(gains: AxisPidGains) -> Self {
        Self {
            gains,
            pos: PidLoop::new(gains.position),
            rate: PidLoop::new(gains.rate),
        }
    }

    fn step(&mut self, r: &AxisRef, pos: f64, rate: f64, dt: f64) -> f64 {
        let mut rate_cmd = self.pos.step(r.pos, pos, dt);
        if self.gains.rate_ff {
            rate_cmd += r.rate;
        }
        self.rate.step(rate_cmd, rate, dt) + self.gains.accel_ff * r.accel
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadePid {
    axes: [AxisCascade; 2],
}

impl CascadePid {
    pub fn new(gains: PidGains) -> Self {
        Self {
            axes: [AxisCascade::new(gains.yaw), AxisCascade::new(gains.pitch)],
        }
    }

    pub fn reset(&mut self) {
        for a in &mut self.axes {
            a.pos.reset();
            a.rate.reset();
        }
    }

    /// `meas` holds `(position, rate)` per axis.
    pub fn step(&mut self, refs: &Refs, meas: [(f64, f64); 2], dt: f64) -> TorqueCommand {
        let t_a = self.axes[0].step(&refs[0], meas[0].0, meas[0].1, dt);
        let t_e = self.axes[1].step(&refs[1], meas[1].0, meas[1].1, dt);
        TorqueCommand::new(t_a, t_e)
    }
}

/// Convenience form of one cascade update on an existing controller.
pub fn pid_cascade_step(
    pid: &mut CascadePid,
    refs: &Refs,
    meas: [(f64, f64); 2],
    dt: f64,
) -> TorqueCommand {
    pid.step(refs, meas, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_error_zero_torque() {
        let mut pid = CascadePid::new(PidGains::from_bandwidth(0.006, 0.003, 100.0, 25.0));
        let u = pid.step(&[AxisRef::default(); 2], [(0.0, 0.0); 2], 1e-3);
        assert_eq!(u, TorqueCommand::ZERO);
    }

    #[test]
    fn integrator_ramp_and_clamp() {
        let mut lp = PidLoop::new(LoopGains {
            ki: 2.0,
            i_clamp: 0.05,
            ..LoopGains::default()
        });
        let e = 0.01;
        for n in 1..=3000 {
            lp.step(e, 0.0, 1e-3);
            let expect = (2.0 * e * n as f64 * 1e-3).min(0.05);
            assert_relative_eq!(lp.integrator(), expect, epsilon = 1e-12);
        }
        assert_eq!(lp.integrator(), 0.05);
    }

    #[test]
    fn derivative_acts_on_measurement() {
        let mut lp = PidLoop::new(LoopGains {
            kd: 1.0,
            ..LoopGains::default()
        });
        lp.step(0.0, 0.0, 1e-3);
        // setpoint jump alone produces no derivative kick
        assert_eq!(lp.step(1.0, 0.0, 1e-3), 0.0);
        assert!(lp.step(1.0, 0.1, 1e-3) < 0.0);
    }

    #[test]
    fn output_saturation_keeps_sign() {
        let mut lp = PidLoop::new(LoopGains {
            kp: 10.0,
            out_limit: 0.3,
            ..LoopGains::default()
        });
        assert_eq!(lp.step(-1.0, 0.0, 1e-3), -0.3);
        assert_eq!(lp.step(1.0, 0.0, 1e-3), 0.3);
        assert_eq!(lp.step(0.01, 0.0, 1e-3), 0.1);
    }
}
