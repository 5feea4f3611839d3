//! Tracking controllers and torque compensators.

pub mod adrc;
pub mod inverse_ff;
pub mod nn;
pub mod pid;

use serde::{Deserialize, Serialize};

use crate::dynamics::TorqueCommand;
use crate::error::Result;
use crate::plant::Measurement;

pub use adrc::{AdrcAxisParams, AdrcController, AdrcParams, Eso};
pub use inverse_ff::{DeltaUEstimator, InverseModel, InverseModelKind};
pub use nn::NnCompensator;
pub use pid::{AxisPidGains, CascadePid, LoopGains, PidGains, PidLoop};

/// Desired position, rate and acceleration of one axis.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AxisRef {
    pub pos: f64,
    pub rate: f64,
    pub accel: f64,
}

impl AxisRef {
    pub fn new(pos: f64, rate: f64, accel: f64) -> Self {
        Self { pos, rate, accel }
    }
}

/// References for `[yaw, pitch]`.
pub type Refs = [AxisRef; 2];

/// Everything a controller may read at one control tick.
#[derive(Debug, Clone, Copy)]
pub struct ControlInput<'a> {
    pub t: f64,
    pub refs: Refs,
    pub meas: &'a Measurement,
    /// Current disturbance-torque estimate from the inverse model.
    pub delta_u: TorqueCommand,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlOutput {
    /// Feedback torque before compensation.
    pub u_d: TorqueCommand,
    /// Torque sent to the motors.
    pub u: TorqueCommand,
}

pub trait Controller: Send {
    fn step(&mut self, input: &ControlInput<'_>, dt: f64) -> Result<ControlOutput>;
    fn reset(&mut self);
}

/// Cascaded PID, optionally with the inverse-model disturbance estimate
/// subtracted from its output.
#[derive(Debug, Clone)]
pub struct PidController {
    pub pid: CascadePid,
    pub subtract_delta_u: bool,
    pub limits: [f64; 2],
}

impl Controller for PidController {
    fn step(&mut self, input: &ControlInput<'_>, dt: f64) -> Result<ControlOutput> {
        let m = input.meas;
        let u_d = self.pid.step(
            &input.refs,
            [(m.enc_psi, m.psi_a_dot), (m.enc_theta, m.theta_m_dot)],
            dt,
        );
        let u = if self.subtract_delta_u {
            u_d - input.delta_u
        } else {
            u_d
        };
        Ok(ControlOutput {
            u_d,
            u: u.saturate(self.limits[0], self.limits[1]),
        })
    }

    fn reset(&mut self) {
        self.pid.reset();
    }
}
