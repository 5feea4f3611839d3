//! Learned disturbance-torque compensation around a cascaded PID.

use crate::control::{ControlInput, ControlOutput, Controller, PidController};
use crate::dynamics::TorqueCommand;
use crate::error::{GimbalError, Result};
use crate::mlp::MlpModel;

#[derive(Debug, Clone)]
pub struct NnCompensator {
    pub pid: PidController,
    pub model: MlpModel,
    pub include_u_d: bool,
}

impl NnCompensator {
    pub fn new(pid: PidController, model: MlpModel) -> Result<Self> {
        model.validate()?;
        if model.normalization.is_none() {
            return Err(GimbalError::ModelNotTrained);
        }
        let include_u_d = match model.n_in() {
            6 => false,
            8 => true,
            n => {
                return Err(GimbalError::InvalidParams(format!(
                    "compensator expects 6 or 8 inputs, model has {n}"
                )))
            }
        };
        Ok(Self {
            pid,
            model,
            include_u_d,
        })
    }

    /// Predicted disturbance torque for the desired motion.
    pub fn predict(&self, input: &ControlInput<'_>, u_d: TorqueCommand) -> Result<TorqueCommand> {
        let [a, e] = input.refs;
        let mut x = vec![a.pos, e.pos, a.rate, e.rate, a.accel, e.accel];
        if self.include_u_d {
            x.extend([u_d.t_a, u_d.t_e]);
        }
        let y = self.model.forward(&x)?;
        Ok(TorqueCommand::new(y[0], y[1]))
    }
}

/// `u = u_d − Δu_NN`: the network predicts the disturbance torque, which the
/// drive cancels.
pub fn nn_compensator_step(
    model: &MlpModel,
    features: &[f64],
    u_d: TorqueCommand,
) -> Result<TorqueCommand> {
    let y = model.forward(features)?;
    Ok(u_d - TorqueCommand::new(y[0], y[1]))
}

impl Controller for NnCompensator {
    fn step(&mut self, input: &ControlInput<'_>, dt: f64) -> Result<ControlOutput> {
        let out = self.pid.step(input, dt)?;
        let du = self.predict(input, out.u_d)?;
        Ok(ControlOutput {
            u_d: out.u_d,
            u: (out.u_d - du).saturate(self.pid.limits[0], self.pid.limits[1]),
        })
    }

    fn reset(&mut self) {
        self.pid.reset();
    }
}
