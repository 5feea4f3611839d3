//! Disturbance-torque estimation through an inverse gimbal model, and the
//! compensator built on it.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::dynamics::{simple_inverse, GimbalModel, SimpleYawInertia, TorqueCommand};
use crate::error::Result;
use crate::kinematics::{BaseMotion, GimbalState, JointAccel};
use crate::params::GimbalParams;

/// Which inverse model converts measured motion into torque.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InverseModelKind {
    /// Full multibody model with the plant's own parameters.
    #[default]
    Plant,
    /// Full model with offsets zeroed and diagonal inertias.
    IdealGeometry,
    /// Rotating-inertia baseline.
    Simple,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InverseModel {
    Full(GimbalModel),
    Simple {
        params: GimbalParams,
        yaw: SimpleYawInertia,
    },
}

impl InverseModel {
    pub fn build(kind: InverseModelKind, params: &GimbalParams, base: &BaseMotion) -> Self {
        match kind {
            InverseModelKind::Plant => InverseModel::Full(GimbalModel::new(params.clone(), *base)),
            InverseModelKind::IdealGeometry => {
                InverseModel::Full(GimbalModel::new(params.ideal_geometry(), *base))
            }
            InverseModelKind::Simple => InverseModel::Simple {
                params: params.clone(),
                yaw: SimpleYawInertia::Combined,
            },
        }
    }

    /// Torque the model needs to produce `accel` at `state`.
    pub fn torque(&self, state: &GimbalState, accel: &JointAccel) -> Result<TorqueCommand> {
        match self {
            InverseModel::Full(m) => Ok(m.inverse(state, accel)?.torque),
            InverseModel::Simple { params, yaw } => Ok(simple_inverse(params, accel, *yaw)),
        }
    }
}

/// `Δu = inverse(measured motion) − torque that produced it`.
///
/// With exact sensing this is the additive disturbance torque `T_d`. When the
/// acceleration is a difference quotient over `window` ticks, the applied
/// torque is averaged over the same ticks.
#[derive(Debug, Clone)]
pub struct DeltaUEstimator {
    pub model: InverseModel,
    window: usize,
    applied: VecDeque<TorqueCommand>,
}

impl DeltaUEstimator {
    pub fn new(model: InverseModel, window: usize) -> Self {
        let window = window.max(1);
        Self {
            model,
            window,
            applied: VecDeque::with_capacity(window),
        }
    }

    /// Assume `u` has been applied for the whole window.
    pub fn prefill(&mut self, u: TorqueCommand) {
        self.applied.clear();
        self.applied.extend(std::iter::repeat_n(u, self.window));
    }

    /// Record the torque applied over the interval that just started.
    pub fn record(&mut self, u: TorqueCommand) {
        self.applied.push_back(u);
        if self.applied.len() > self.window {
            self.applied.pop_front();
        }
    }

    pub fn mean_applied(&self) -> TorqueCommand {
        if self.applied.is_empty() {
            return TorqueCommand::ZERO;
        }
        let sum = self.applied.iter().fold(TorqueCommand::ZERO, |a, b| a + *b);
        sum * (1.0 / self.applied.len() as f64)
    }

    pub fn estimate(&self, state: &GimbalState, accel: &JointAccel) -> Result<TorqueCommand> {
        Ok(self.model.torque(state, accel)? - self.mean_applied())
    }
}

/// One step of the inverse-model comparison: `Δu = inverse(r, ṙ, r̈) − u_applied`.
pub fn inverse_ff_step(
    model: &InverseModel,
    state: &GimbalState,
    accel: &JointAccel,
    u_applied: TorqueCommand,
) -> Result<TorqueCommand> {
    Ok(model.torque(state, accel)? - u_applied)
}
