//! The disturbed forward-dynamics plant integrated in time.

use crate::dynamics::{
    assemble, forward_solve, ForwardSolution, GimbalModel, JointFriction, TorqueCommand,
};
use crate::error::{GimbalError, Result};
use crate::kinematics::{BaseMotion, GimbalState, JointAccel};
use crate::params::GimbalParams;
use crate::plant::disturbance::DisturbanceModel;
use crate::plant::integrator::rk4_step;

/// Largest accepted physics step, s.
pub const MAX_DT: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct Plant {
    pub model: GimbalModel,
    pub disturbance: DisturbanceModel,
    /// Stop with `LimitHit` when a joint leaves its field of regard.
    pub enforce_for: bool,
}

impl Plant {
    pub fn new(params: GimbalParams, base: BaseMotion, disturbance: DisturbanceModel) -> Self {
        Self {
            model: GimbalModel::new(params, base),
            disturbance,
            enforce_for: false,
        }
    }

    pub fn params(&self) -> &GimbalParams {
        &self.model.params
    }

    /// Disturbance torques enter as joint friction `T_fr = -T_d`, so the
    /// effective drive is `u + T_d`.
    pub fn friction(&self, s: &GimbalState) -> JointFriction {
        let (da, dm) = self.disturbance.eval(s);
        JointFriction::new(-da, -dm)
    }

    pub fn solve(&self, s: &GimbalState, u: &TorqueCommand) -> Result<ForwardSolution> {
        let sys = assemble(&self.model.params, s, &self.model.base, &self.friction(s));
        forward_solve(&sys, u)
    }

    pub fn accel(&self, s: &GimbalState, u: &TorqueCommand) -> Result<JointAccel> {
        Ok(self.solve(s, u)?.accel)
    }

    fn derivative(&self, x: &[f64; 4], u: &TorqueCommand) -> Result<[f64; 4]> {
        let s = GimbalState::from_array(*x);
        if !s.is_finite() {
            return Err(GimbalError::NonFinite { t: f64::NAN });
        }
        let a = self.accel(&s, u)?;
        Ok([x[2], x[3], a.psi_a, a.theta_m])
    }

    /// Advance `dt` with `u` held constant.
    pub fn step(&self, s: &GimbalState, u: &TorqueCommand, dt: f64) -> Result<GimbalState> {
        self.step_with(s, 0.0, dt, |_, _| *u)
    }

    /// Advance `dt` from time `t` with the drive evaluated at every stage.
    pub fn step_with<U>(&self, s: &GimbalState, t: f64, dt: f64, u: U) -> Result<GimbalState>
    where
        U: Fn(f64, &GimbalState) -> TorqueCommand,
    {
        if !(dt > 0.0 && dt <= MAX_DT) {
            return Err(GimbalError::InvalidParams(format!(
                "time step {dt} s outside (0, {MAX_DT}]"
            )));
        }
        let x = rk4_step(
            |tt, x| {
                let drive = u(tt, &GimbalState::from_array(*x));
                self.derivative(x, &drive)
            },
            t,
            &s.to_array(),
            dt,
        )
        .map_err(|e| match e {
            GimbalError::NonFinite { .. } => GimbalError::NonFinite { t },
            e => e.at(t),
        })?;
        let next = GimbalState::from_array(x);
        self.check(&next, t + dt)?;
        Ok(next)
    }

    /// Finite-state and field-of-regard checks.
    pub fn check(&self, s: &GimbalState, t: f64) -> Result<()> {
        if !s.is_finite() {
            return Err(GimbalError::NonFinite { t });
        }
        if self.enforce_for {
            let p = &self.model.params;
            if s.psi_a.abs() > p.for_yaw {
                return Err(GimbalError::LimitHit {
                    axis: "yaw",
                    t,
                    angle: s.psi_a,
                    limit: p.for_yaw,
                });
            }
            if s.theta_m.abs() > p.for_pitch {
                return Err(GimbalError::LimitHit {
                    axis: "pitch",
                    t,
                    angle: s.theta_m,
                    limit: p.for_pitch,
                });
            }
        }
        Ok(())
    }
}

/// Free-function form of a single plant step.
pub fn step(
    state: &GimbalState,
    u: &TorqueCommand,
    base: &BaseMotion,
    dist: &DisturbanceModel,
    params: &GimbalParams,
    dt: f64,
) -> Result<GimbalState> {
    Plant::new(params.clone(), *base, dist.clone()).step(state, u, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn free_spin_of_balanced_body() {
        let p = GimbalParams::bench().ideal_geometry();
        let plant = Plant::new(p, BaseMotion::without_gravity(), DisturbanceModel::None);
        let mut s = GimbalState::new(0.0, 0.0, 1.0, 0.0);
        let dt = 1e-3;
        for _ in 0..100 {
            s = plant.step(&s, &TorqueCommand::ZERO, dt).unwrap();
        }
        assert_relative_eq!(s.psi_a_dot, 1.0, epsilon = 1e-12);
        assert_relative_eq!(s.psi_a, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn for_limit_stops_integration() {
        let mut plant = Plant::new(
            GimbalParams::bench(),
            BaseMotion::stationary(),
            DisturbanceModel::None,
        );
        plant.enforce_for = true;
        let mut s = GimbalState::new(0.0, 0.0, 0.0, 2.0);
        let mut hit = None;
        for i in 0..1000 {
            match plant.step(&s, &TorqueCommand::ZERO, 1e-3) {
                Ok(n) => s = n,
                Err(e) => {
                    hit = Some((i, e));
                    break;
                }
            }
        }
        match hit {
            Some((_, GimbalError::LimitHit { axis, limit, .. })) => {
                assert_eq!(axis, "pitch");
                assert_relative_eq!(limit, 20f64.to_radians());
            }
            other => panic!("expected LimitHit, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_step() {
        let plant = Plant::new(
            GimbalParams::bench(),
            BaseMotion::stationary(),
            DisturbanceModel::None,
        );
        assert!(plant
            .step(&GimbalState::default(), &TorqueCommand::ZERO, 0.02)
            .is_err());
        assert!(plant
            .step(&GimbalState::default(), &TorqueCommand::ZERO, 0.0)
            .is_err());
    }
}
