//! Linear active disturbance rejection control with a third-order extended
//! state observer per axis.

use serde::{Deserialize, Serialize};

use crate::control::{AxisRef, ControlInput, ControlOutput, Controller};
use crate::dynamics::{saturate, TorqueCommand};
use crate::error::{GimbalError, Result};
use crate::params::GimbalParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdrcAxisParams {
    /// Input gain estimate, 1/(kg·m²).
    pub b0: f64,
    /// Observer bandwidth, rad/s.
    pub omega_o: f64,
    /// Controller bandwidth, rad/s.
    pub omega_c: f64,
    /// Torque limit, N·m; ≤ 0 disables.
    pub saturation: f64,
    /// Use the reference rate in the derivative term.
    pub use_ref_rate: bool,
}

impl Default for AdrcAxisParams {
    fn default() -> Self {
        Self {
            b0: 1.0,
            omega_o: 100.0,
            omega_c: 25.0,
            saturation: 0.0,
            use_ref_rate: true,
        }
    }
}

impl AdrcAxisParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.b0 > 0.0 && self.omega_c > 0.0 && self.omega_o > self.omega_c) {
            return Err(GimbalError::InvalidParams(format!(
                "ADRC needs b0 > 0 and omega_o > omega_c > 0, got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdrcParams {
    pub yaw: AdrcAxisParams,
    pub pitch: AdrcAxisParams,
}

impl AdrcParams {
    /// `b0` from the rotating-inertia model, shared bandwidths.
    pub fn for_gimbal(p: &GimbalParams, omega_c: f64, omega_o: f64) -> Self {
        let axis = |j: f64| AdrcAxisParams {
            b0: 1.0 / j,
            omega_o,
            omega_c,
            ..AdrcAxisParams::default()
        };
        Self {
            yaw: axis(p.j_a[(2, 2)] + p.j_m[(2, 2)]),
            pitch: axis(p.j_m[(1, 1)]),
        }
    }
}

/// Observer gains placing all three poles at `-omega_o`.
pub fn eso_gains(omega_o: f64) -> [f64; 3] {
    [
        3.0 * omega_o,
        3.0 * omega_o * omega_o,
        omega_o * omega_o * omega_o,
    ]
}

/// Extended state: position `z1`, rate `z2`, total disturbance `z3`
/// (acceleration units).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Eso {
    pub z1: f64,
    pub z2: f64,
    pub z3: f64,
}

impl Eso {
    pub fn reset(&mut self) {
        *self = Eso::default();
    }

    /// Forward-Euler update with measurement `y` and the input `u` applied
    /// over the last interval.
    pub fn update(&mut self, y: f64, u: f64, b0: f64, omega_o: f64, dt: f64) {
        let [l1, l2, l3] = eso_gains(omega_o);
        let e = y - self.z1;
        let z1 = self.z1 + dt * (self.z2 + l1 * e);
        let z2 = self.z2 + dt * (self.z3 + b0 * u + l2 * e);
        let z3 = self.z3 + dt * (l3 * e);
        self.z1 = z1;
        self.z2 = z2;
        self.z3 = z3;
    }
}

/// One ADRC update of a single axis; returns the new torque.
pub fn adrc_step(
    r: &AxisRef,
    meas_pos: f64,
    p: &AdrcAxisParams,
    eso: &mut Eso,
    last_u: f64,
    dt: f64,
) -> f64 {
    eso.update(meas_pos, last_u, p.b0, p.omega_o, dt);
    let kp = p.omega_c * p.omega_c;
    let kd = 2.0 * p.omega_c;
    let ref_rate = if p.use_ref_rate { r.rate } else { 0.0 };
    let u = (kp * (r.pos - eso.z1) + kd * (ref_rate - eso.z2) - eso.z3) / p.b0;
    saturate(u, p.saturation)
}

#[derive(Debug, Clone)]
pub struct AdrcController {
    pub params: AdrcParams,
    pub eso: [Eso; 2],
    last_u: TorqueCommand,
}

impl AdrcController {
    pub fn new(params: AdrcParams) -> Result<Self> {
        params.yaw.validate()?;
        params.pitch.validate()?;
        Ok(Self {
            params,
            eso: [Eso::default(); 2],
            last_u: TorqueCommand::ZERO,
        })
    }

    /// Start the observers at a known position and rate.
    pub fn prime(&mut self, pos: [f64; 2], rate: [f64; 2]) {
        for i in 0..2 {
            self.eso[i] = Eso {
                z1: pos[i],
                z2: rate[i],
                z3: 0.0,
            };
        }
    }
}

impl Controller for AdrcController {
    fn step(&mut self, input: &ControlInput<'_>, dt: f64) -> Result<ControlOutput> {
        let m = input.meas;
        let t_a = adrc_step(
            &input.refs[0],
            m.enc_psi,
            &self.params.yaw,
            &mut self.eso[0],
            self.last_u.t_a,
            dt,
        );
        let t_e = adrc_step(
            &input.refs[1],
            m.enc_theta,
            &self.params.pitch,
            &mut self.eso[1],
            self.last_u.t_e,
            dt,
        );
        let u = TorqueCommand::new(t_a, t_e);
        self.last_u = u;
        Ok(ControlOutput { u_d: u, u })
    }

    fn reset(&mut self) {
        self.eso = [Eso::default(); 2];
        self.last_u = TorqueCommand::ZERO;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_gains() {
        assert_eq!(eso_gains(50.0), [150.0, 7500.0, 125000.0]);
    }

    #[test]
    fn rest_stays_at_rest() {
        let p = AdrcAxisParams::default();
        let mut eso = Eso::default();
        let mut u = 0.0;
        for _ in 0..1000 {
            u = adrc_step(&AxisRef::default(), 0.0, &p, &mut eso, u, 1e-3);
            assert_eq!(u, 0.0);
        }
    }

    /// Discrete ESO on an exactly integrated double integrator with a
    /// constant input disturbance: z3 follows the continuous triple-pole
    /// response `d·(1 − e^{−x}(1 + x + x²/2))`, `x = ω_o t`, up to the Euler
    /// discretisation error.
    #[test]
    fn z3_follows_triple_pole_response() {
        let (b0, wo, dt) = (100.0, 100.0, 1e-4);
        let d = 3.0; // acceleration units
        let (mut x, mut v) = (0.0, 0.0);
        let mut eso = Eso::default();
        for n in 1..=1000 {
            // plant: x'' = d (zero control)
            x += v * dt + 0.5 * d * dt * dt;
            v += d * dt;
            eso.update(x, 0.0, b0, wo, dt);
            let s = wo * n as f64 * dt;
            let expect = d * (1.0 - (-s).exp() * (1.0 + s + 0.5 * s * s));
            assert!(
                (eso.z3 - expect).abs() < 0.03 * d,
                "n={n} z3={} expect={expect}",
                eso.z3
            );
        }
        assert!((eso.z3 - d).abs() < 0.02 * d);
    }

    #[test]
    fn rejects_inverted_bandwidths() {
        let p = AdrcAxisParams {
            omega_o: 10.0,
            omega_c: 20.0,
            ..AdrcAxisParams::default()
        };
        assert!(p.validate().is_err());
    }
}
