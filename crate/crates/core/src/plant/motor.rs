//! Brushless DC motor torque/voltage conversion.

use crate::params::MotorParams;

/// Static torque-to-voltage conversion `V = R·T/K_t + K_b·ω`.
pub fn motor_t2v(torque: f64, shaft_rate: f64, m: &MotorParams) -> f64 {
    m.r * torque / m.k_t + m.k_b * shaft_rate
}

/// Inverse of [`motor_t2v`] at the same shaft rate.
pub fn motor_v2t(voltage: f64, shaft_rate: f64, m: &MotorParams) -> f64 {
    m.k_t * (voltage - m.k_b * shaft_rate) / m.r
}

/// Winding current with the first-order `L/R` electrical pole, advanced
/// exactly for a voltage held over each step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectricalLag {
    pub motor: MotorParams,
    pub current: f64,
}

impl ElectricalLag {
    pub fn new(motor: MotorParams) -> Self {
        Self {
            motor,
            current: 0.0,
        }
    }

    /// Start in electrical steady state for the given torque.
    pub fn settled(motor: MotorParams, torque: f64) -> Self {
        Self {
            motor,
            current: torque / motor.k_t,
        }
    }

    pub fn torque(&self) -> f64 {
        self.motor.k_t * self.current
    }

    /// Advance by `dt` under voltage `v` and shaft rate `w`; returns the torque
    /// at the end of the step.
    pub fn step(&mut self, v: f64, w: f64, dt: f64) -> f64 {
        let m = &self.motor;
        let i_ss = (v - m.k_b * w) / m.r;
        let decay = (-m.r * dt / m.l).exp();
        self.current = i_ss + (self.current - i_ss) * decay;
        self.torque()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn one_amp_yaw() {
        let m = MotorParams::yaw_bench();
        assert_relative_eq!(motor_t2v(0.0615, 0.0, &m), 1.42, epsilon = 1e-15);
        assert_relative_eq!(motor_t2v(0.0, 10.0, &m), 0.616, epsilon = 1e-15);
    }

    #[test]
    fn inverse_pair() {
        let m = MotorParams::pitch_bench();
        for (t, w) in [(0.01, -3.0), (-0.2, 1.5), (0.0, 0.0), (0.07, 12.0)] {
            assert_relative_eq!(motor_v2t(motor_t2v(t, w, &m), w, &m), t, epsilon = 1e-15);
        }
    }

    #[test]
    fn lag_settles_to_static_torque() {
        let m = MotorParams::yaw_bench();
        let mut lag = ElectricalLag::new(m);
        let v = motor_t2v(0.05, 2.0, &m);
        let tau = m.l / m.r;
        lag.step(v, 2.0, tau);
        assert_relative_eq!(
            lag.torque(),
            0.05 * (1.0 - (-1.0f64).exp()),
            epsilon = 1e-12
        );
        for _ in 0..100 {
            lag.step(v, 2.0, tau);
        }
        assert_relative_eq!(lag.torque(), 0.05, epsilon = 1e-12);
    }
}
