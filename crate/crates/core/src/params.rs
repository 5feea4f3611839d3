//! Physical parameters of the gimbal and its drive motors.

use serde::{Deserialize, Serialize};

use crate::error::{GimbalError, Result};
use crate::kinematics::{Mat3, Vec3};

/// Brushless DC motor constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotorParams {
    /// Torque constant, N·m/A.
    pub k_t: f64,
    /// Back-EMF constant, V·s/rad.
    pub k_b: f64,
    /// Winding resistance, ohm.
    pub r: f64,
    /// Winding inductance, H.
    pub l: f64,
    /// Viscous friction, N·m·s/rad.
    pub b: f64,
}

impl MotorParams {
    pub fn yaw_bench() -> Self {
        Self {
            k_t: 0.0615,
            k_b: 0.0616,
            r: 1.42,
            l: 0.67e-3,
            b: 2.15e-5,
        }
    }

    pub fn pitch_bench() -> Self {
        Self {
            k_t: 0.036,
            k_b: 0.0359,
            r: 1.31,
            l: 0.48e-3,
            b: 10.45e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.k_t, self.k_b, self.r, self.l, self.b];
        if all.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(GimbalError::InvalidParams(format!(
                "motor constants must be positive: {self:?}"
            )))
        }
    }
}

/// Mass, inertia and geometry of the two gimbals.
///
/// Offsets: `r_ga_a` yaw CoG from the outer joint (in `F_a`), `r_gm_m` pitch
/// CoG from the inner joint (in `F_m`), `r_m_a` inner joint from the outer
/// joint (in `F_a`), `r_a_b` outer joint from the base CoG (in `F_b`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GimbalParams {
    pub m_a: f64,
    pub m_m: f64,
    #[serde(with = "mat3_rows")]
    pub j_a: Mat3,
    #[serde(with = "mat3_rows")]
    pub j_m: Mat3,
    #[serde(with = "vec3_array")]
    pub r_ga_a: Vec3,
    #[serde(with = "vec3_array")]
    pub r_gm_m: Vec3,
    #[serde(with = "vec3_array")]
    pub r_m_a: Vec3,
    #[serde(with = "vec3_array")]
    pub r_a_b: Vec3,
    pub motor_yaw: MotorParams,
    pub motor_pitch: MotorParams,
    /// Field-of-regard half range, rad.
    pub for_yaw: f64,
    pub for_pitch: f64,
}

impl Default for GimbalParams {
    fn default() -> Self {
        Self::bench()
    }
}

impl GimbalParams {
    /// The bench gimbal: distances, masses, motors, limits and inertia tensors
    /// of the physical rig.
    pub fn bench() -> Self {
        let mm = 1e-3;
        Self {
            m_a: 0.555,
            m_m: 1.138,
            j_a: Mat3::new(
                0.002, -3.089e-6, 2.505e-5, //
                -3.089e-6, 0.004, 3.17e-6, //
                2.505e-5, 3.17e-6, 0.002,
            ),
            j_m: Mat3::new(
                0.004, 9.157e-6, 1.418e-5, //
                9.157e-6, 0.003, -1.355e-4, //
                1.418e-5, -1.355e-4, 0.004,
            ),
            r_ga_a: Vec3::new(0.0, 0.0, 57.5 * mm),
            r_gm_m: Vec3::new(0.0, -44.5 * mm, 0.0),
            r_m_a: Vec3::new(0.0, 44.5 * mm, 57.5 * mm),
            r_a_b: Vec3::new(31.625 * mm, 0.0, -57.5 * mm),
            motor_yaw: MotorParams::yaw_bench(),
            motor_pitch: MotorParams::pitch_bench(),
            for_yaw: 45f64.to_radians(),
            for_pitch: 20f64.to_radians(),
        }
    }

    /// Same masses and principal inertias with every offset zeroed and the
    /// inertia tensors reduced to their diagonals.
    pub fn ideal_geometry(&self) -> Self {
        Self {
            j_a: Mat3::from_diagonal(&self.j_a.diagonal()),
            j_m: Mat3::from_diagonal(&self.j_m.diagonal()),
            r_ga_a: Vec3::zeros(),
            r_gm_m: Vec3::zeros(),
            r_m_a: Vec3::zeros(),
            r_a_b: Vec3::zeros(),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m_a > 0.0 && self.m_m > 0.0 && self.m_a.is_finite() && self.m_m.is_finite()) {
            return Err(GimbalError::InvalidParams("masses must be positive".into()));
        }
        for (name, j) in [("j_a", &self.j_a), ("j_m", &self.j_m)] {
            if (j - j.transpose()).abs().max() > 1e-12 * j.abs().max() {
                return Err(GimbalError::InvalidParams(format!(
                    "{name} is not symmetric"
                )));
            }
            if j.cholesky().is_none() {
                return Err(GimbalError::InvalidParams(format!(
                    "{name} is not positive definite"
                )));
            }
        }
        let offsets = [self.r_ga_a, self.r_gm_m, self.r_m_a, self.r_a_b];
        if offsets.iter().any(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(GimbalError::InvalidParams(
                "offset vectors must be finite".into(),
            ));
        }
        if !(self.for_yaw > 0.0 && self.for_pitch > 0.0) {
            return Err(GimbalError::InvalidParams(
                "field-of-regard limits must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// 3×3 matrices as a list of rows.
pub(crate) mod mat3_rows {
    use super::Mat3;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &Mat3, s: S) -> Result<S::Ok, S::Error> {
        let rows: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]));
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Mat3, D::Error> {
        let rows = <[[f64; 3]; 3]>::deserialize(d)?;
        Ok(Mat3::from_fn(|i, j| rows[i][j]))
    }
}

pub(crate) mod vec3_array {
    use super::Vec3;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Vec3, s: S) -> Result<S::Ok, S::Error> {
        [v.x, v.y, v.z].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec3, D::Error> {
        let a = <[f64; 3]>::deserialize(d)?;
        Ok(Vec3::new(a[0], a[1], a[2]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bench_is_valid() {
        let p = GimbalParams::bench();
        p.validate().unwrap();
        p.motor_yaw.validate().unwrap();
        p.motor_pitch.validate().unwrap();
        p.ideal_geometry().validate().unwrap();
    }

    #[test]
    fn rejects_indefinite_inertia() {
        let mut p = GimbalParams::bench();
        p.j_m[(1, 1)] = -0.003;
        assert!(matches!(p.validate(), Err(GimbalError::InvalidParams(_))));
        let mut p = GimbalParams::bench();
        p.j_a[(0, 1)] = 1e-3;
        assert!(p.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = GimbalParams::bench();
        let s = serde_json::to_string(&p).unwrap();
        let back: GimbalParams = serde_json::from_str(&s).unwrap();
        assert_eq!(p, back);
    }
}
