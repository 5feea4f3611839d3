//! Reference-frame algebra and the rotational/translational kinematics of the
//! yaw-pitch gimbal chain.
//!
//! Frames: `F_o` inertial, `F_b` base (3-2-1 Euler from `F_o`), `F_a` yaw
//! gimbal (rotation `psi_a` about `z_b`), `F_m` pitch gimbal (rotation
//! `theta_m` about `y_a`). `rot3(psi)` maps components expressed in the rotated
//! frame to the parent frame, so `rot3(-psi_a)` takes `F_b` components to `F_a`
//! components.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::params::GimbalParams;

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

pub const STANDARD_GRAVITY: f64 = 9.80665;

pub fn u1() -> Vec3 {
    Vec3::new(1.0, 0.0, 0.0)
}

pub fn u2() -> Vec3 {
    Vec3::new(0.0, 1.0, 0.0)
}

pub fn u3() -> Vec3 {
    Vec3::new(0.0, 0.0, 1.0)
}

/// Direction-cosine matrix for a rotation about the x axis.
pub fn rot1(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    Mat3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

/// Direction-cosine matrix for a rotation about the y axis.
pub fn rot2(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    Mat3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Direction-cosine matrix for a rotation about the z axis.
pub fn rot3(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Skew-symmetric cross-product matrix: `tilde(v) * w == v.cross(&w)`.
pub fn tilde(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Joint coordinates of the two gimbals.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GimbalState {
    pub psi_a: f64,
    pub theta_m: f64,
    pub psi_a_dot: f64,
    pub theta_m_dot: f64,
}

impl GimbalState {
    pub fn new(psi_a: f64, theta_m: f64, psi_a_dot: f64, theta_m_dot: f64) -> Self {
        Self {
            psi_a,
            theta_m,
            psi_a_dot,
            theta_m_dot,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.psi_a.is_finite()
            && self.theta_m.is_finite()
            && self.psi_a_dot.is_finite()
            && self.theta_m_dot.is_finite()
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.psi_a, self.theta_m, self.psi_a_dot, self.theta_m_dot]
    }

    pub fn from_array(x: [f64; 4]) -> Self {
        Self::new(x[0], x[1], x[2], x[3])
    }
}

/// Joint accelerations `(psi_a_ddot, theta_m_ddot)` in rad/s².
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JointAccel {
    pub psi_a: f64,
    pub theta_m: f64,
}

impl JointAccel {
    pub fn new(psi_a: f64, theta_m: f64) -> Self {
        Self { psi_a, theta_m }
    }
}

/// Motion of the base platform relative to the inertial frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseMotion {
    /// 3-2-1 Euler angles `(psi_b, theta_b, phi_b)` taking `F_o` to `F_b`.
    pub euler_321: [f64; 3],
    /// Angular velocity `[p, q, r]` in `F_b`.
    pub omega_b: Vec3,
    /// Angular acceleration `[p_dot, q_dot, r_dot]` in `F_b`.
    pub alpha_b: Vec3,
    /// Translational acceleration of the base CoG in `F_b`.
    pub accel_b: Vec3,
    /// Gravitational acceleration in `F_o` (z up by default).
    pub gravity_o: Vec3,
}

impl Default for BaseMotion {
    fn default() -> Self {
        Self::stationary()
    }
}

impl BaseMotion {
    /// Level, motionless base with standard gravity along `-z_o`.
    pub fn stationary() -> Self {
        Self {
            euler_321: [0.0; 3],
            omega_b: Vec3::zeros(),
            alpha_b: Vec3::zeros(),
            accel_b: Vec3::zeros(),
            gravity_o: Vec3::new(0.0, 0.0, -STANDARD_GRAVITY),
        }
    }

    pub fn without_gravity() -> Self {
        Self {
            gravity_o: Vec3::zeros(),
            ..Self::stationary()
        }
    }

    pub fn is_stationary(&self) -> bool {
        self.omega_b == Vec3::zeros()
            && self.alpha_b == Vec3::zeros()
            && self.accel_b == Vec3::zeros()
    }

    /// Maps inertial components to base components.
    pub fn inertial_to_base(&self) -> Mat3 {
        let [psi, theta, phi] = self.euler_321;
        rot1(-phi) * rot2(-theta) * rot3(-psi)
    }
}

/// Rotational kinematic quantities of both gimbals that do not depend on the
/// joint accelerations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularKinematics {
    /// `omega_a/o` in `F_a`.
    pub omega_a: Vec3,
    /// Acceleration-independent part of `alpha_a/o` in `F_a`.
    pub dalpha_a: Vec3,
    /// `omega_m/o` in `F_m`.
    pub omega_m: Vec3,
    /// Coefficient of `psi_a_ddot` in `alpha_m/o` (unit vector, `F_m`).
    pub d1alpha_m: Vec3,
    /// Acceleration-independent part of `alpha_m/o` in `F_m`.
    pub d2alpha_m: Vec3,
    /// `rot3(-psi_a)`.
    pub r3: Mat3,
    /// `rot2(-theta_m)`.
    pub r2: Mat3,
}

impl AngularKinematics {
    pub fn new(state: &GimbalState, base: &BaseMotion) -> Self {
        let r3 = rot3(-state.psi_a);
        let r2 = rot2(-state.theta_m);
        let wb_a = r3 * base.omega_b;

        let omega_a = state.psi_a_dot * u3() + wb_a;
        let dalpha_a = r3 * base.alpha_b - state.psi_a_dot * tilde(&u3()) * wb_a;

        let omega_m = state.theta_m_dot * u2() + r2 * omega_a;
        let d1alpha_m = r2 * u3();
        // d/dt of rot2(-theta_m) is -theta_m_dot * tilde(u2) * rot2(-theta_m)
        let d2alpha_m = r2 * dalpha_a - state.theta_m_dot * tilde(&u2()) * (r2 * omega_a);

        Self {
            omega_a,
            dalpha_a,
            omega_m,
            d1alpha_m,
            d2alpha_m,
            r3,
            r2,
        }
    }

    pub fn alpha_a(&self, accel: &JointAccel) -> Vec3 {
        accel.psi_a * u3() + self.dalpha_a
    }

    pub fn alpha_m(&self, accel: &JointAccel) -> Vec3 {
        accel.theta_m * u2() + accel.psi_a * self.d1alpha_m + self.d2alpha_m
    }
}

/// Angular kinematics together with the full angular accelerations
/// `(alpha_a/o in F_a, alpha_m/o in F_m)`.
pub fn angular_kinematics(
    state: &GimbalState,
    accel: &JointAccel,
    base: &BaseMotion,
) -> (AngularKinematics, Vec3, Vec3) {
    let kin = AngularKinematics::new(state, base);
    let alpha_a = kin.alpha_a(accel);
    let alpha_m = kin.alpha_m(accel);
    (kin, alpha_a, alpha_m)
}

/// Translational accelerations of the two gimbal centres of gravity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CogAccelerations {
    /// Acceleration-independent part of `a_Ga/o`, in `F_a`.
    pub da_ga: Vec3,
    /// Acceleration-independent part of `a_Gm/o`, in `F_m`.
    pub da_gm: Vec3,
    /// Full `a_Ga/o` in `F_a`.
    pub a_ga: Vec3,
    /// Full `a_Gm/o` in `F_m`.
    pub a_gm: Vec3,
}

/// Acceleration-independent CoG acceleration terms `(Da_Ga in F_a, Da_Gm in F_m)`.
pub fn cog_drift_terms(
    kin: &AngularKinematics,
    base: &BaseMotion,
    params: &GimbalParams,
) -> (Vec3, Vec3) {
    let wa = tilde(&kin.omega_a);
    let wm = tilde(&kin.omega_m);
    let wb = tilde(&base.omega_b);
    let base_joint = (tilde(&base.alpha_b) + wb * wb) * params.r_a_b + base.accel_b;

    let da_ga = (tilde(&kin.dalpha_a) + wa * wa) * params.r_ga_a + kin.r3 * base_joint;
    let da_gm = (tilde(&kin.d2alpha_m) + wm * wm) * params.r_gm_m
        + kin.r2 * kin.r3 * base_joint
        + kin.r2 * (tilde(&kin.dalpha_a) + wa * wa) * params.r_m_a;
    (da_ga, da_gm)
}

/// Coefficient vectors of the joint accelerations in the CoG accelerations:
/// `a_Ga = psi_ddot * ga_psi + Da_Ga`,
/// `a_Gm = psi_ddot * gm_psi + theta_ddot * gm_theta + Da_Gm`.
pub fn cog_accel_coefficients(
    kin: &AngularKinematics,
    params: &GimbalParams,
) -> (Vec3, Vec3, Vec3) {
    let ga_psi = tilde(&u3()) * params.r_ga_a;
    let gm_psi = kin.r2 * tilde(&u3()) * params.r_m_a + tilde(&kin.d1alpha_m) * params.r_gm_m;
    let gm_theta = tilde(&u2()) * params.r_gm_m;
    (ga_psi, gm_psi, gm_theta)
}

pub fn cog_accelerations(
    state: &GimbalState,
    accel: &JointAccel,
    base: &BaseMotion,
    params: &GimbalParams,
) -> CogAccelerations {
    let kin = AngularKinematics::new(state, base);
    let (da_ga, da_gm) = cog_drift_terms(&kin, base, params);
    let (ga_psi, gm_psi, gm_theta) = cog_accel_coefficients(&kin, params);
    CogAccelerations {
        da_ga,
        da_gm,
        a_ga: accel.psi_a * ga_psi + da_ga,
        a_gm: accel.psi_a * gm_psi + accel.theta_m * gm_theta + da_gm,
    }
}

/// Gravity resolved in the yaw and pitch gimbal frames.
pub fn gravity_in_frames(base: &BaseMotion, state: &GimbalState) -> (Vec3, Vec3) {
    let g_b = base.inertial_to_base() * base.gravity_o;
    let g_a = rot3(-state.psi_a) * g_b;
    let g_m = rot2(-state.theta_m) * g_a;
    (g_a, g_m)
}
