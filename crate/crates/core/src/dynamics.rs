//! Newton–Euler equations of the two gimbal bodies assembled as one linear
//! system in the joint accelerations and the joint reactions:
//!
//! ```text
//! F·[psi_ddot, theta_ddot]ᵀ + R·x = D + G·[T_a, T_e]ᵀ
//! x = [F_am(3), F_ab(3), M_amx, M_amz, M_abx, M_aby]
//! ```
//!
//! Row blocks: yaw translation, yaw rotation (about the yaw CoG, in `F_a`),
//! pitch translation, pitch rotation (about the pitch CoG, in `F_m`). The same
//! matrices give the forward problem (unknown accelerations) and the inverse
//! problem (unknown torques) by swapping which columns are unknown.
//!
//! `F_am` is the force the pitch gimbal exerts on the yaw gimbal, `F_ab` the
//! force the base exerts on the yaw gimbal, both in `F_a`. `T_e` is the torque
//! the pitch motor applies to the pitch gimbal about `y_m`; the yaw gimbal
//! receives its reaction.

use nalgebra::{Matrix3x2, SMatrix, SVector, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::kinematics::{
    cog_accel_coefficients, cog_drift_terms, gravity_in_frames, tilde, u2, u3, AngularKinematics,
    BaseMotion, GimbalState, JointAccel, Vec3,
};
use crate::linalg::Lu;
use crate::params::GimbalParams;

pub type Mat12x2 = SMatrix<f64, 12, 2>;
pub type Mat12x10 = SMatrix<f64, 12, 10>;
pub type Mat12 = SMatrix<f64, 12, 12>;
pub type Vec12 = SVector<f64, 12>;

/// Unknown-vector layout shared by the forward and inverse problems.
pub const SLOT_NAMES: [&str; 12] = [
    "psi_ddot|T_ac",
    "theta_ddot|T_ec",
    "F_amx",
    "F_amy",
    "F_amz",
    "F_abx",
    "F_aby",
    "F_abz",
    "M_amx",
    "M_amz",
    "M_abx",
    "M_aby",
];

/// Drive torques: `t_a` yaw, `t_e` pitch (N·m).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TorqueCommand {
    pub t_a: f64,
    pub t_e: f64,
}

impl TorqueCommand {
    pub const ZERO: TorqueCommand = TorqueCommand { t_a: 0.0, t_e: 0.0 };

    pub fn new(t_a: f64, t_e: f64) -> Self {
        Self { t_a, t_e }
    }

    /// Symmetric clamp to `±limit` per axis. Non-positive limits disable it.
    pub fn saturate(self, limit_a: f64, limit_e: f64) -> Self {
        Self {
            t_a: saturate(self.t_a, limit_a),
            t_e: saturate(self.t_e, limit_e),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.t_a.is_finite() && self.t_e.is_finite()
    }
}

impl std::ops::Add for TorqueCommand {
    type Output = TorqueCommand;
    fn add(self, o: TorqueCommand) -> TorqueCommand {
        TorqueCommand::new(self.t_a + o.t_a, self.t_e + o.t_e)
    }
}

impl std::ops::Sub for TorqueCommand {
    type Output = TorqueCommand;
    fn sub(self, o: TorqueCommand) -> TorqueCommand {
        TorqueCommand::new(self.t_a - o.t_a, self.t_e - o.t_e)
    }
}

impl std::ops::Mul<f64> for TorqueCommand {
    type Output = TorqueCommand;
    fn mul(self, k: f64) -> TorqueCommand {
        TorqueCommand::new(self.t_a * k, self.t_e * k)
    }
}

pub fn saturate(x: f64, limit: f64) -> f64 {
    if limit > 0.0 {
        x.clamp(-limit, limit)
    } else {
        x
    }
}

/// Joint disturbance torques `(T_fra, T_frm)`, each opposing its motor's drive.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JointFriction {
    pub t_fra: f64,
    pub t_frm: f64,
}

impl JointFriction {
    pub fn new(t_fra: f64, t_frm: f64) -> Self {
        Self { t_fra, t_frm }
    }
}

/// Joint reaction forces and constraint moments.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ReactionSet {
    pub f_am: [f64; 3],
    pub f_ab: [f64; 3],
    pub m_amx: f64,
    pub m_amz: f64,
    pub m_abx: f64,
    pub m_aby: f64,
}

impl ReactionSet {
    fn from_slots(x: &Vec12) -> Self {
        Self {
            f_am: [x[2], x[3], x[4]],
            f_ab: [x[5], x[6], x[7]],
            m_amx: x[8],
            m_amz: x[9],
            m_abx: x[10],
            m_aby: x[11],
        }
    }

    pub fn to_array(&self) -> [f64; 10] {
        [
            self.f_am[0],
            self.f_am[1],
            self.f_am[2],
            self.f_ab[0],
            self.f_ab[1],
            self.f_ab[2],
            self.m_amx,
            self.m_amz,
            self.m_abx,
            self.m_aby,
        ]
    }

    pub fn f_am_vec(&self) -> Vec3 {
        Vec3::from(self.f_am)
    }

    pub fn f_ab_vec(&self) -> Vec3 {
        Vec3::from(self.f_ab)
    }
}

/// The assembled matrices of the joint system at one state.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrices {
    pub f: Mat12x2,
    pub r: Mat12x10,
    pub d: Vec12,
    pub g: Mat12x2,
}

fn put3(m: &mut Mat12x10, row: usize, col: usize, block: &nalgebra::Matrix3<f64>) {
    m.fixed_view_mut::<3, 3>(row, col).copy_from(block);
}

/// Selector placing `(M_x, M_z)` into a 3-vector.
fn sel_xz() -> Matrix3x2<f64> {
    Matrix3x2::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0)
}

/// Selector placing `(M_x, M_y)` into a 3-vector.
fn sel_xy() -> Matrix3x2<f64> {
    Matrix3x2::new(1.0, 0.0, 0.0, 1.0, 0.0, 0.0)
}

/// Assemble `F`, `R`, `D`, `G` for the given state, base motion and joint
/// disturbance torques. Parameters are assumed validated.
pub fn assemble(
    params: &GimbalParams,
    state: &GimbalState,
    base: &BaseMotion,
    friction: &JointFriction,
) -> SystemMatrices {
    let kin = AngularKinematics::new(state, base);
    let (g_a, g_m) = gravity_in_frames(base, state);
    let (da_ga, da_gm) = cog_drift_terms(&kin, base, params);
    let (ga_psi, gm_psi, gm_theta) = cog_accel_coefficients(&kin, params);
    let r2 = kin.r2;

    let mut f = Mat12x2::zeros();
    let mut r = Mat12x10::zeros();
    let mut d = Vec12::zeros();
    let mut g = Mat12x2::zeros();
    let eye = nalgebra::Matrix3::<f64>::identity();

    // yaw gimbal, translation: m_a (a_Ga - g_a) = F_am + F_ab
    f.fixed_view_mut::<3, 1>(0, 0)
        .copy_from(&(params.m_a * ga_psi));
    put3(&mut r, 0, 0, &(-eye));
    put3(&mut r, 0, 3, &(-eye));
    d.fixed_view_mut::<3, 1>(0, 0)
        .copy_from(&(-params.m_a * da_ga + params.m_a * g_a));

    // yaw gimbal, rotation about its CoG
    let arm_m = params.r_m_a - params.r_ga_a;
    let arm_b = -params.r_ga_a;
    f.fixed_view_mut::<3, 1>(3, 0)
        .copy_from(&(params.j_a * u3()));
    put3(&mut r, 3, 0, &(-tilde(&arm_m)));
    put3(&mut r, 3, 3, &(-tilde(&arm_b)));
    r.fixed_view_mut::<3, 2>(3, 6).copy_from(&(-sel_xz()));
    r.fixed_view_mut::<3, 2>(3, 8).copy_from(&(-sel_xy()));
    let wa = kin.omega_a;
    let yaw_rot = -params.j_a * kin.dalpha_a - tilde(&wa) * params.j_a * wa
        + Vec3::new(0.0, friction.t_frm, -friction.t_fra);
    d.fixed_view_mut::<3, 1>(3, 0).copy_from(&yaw_rot);
    g[(4, 1)] = -1.0;
    g[(5, 0)] = 1.0;

    // pitch gimbal, translation: m_m (a_Gm - g_m) = -rot2(-theta) F_am
    f.fixed_view_mut::<3, 1>(6, 0)
        .copy_from(&(params.m_m * gm_psi));
    f.fixed_view_mut::<3, 1>(6, 1)
        .copy_from(&(params.m_m * gm_theta));
    put3(&mut r, 6, 0, &r2);
    d.fixed_view_mut::<3, 1>(6, 0)
        .copy_from(&(-params.m_m * da_gm + params.m_m * g_m));

    // pitch gimbal, rotation about its CoG
    f.fixed_view_mut::<3, 1>(9, 0)
        .copy_from(&(params.j_m * kin.d1alpha_m));
    f.fixed_view_mut::<3, 1>(9, 1)
        .copy_from(&(params.j_m * u2()));
    put3(&mut r, 9, 0, &(-tilde(&params.r_gm_m) * r2));
    r.fixed_view_mut::<3, 2>(9, 6).copy_from(&(r2 * sel_xz()));
    let wm = kin.omega_m;
    let pitch_rot = -params.j_m * kin.d2alpha_m - tilde(&wm) * params.j_m * wm
        + r2 * Vec3::new(0.0, -friction.t_frm, 0.0);
    d.fixed_view_mut::<3, 1>(9, 0).copy_from(&pitch_rot);
    g.fixed_view_mut::<3, 1>(9, 1).copy_from(&(r2 * u2()));

    SystemMatrices { f, r, d, g }
}

impl SystemMatrices {
    pub fn forward_matrix(&self) -> Mat12 {
        let mut a = Mat12::zeros();
        a.fixed_view_mut::<12, 2>(0, 0).copy_from(&self.f);
        a.fixed_view_mut::<12, 10>(0, 2).copy_from(&self.r);
        a
    }

    pub fn inverse_matrix(&self) -> Mat12 {
        let mut a = Mat12::zeros();
        a.fixed_view_mut::<12, 2>(0, 0).copy_from(&(-self.g));
        a.fixed_view_mut::<12, 10>(0, 2).copy_from(&self.r);
        a
    }
}

/// Solution of the forward problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardSolution {
    pub accel: JointAccel,
    pub reactions: ReactionSet,
}

/// Solution of the inverse problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseSolution {
    pub torque: TorqueCommand,
    pub reactions: ReactionSet,
}

/// Joint accelerations and reactions produced by the drive torques `u`.
pub fn forward_solve(sys: &SystemMatrices, u: &TorqueCommand) -> Result<ForwardSolution> {
    let rhs = sys.d + sys.g * Vector2::new(u.t_a, u.t_e);
    let x = Lu::factor(&sys.forward_matrix())?.solve(&rhs);
    Ok(ForwardSolution {
        accel: JointAccel::new(x[0], x[1]),
        reactions: ReactionSet::from_slots(&x),
    })
}

/// Drive torques and reactions required for the commanded joint accelerations.
pub fn inverse_solve(sys: &SystemMatrices, commanded: &JointAccel) -> Result<InverseSolution> {
    let rhs = sys.d - sys.f * Vector2::new(commanded.psi_a, commanded.theta_m);
    let x = Lu::factor(&sys.inverse_matrix())?.solve(&rhs);
    Ok(InverseSolution {
        torque: TorqueCommand::new(x[0], x[1]),
        reactions: ReactionSet::from_slots(&x),
    })
}

/// Which yaw inertia the rotating-inertia baseline uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimpleYawInertia {
    /// `J_azz + J_mzz`: both bodies spin in azimuth at zero pitch.
    #[default]
    Combined,
    YawOnly,
}

impl SimpleYawInertia {
    pub fn value(self, params: &GimbalParams) -> f64 {
        match self {
            SimpleYawInertia::Combined => params.j_a[(2, 2)] + params.j_m[(2, 2)],
            SimpleYawInertia::YawOnly => params.j_a[(2, 2)],
        }
    }
}

/// Rotating-inertia baseline model: `T_ac = J_yaw·psi_ddot`, `T_ec = J_myy·theta_ddot`.
pub fn simple_inverse(
    params: &GimbalParams,
    commanded: &JointAccel,
    yaw: SimpleYawInertia,
) -> TorqueCommand {
    TorqueCommand::new(
        yaw.value(params) * commanded.psi_a,
        params.j_m[(1, 1)] * commanded.theta_m,
    )
}

/// A gimbal model bound to a base motion: the convenience surface used by
/// the plant and the controllers.
#[derive(Debug, Clone, PartialEq)]
pub struct GimbalModel {
    pub params: GimbalParams,
    pub base: BaseMotion,
}

impl GimbalModel {
    pub fn new(params: GimbalParams, base: BaseMotion) -> Self {
        Self { params, base }
    }

    pub fn forward(
        &self,
        state: &GimbalState,
        u: &TorqueCommand,
        friction: &JointFriction,
    ) -> Result<ForwardSolution> {
        forward_solve(&assemble(&self.params, state, &self.base, friction), u)
    }

    pub fn inverse(&self, state: &GimbalState, accel: &JointAccel) -> Result<InverseSolution> {
        inverse_solve(
            &assemble(&self.params, state, &self.base, &JointFriction::default()),
            accel,
        )
    }

    /// Kinetic energy of both bodies (rotation plus CoG translation) for a
    /// stationary base, and the gravitational potential relative to the
    /// outer joint.
    pub fn energy(&self, state: &GimbalState) -> (f64, f64) {
        let p = &self.params;
        let kin = AngularKinematics::new(state, &self.base);
        let (wa, wm) = (kin.omega_a, kin.omega_m);
        // CoG velocities (stationary base): v = omega x r, chained through the joints.
        let v_ga = wa.cross(&p.r_ga_a);
        let v_m_joint_a = wa.cross(&p.r_m_a);
        let v_gm = kin.r2 * v_m_joint_a + wm.cross(&p.r_gm_m);
        let t = 0.5 * wa.dot(&(p.j_a * wa))
            + 0.5 * wm.dot(&(p.j_m * wm))
            + 0.5 * p.m_a * v_ga.norm_squared()
            + 0.5 * p.m_m * v_gm.norm_squared();
        let (g_a, g_m) = gravity_in_frames(&self.base, state);
        let pos_ga = p.r_ga_a;
        let pos_gm_m = kin.r2 * p.r_m_a + p.r_gm_m;
        let v = -p.m_a * g_a.dot(&pos_ga) - p.m_m * g_m.dot(&pos_gm_m);
        (t, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::Matrix3;

    fn diag_params() -> GimbalParams {
        GimbalParams::bench().ideal_geometry()
    }

    #[test]
    fn null_input_at_rest() {
        let p = diag_params();
        let sys = assemble(
            &p,
            &GimbalState::default(),
            &BaseMotion::without_gravity(),
            &JointFriction::default(),
        );
        assert_eq!(sys.d, Vec12::zeros());
        // only the inertia columns survive in F
        let mut expect = Mat12x2::zeros();
        expect
            .fixed_view_mut::<3, 1>(3, 0)
            .copy_from(&(p.j_a * u3()));
        expect
            .fixed_view_mut::<3, 1>(9, 0)
            .copy_from(&(p.j_m * u3()));
        expect
            .fixed_view_mut::<3, 1>(9, 1)
            .copy_from(&(p.j_m * u2()));
        assert_eq!(sys.f, expect);
        let fw = forward_solve(&sys, &TorqueCommand::ZERO).unwrap();
        assert_eq!(fw.accel, JointAccel::default());
        assert!(fw.reactions.to_array().iter().all(|v| *v == 0.0));
        let inv = inverse_solve(&sys, &JointAccel::default()).unwrap();
        assert_eq!(inv.torque, TorqueCommand::ZERO);
    }

    #[test]
    fn structural_invariants() {
        let p = GimbalParams::bench();
        let s = GimbalState::new(0.2, -0.1, 0.5, 0.3);
        let sys = assemble(
            &p,
            &s,
            &BaseMotion::stationary(),
            &JointFriction::new(0.01, 0.02),
        );
        for i in 0..3 {
            assert_eq!(
                sys.g.row(i).iter().copied().collect::<Vec<_>>(),
                vec![0.0, 0.0]
            );
        }
        assert_eq!(
            sys.g.fixed_view::<3, 2>(3, 0).into_owned(),
            Matrix3x2::new(0.0, 0.0, 0.0, -1.0, 1.0, 0.0)
        );
        // friction enters the yaw moment rows opposing each drive
        let sys0 = assemble(&p, &s, &BaseMotion::stationary(), &JointFriction::default());
        let diff = sys.d - sys0.d;
        assert_relative_eq!(diff[5], -0.01, epsilon = 1e-15);
        assert_relative_eq!(diff[4], 0.02, epsilon = 1e-15);
        assert_relative_eq!(diff[10], -0.02, epsilon = 1e-15);
        assert!(diff.fixed_rows::<3>(0).iter().all(|v| *v == 0.0));
        assert!(diff.fixed_rows::<3>(6).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn gravity_rows_at_rest() {
        let p = GimbalParams::bench();
        let base = BaseMotion::stationary();
        let s = GimbalState::new(0.3, 0.2, 0.0, 0.0);
        let sys = assemble(&p, &s, &base, &JointFriction::default());
        let (g_a, g_m) = gravity_in_frames(&base, &s);
        assert_relative_eq!(
            sys.d.fixed_rows::<3>(0).into_owned(),
            p.m_a * g_a,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            sys.d.fixed_rows::<3>(6).into_owned(),
            p.m_m * g_m,
            epsilon = 1e-15
        );
    }

    #[test]
    fn static_support_forces() {
        let p = GimbalParams::bench();
        let base = BaseMotion {
            gravity_o: Vec3::new(0.0, 0.0, -9.81),
            ..BaseMotion::stationary()
        };
        let sys = assemble(
            &p,
            &GimbalState::default(),
            &base,
            &JointFriction::default(),
        );
        let fw = forward_solve(&sys, &TorqueCommand::ZERO).unwrap();
        assert_relative_eq!(fw.reactions.f_am_vec().norm(), 1.138 * 9.81, epsilon = 1e-9);
        assert_relative_eq!(
            fw.reactions.f_ab_vec().norm(),
            (0.555 + 1.138) * 9.81,
            epsilon = 1e-9
        );
        assert_relative_eq!(fw.accel.psi_a, 0.0, epsilon = 1e-12);
        assert_relative_eq!(fw.accel.theta_m, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn balanced_pitch_needs_no_holding_torque() {
        let p = GimbalParams::bench();
        for th in [-0.3, 0.0, 0.25] {
            let sys = assemble(
                &p,
                &GimbalState::new(0.1, th, 0.0, 0.0),
                &BaseMotion::stationary(),
                &JointFriction::default(),
            );
            let inv = inverse_solve(&sys, &JointAccel::default()).unwrap();
            assert!(inv.torque.t_e.abs() < 1e-12, "T_ec = {}", inv.torque.t_e);
        }
    }

    #[test]
    fn decoupled_yaw_inertia() {
        let p = diag_params();
        let sys = assemble(
            &p,
            &GimbalState::default(),
            &BaseMotion::without_gravity(),
            &JointFriction::default(),
        );
        let fw = forward_solve(&sys, &TorqueCommand::new(0.01, 0.0)).unwrap();
        let j = p.j_a[(2, 2)] + p.j_m[(2, 2)];
        assert_relative_eq!(fw.accel.psi_a, 0.01 / j, epsilon = 1e-10);
        assert_relative_eq!(fw.accel.theta_m, 0.0, epsilon = 1e-12);
        let fw = forward_solve(&sys, &TorqueCommand::new(0.0, 0.006)).unwrap();
        assert_relative_eq!(fw.accel.theta_m, 0.006 / p.j_m[(1, 1)], epsilon = 1e-10);
    }

    #[test]
    fn simple_inverse_values() {
        let p = GimbalParams::bench();
        assert_eq!(
            simple_inverse(&p, &JointAccel::default(), SimpleYawInertia::Combined),
            TorqueCommand::ZERO
        );
        let t = simple_inverse(&p, &JointAccel::new(0.0, 1.0), SimpleYawInertia::Combined);
        assert_relative_eq!(t.t_e, 0.003, epsilon = 1e-15);
        let t = simple_inverse(&p, &JointAccel::new(2.0, 0.0), SimpleYawInertia::YawOnly);
        assert_relative_eq!(t.t_a, 0.004, epsilon = 1e-15);

        let ideal = diag_params();
        let sys = assemble(
            &ideal,
            &GimbalState::new(0.4, 0.0, 0.0, 0.0),
            &BaseMotion::without_gravity(),
            &JointFriction::default(),
        );
        let acc = JointAccel::new(3.0, -2.0);
        let full = inverse_solve(&sys, &acc).unwrap().torque;
        let simple = simple_inverse(&ideal, &acc, SimpleYawInertia::Combined);
        assert_relative_eq!(full.t_a, simple.t_a, epsilon = 1e-9);
        assert_relative_eq!(full.t_e, simple.t_e, epsilon = 1e-9);
    }

    #[test]
    fn friction_degeneration() {
        let p = diag_params();
        let fr = JointFriction::new(0.004, 0.0);
        let sys = assemble(
            &p,
            &GimbalState::new(0.0, 0.0, 0.7, 0.0),
            &BaseMotion::without_gravity(),
            &fr,
        );
        let fw = forward_solve(&sys, &TorqueCommand::new(0.01, 0.0)).unwrap();
        let j = p.j_a[(2, 2)] + p.j_m[(2, 2)];
        assert_relative_eq!(j * fw.accel.psi_a, 0.01 - 0.004, epsilon = 1e-14);
    }

    #[test]
    fn inertia_block_transcription() {
        // independent copy of the pitch rotation rows for a random state
        let p = GimbalParams::bench();
        let s = GimbalState::new(0.3, -0.25, 1.1, -0.7);
        let base = BaseMotion::stationary();
        let fr = JointFriction::new(0.0, 0.013);
        let sys = assemble(&p, &s, &base, &fr);
        let kin = AngularKinematics::new(&s, &base);
        let expect = -p.j_m * kin.d2alpha_m
            - kin.omega_m.cross(&(p.j_m * kin.omega_m))
            - crate::kinematics::rot2(-s.theta_m) * Vec3::new(0.0, 0.013, 0.0);
        assert_relative_eq!(
            sys.d.fixed_rows::<3>(9).into_owned(),
            expect,
            epsilon = 1e-15
        );
        let r2 = crate::kinematics::rot2(-s.theta_m);
        let arm = -p.r_gm_m;
        let block: Matrix3<f64> = Matrix3::from_columns(&[
            arm.cross(&(r2 * Vec3::x())),
            arm.cross(&(r2 * Vec3::y())),
            arm.cross(&(r2 * Vec3::z())),
        ]);
        assert_relative_eq!(
            sys.r.fixed_view::<3, 3>(9, 0).into_owned(),
            block,
            epsilon = 1e-15
        );
    }
}
