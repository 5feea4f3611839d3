//! Forward and inverse dynamics at one state: the inverse torques for the
//! forward accelerations reproduce the drive, and both paths yield the same
//! joint reactions.

use gimbal::dynamics::{
    assemble, forward_solve, inverse_solve, JointFriction, TorqueCommand, SLOT_NAMES,
};
use gimbal::kinematics::{BaseMotion, GimbalState, Vec3};
use gimbal::params::GimbalParams;

fn main() -> gimbal::Result<()> {
    let mut p = GimbalParams::bench();
    p.r_gm_m = Vec3::new(0.01, -0.02, 0.005);
    let base = BaseMotion {
        omega_b: Vec3::new(0.1, -0.2, 0.3),
        ..BaseMotion::stationary()
    };
    let state = GimbalState::new(0.2, -0.1, 1.0, -0.5);
    let sys = assemble(&p, &state, &base, &JointFriction::default());

    let u = TorqueCommand::new(0.05, -0.02);
    let fw = forward_solve(&sys, &u)?;
    let inv = inverse_solve(&sys, &fw.accel)?;

    println!(
        "accelerations: psi {:+.6} theta {:+.6} rad/s^2",
        fw.accel.psi_a, fw.accel.theta_m
    );
    println!(
        "torque in {:+.6} {:+.6}, recovered {:+.6} {:+.6} N·m",
        u.t_a, u.t_e, inv.torque.t_a, inv.torque.t_e
    );
    println!("{:>6} {:>14} {:>14}", "slot", "forward", "inverse");
    for (i, (a, b)) in fw
        .reactions
        .to_array()
        .iter()
        .zip(inv.reactions.to_array())
        .enumerate()
    {
        println!("{:>6} {a:>14.6e} {b:>14.6e}", SLOT_NAMES[i + 2]);
    }
    Ok(())
}
