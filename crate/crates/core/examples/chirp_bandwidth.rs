//! Closed-loop bandwidth from the 1° chirp with and without compensation.

use std::path::Path;

use gimbal::runner::{bandwidth_from_chirp, evaluate_job, Axis, Job};

fn main() -> gimbal::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for name in ["chirp_pid.json", "chirp_pid_nn.json"] {
        let (out, _) = evaluate_job(&Job::load(&dir.join(name))?)?;
        let yaw = bandwidth_from_chirp(&out.log, Axis::Yaw)?;
        let pitch = bandwidth_from_chirp(&out.log, Axis::Pitch)?;
        println!("{name:<18} yaw {yaw:6.2} Hz  pitch {pitch:6.2} Hz");
    }
    Ok(())
}
