//! Run a shipped scenario and print its tracking metrics.
//!
//! `cargo run --example simulate_scenario -- configs/ref3_pid.json`

use std::path::PathBuf;

use gimbal::runner::{evaluate_job, Job};

fn main() -> gimbal::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/ref1_pid.json"));
    let job = Job::load(&path)?;
    let (out, rep) = evaluate_job(&job)?;
    println!(
        "{}: {} ticks, {} physics steps",
        rep.name, out.stats.control_ticks, out.stats.physics_steps
    );
    for (axis, m) in [("yaw", &rep.yaw), ("pitch", &rep.pitch)] {
        println!(
            "{axis:>5}: mean {:.4}°  peak {:.4}°  rms {:.4}°",
            m.mean_error_deg, m.peak_error_deg, m.rms_error_deg
        );
    }
    Ok(())
}
