//! PID, PID with network compensation, PID with the inverse-model estimate
//! and ADRC on the five sine reference sets.

use std::path::Path;

use gimbal::runner::{compare, Job};

fn main() -> gimbal::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut jobs = Vec::new();
    for n in 1..=5 {
        for c in ["pid", "pid_nn", "pid_invff", "adrc"] {
            jobs.push(Job::load(&dir.join(format!("ref{n}_{c}.json")))?);
        }
    }
    let res = compare(jobs, "pid", 0)?;
    println!(
        "{:<16} {:<10} {:>9} {:>9} {:>8}",
        "reference", "controller", "yaw °", "pitch °", "yaw Δ%"
    );
    for r in &res.table.rows {
        let f = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3}"));
        println!(
            "{:<16} {:<10} {:>9} {:>9} {:>8}",
            r.reference,
            r.controller,
            f(r.yaw_mean_deg),
            f(r.pitch_mean_deg),
            r.yaw_mean_decrease_pct
                .map_or("-".into(), |x| format!("{x:.1}"))
        );
    }
    Ok(())
}
