//! Identify the joint disturbance from a noiseless sweep run and recover the
//! polynomial coefficients by least squares.

use std::path::Path;

use gimbal::ident::fit;
use gimbal::plant::DisturbanceCoefficients;
use gimbal::runner::{identify, load_identify};

fn main() -> gimbal::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/identify_sweep.json");
    let (cfg, dir) = load_identify(&path)?;
    let ds = identify(&cfg, &dir)?;
    let res = fit(&ds, 0.0)?;
    let d = &res.diagnostics;
    println!(
        "{} samples, {}x{} regressor, rank {}, residual rms {:.2e}",
        ds.len(),
        d.rows,
        d.cols,
        d.rank,
        d.residual_rms
    );

    let truth = DisturbanceCoefficients::builtin();
    let names = gimbal::ident::regressor::term_names();
    for (i, name) in names.iter().enumerate() {
        if truth.k_a[i] != 0.0 || truth.k_m[i] != 0.0 {
            println!(
                "{name:>24}: k_a {:+.9} (true {:+.5})  k_m {:+.9} (true {:+.5})",
                res.coefficients.k_a[i], truth.k_a[i], res.coefficients.k_m[i], truth.k_m[i]
            );
        }
    }
    let worst = res
        .coefficients
        .k_a
        .iter()
        .chain(&res.coefficients.k_m)
        .zip(truth.k_a.iter().chain(&truth.k_m))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("largest absolute coefficient error: {worst:.2e}");
    Ok(())
}
