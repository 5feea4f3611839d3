//! Grid of amplitudes and frequencies around one scenario pair, run in
//! parallel and written as CSV to stdout.

use std::path::Path;

use gimbal::runner::{sweep, SweepSpec};

fn main() -> gimbal::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut spec = SweepSpec::load(&dir.join("grid.json"))?;
    spec.amplitudes_deg = vec![2.0, 5.0];
    spec.frequencies_hz = vec![1.0, 3.0];
    let res = sweep(&spec, &dir, 0)?;
    print!("{}", res.table.to_csv_string()?);
    Ok(())
}
