//! A Coulomb term outside the regressor span makes the fitted coefficients
//! depend on the excitation: fits on two runs disagree and transfer poorly.

use std::path::Path;

use gimbal::ident::{cross_validate, fit, max_relative_disagreement};
use gimbal::runner::{identify, load_identify};

fn main() -> gimbal::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let load = |name: &str| -> gimbal::Result<_> {
        let (cfg, d) = load_identify(&dir.join(name))?;
        identify(&cfg, &d)
    };
    let (a, b) = (load("identify_a.json")?, load("identify_b.json")?);
    let (fa, fb) = (fit(&a, 0.0)?, fit(&b, 0.0)?);
    let (idx, rel) = max_relative_disagreement(&fa.coefficients, &fb.coefficients);
    println!(
        "largest disagreement: coefficient {idx}, {:.0}%",
        rel * 100.0
    );
    for (label, k, on, other) in [("10°@2 Hz", &fa, &a, &b), ("3°@5 Hz", &fb, &b, &a)] {
        let r = cross_validate(&k.coefficients, on, other)?;
        println!(
            "fit on {label:>8}: self rms {:.2e}, cross rms {:.2e} N·m (x{:.0})",
            r.self_rms_total,
            r.cross_rms_total,
            r.ratio()
        );
    }
    Ok(())
}
