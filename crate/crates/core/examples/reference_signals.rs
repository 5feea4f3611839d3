//! Sample the reference generators: sine, pulse, chirp and the training sweep.

use gimbal::runner::{gen_reference, generate_training_sweep, ReferenceSpec, SweepConfig};

fn main() -> gimbal::Result<()> {
    let limit = 45f64.to_radians();
    let specs = [
        ReferenceSpec::Sine {
            amplitude_deg: 5.0,
            frequency_hz: 2.0,
            phase_deg: 0.0,
            offset_deg: 0.0,
        },
        ReferenceSpec::Pulse {
            amplitude_deg: 3.0,
            period_s: 2.0,
            width: 0.5,
            edge_s: 0.02,
            polarity: 1.0,
        },
        ReferenceSpec::Chirp {
            amplitude_deg: 1.0,
            f0_hz: 0.0,
            f1_hz: 40.0,
            duration_s: 20.0,
        },
    ];
    for (name, spec) in ["sine", "pulse", "chirp"].iter().zip(&specs) {
        let samples = gen_reference(spec, limit, 2.0, 10.0)?;
        let line: Vec<String> = samples
            .iter()
            .step_by(4)
            .map(|(_, r)| format!("{:+.2}", r.pos.to_degrees()))
            .collect();
        println!("{name:<6} {}", line.join(" "));
    }

    let sweep = SweepConfig::default();
    let samples = generate_training_sweep(&sweep, [limit, 20f64.to_radians()], 1000.0)?;
    let peak = |i: usize| {
        samples
            .iter()
            .map(|(_, r)| r[i].pos.abs())
            .fold(0.0, f64::max)
            .to_degrees()
    };
    println!(
        "sweep: {} samples, peaks {:.1}° / {:.1}°",
        samples.len(),
        peak(0),
        peak(1)
    );
    Ok(())
}
