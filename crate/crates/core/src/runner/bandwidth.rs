//! Closed-loop bandwidth from a chirp response.

use crate::error::{GimbalError, Result};
use crate::plant::SimulationLog;
use crate::runner::metrics::Axis;

/// Envelope ratio that defines the bandwidth.
pub const THRESHOLD: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Per-half-cycle envelope of the response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfCycle {
    pub t_start: f64,
    pub t_end: f64,
    /// `1 / (2·(t_end − t_start))`, Hz.
    pub frequency: f64,
    /// Response peak over reference peak within the half cycle.
    pub ratio: f64,
}

fn crossing(t0: f64, t1: f64, y0: f64, y1: f64) -> f64 {
    t0 + (t1 - t0) * y0 / (y0 - y1)
}

/// Split the response at its zero crossings and compare each half cycle's
/// peak with the reference peak over the same samples.
pub fn half_cycles(t: &[f64], reference: &[f64], response: &[f64]) -> Vec<HalfCycle> {
    let mut zc: Vec<(usize, f64)> = Vec::new();
    for i in 1..response.len() {
        let (a, b) = (response[i - 1], response[i]);
        if (a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0) {
            zc.push((i, crossing(t[i - 1], t[i], a, b)));
        }
    }
    zc.windows(2)
        .filter_map(|w| {
            let ((i0, t0), (i1, t1)) = (w[0], w[1]);
            let peak = |s: &[f64]| s[i0..i1].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let pr = peak(reference);
            (t1 > t0 && pr > 0.0).then(|| HalfCycle {
                t_start: t0,
                t_end: t1,
                frequency: 0.5 / (t1 - t0),
                ratio: peak(response) / pr,
            })
        })
        .collect()
}

/// Frequency at which the half-cycle envelope ratio first drops below
/// [`THRESHOLD`], interpolated linearly between that half cycle and the one
/// before it. The leading half cycle is skipped as transient.
pub fn bandwidth_from_series(t: &[f64], reference: &[f64], response: &[f64]) -> Result<f64> {
    if t.len() != reference.len() || t.len() != response.len() {
        return Err(GimbalError::MismatchedTimeBase(
            "series lengths differ".into(),
        ));
    }
    let hc = half_cycles(t, reference, response);
    let k = (1..hc.len())
        .find(|&k| hc[k].ratio < THRESHOLD)
        .ok_or(GimbalError::NoCrossing)?;
    let h = hc[k];
    if hc[k - 1].ratio < THRESHOLD {
        return Ok(h.frequency);
    }
    let p = hc[k - 1];
    let w = (p.ratio - THRESHOLD) / (p.ratio - h.ratio);
    Ok(p.frequency + w * (h.frequency - p.frequency))
}

/// Bandwidth of one axis of a chirp run.
pub fn bandwidth_from_chirp(log: &SimulationLog, axis: Axis) -> Result<f64> {
    if log.is_empty() {
        return Err(GimbalError::EmptyRun);
    }
    let (r, y) = axis.series(log);
    bandwidth_from_series(&log.times(), &r, &y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::reference::ReferenceSpec;

    fn chirp(fs: f64) -> (Vec<f64>, Vec<f64>) {
        let r = ReferenceSpec::Chirp {
            amplitude_deg: 1.0,
            f0_hz: 0.0,
            f1_hz: 20.0,
            duration_s: 10.0,
        }
        .compile(1.0)
        .unwrap();
        let n = (10.0 * fs) as usize;
        (0..=n)
            .map(|k| k as f64 / fs)
            .map(|t| (t, r.eval(t).pos))
            .unzip()
    }

    #[test]
    fn perfect_tracking_never_crosses() {
        let (t, r) = chirp(1000.0);
        assert!(matches!(
            bandwidth_from_series(&t, &r, &r),
            Err(GimbalError::NoCrossing)
        ));
    }

    #[test]
    fn first_order_loop_cutoff() {
        // y' = ω_c (r − y), integrated exactly for a linearly interpolated input
        let fs = 10_000.0;
        let (t, r) = chirp(fs);
        for fc in [2.0, 3.0, 6.0] {
            let wc = std::f64::consts::TAU * fc;
            let a = (-wc / fs).exp();
            let mut y = vec![0.0; r.len()];
            for k in 1..r.len() {
                let slope = (r[k] - r[k - 1]) * fs;
                y[k] = r[k] - slope / wc + a * (y[k - 1] - r[k - 1] + slope / wc);
            }
            let bw = bandwidth_from_series(&t, &r, &y).unwrap();
            assert!((bw - fc).abs() < 0.1 * fc, "fc {fc}: got {bw}");
        }
    }
}
