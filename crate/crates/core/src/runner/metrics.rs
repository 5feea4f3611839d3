//! Tracking-error metrics and comparisons against a baseline run.

use serde::{Deserialize, Serialize};

use crate::error::{GimbalError, Result};
use crate::plant::SimulationLog;
use crate::runner::scenario::RuntimeStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Yaw,
    Pitch,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::Yaw, Axis::Pitch];

    /// `(reference, true position)` columns of the log.
    pub fn series(self, log: &SimulationLog) -> (Vec<f64>, Vec<f64>) {
        match self {
            Axis::Yaw => (log.column(|r| r.ref_psi), log.column(|r| r.psi_a)),
            Axis::Pitch => (log.column(|r| r.ref_theta), log.column(|r| r.theta_m)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AxisMetrics {
    pub mean_error_deg: f64,
    pub peak_error_deg: f64,
    pub rms_error_deg: f64,
    /// `100·(e_base − e)/e_base` on the mean error; negative when worse.
    pub mean_decrease_pct: Option<f64>,
    pub peak_decrease_pct: Option<f64>,
    pub bandwidth_hz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricsReport {
    pub name: String,
    pub controller: String,
    pub baseline: Option<String>,
    pub samples: usize,
    pub duration_s: f64,
    pub yaw: AxisMetrics,
    pub pitch: AxisMetrics,
    pub runtime: Option<RuntimeStats>,
}

impl MetricsReport {
    pub fn axis(&self, a: Axis) -> &AxisMetrics {
        match a {
            Axis::Yaw => &self.yaw,
            Axis::Pitch => &self.pitch,
        }
    }

    fn axis_mut(&mut self, a: Axis) -> &mut AxisMetrics {
        match a {
            Axis::Yaw => &mut self.yaw,
            Axis::Pitch => &mut self.pitch,
        }
    }
}

/// Percent decrease of `e` relative to `base`. Zero when both vanish,
/// undefined when only the baseline does.
pub fn percent_decrease(base: f64, e: f64) -> Option<f64> {
    if base == 0.0 {
        (e == 0.0).then_some(0.0)
    } else {
        Some(100.0 * (base - e) / base)
    }
}

/// Mean, peak and RMS of `|r_d − r|` in degrees.
pub fn error_stats(reference: &[f64], actual: &[f64]) -> Result<AxisMetrics> {
    if reference.is_empty() {
        return Err(GimbalError::EmptyRun);
    }
    if reference.len() != actual.len() {
        return Err(GimbalError::MismatchedTimeBase(
            "series lengths differ".into(),
        ));
    }
    let n = reference.len() as f64;
    let (mut sum, mut sq, mut peak) = (0.0, 0.0, 0.0f64);
    for (r, y) in reference.iter().zip(actual) {
        let e = (r - y).abs().to_degrees();
        sum += e;
        sq += e * e;
        peak = peak.max(e);
    }
    Ok(AxisMetrics {
        mean_error_deg: sum / n,
        peak_error_deg: peak,
        rms_error_deg: (sq / n).sqrt(),
        ..AxisMetrics::default()
    })
}

pub fn check_time_base(a: &SimulationLog, b: &SimulationLog) -> Result<()> {
    if a.len() != b.len() {
        return Err(GimbalError::MismatchedTimeBase(format!(
            "{} vs {} samples",
            a.len(),
            b.len()
        )));
    }
    for (x, y) in a.rows.iter().zip(&b.rows) {
        if (x.t - y.t).abs() > 1e-9 {
            return Err(GimbalError::MismatchedTimeBase(format!(
                "t = {} vs {}",
                x.t, y.t
            )));
        }
    }
    Ok(())
}

/// Metrics of `log`, with percent decreases when a baseline is given.
pub fn metrics(log: &SimulationLog, baseline: Option<&SimulationLog>) -> Result<MetricsReport> {
    if log.is_empty() {
        return Err(GimbalError::EmptyRun);
    }
    let mut rep = MetricsReport {
        samples: log.len(),
        duration_s: log.rows[log.len() - 1].t - log.rows[0].t,
        ..MetricsReport::default()
    };
    for a in Axis::BOTH {
        let (r, y) = a.series(log);
        *rep.axis_mut(a) = error_stats(&r, &y)?;
    }
    if let Some(b) = baseline {
        check_time_base(log, b)?;
        for a in Axis::BOTH {
            let (r, y) = a.series(b);
            let base = error_stats(&r, &y)?;
            let m = rep.axis_mut(a);
            m.mean_decrease_pct = percent_decrease(base.mean_error_deg, m.mean_error_deg);
            m.peak_decrease_pct = percent_decrease(base.peak_error_deg, m.peak_error_deg);
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::LogRow;
    use approx::assert_relative_eq;

    fn log_with_error(err_deg: f64, n: usize) -> SimulationLog {
        SimulationLog {
            rows: (0..n)
                .map(|k| LogRow {
                    t: k as f64 * 1e-3,
                    ref_psi: 0.1,
                    psi_a: 0.1 - err_deg.to_radians(),
                    ..LogRow::default()
                })
                .collect(),
        }
    }

    #[test]
    fn constant_error() {
        let m = metrics(&log_with_error(1.0, 10_001), None).unwrap();
        assert_relative_eq!(m.yaw.mean_error_deg, 1.0, epsilon = 1e-12);
        assert_relative_eq!(m.yaw.peak_error_deg, 1.0, epsilon = 1e-12);
        assert_relative_eq!(m.duration_s, 10.0, epsilon = 1e-9);
    }

    #[test]
    fn self_baseline_is_zero() {
        let l = log_with_error(0.3, 100);
        let m = metrics(&l, Some(&l)).unwrap();
        assert_eq!(m.yaw.mean_decrease_pct, Some(0.0));
        assert_eq!(m.pitch.peak_decrease_pct, Some(0.0));
    }

    #[test]
    fn mismatched_lengths() {
        let r = metrics(&log_with_error(1.0, 10), Some(&log_with_error(1.0, 11)));
        assert!(matches!(r, Err(GimbalError::MismatchedTimeBase(_))));
    }

    #[test]
    fn can_be_negative() {
        assert_eq!(percent_decrease(1.0, 1.5), Some(-50.0));
    }
}
