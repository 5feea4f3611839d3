//! Disturbance-torque datasets extracted from simulation logs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GimbalError, Result};
use crate::kinematics::GimbalState;
use crate::plant::SimulationLog;

/// One sample: measured joint state and the inverse-model torque difference.
/// Column names match the simulation log so a log CSV can be read directly.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DisturbanceSample {
    pub t: f64,
    pub psi_a: f64,
    pub theta_m: f64,
    pub psi_a_dot: f64,
    pub theta_m_dot: f64,
    pub du_a: f64,
    pub du_e: f64,
}

impl DisturbanceSample {
    pub fn state(&self) -> GimbalState {
        GimbalState::new(self.psi_a, self.theta_m, self.psi_a_dot, self.theta_m_dot)
    }

    fn is_finite(&self) -> bool {
        [
            self.t,
            self.psi_a,
            self.theta_m,
            self.psi_a_dot,
            self.theta_m_dot,
            self.du_a,
            self.du_e,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub description: String,
    pub control_hz: f64,
    pub seed: u64,
    #[serde(default)]
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DisturbanceDataset {
    pub samples: Vec<DisturbanceSample>,
    pub meta: DatasetMeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetOptions {
    /// Drop samples before this time (sensor warm-up), s.
    pub skip_s: f64,
    /// Keep every `stride`-th tick.
    pub stride: usize,
    /// Pair `Δu[n]` with the measured state `lag` ticks earlier.
    pub lag: usize,
    /// Use the measured (sensor) state instead of the true state.
    pub measured_state: bool,
}

impl Default for DatasetOptions {
    fn default() -> Self {
        Self {
            skip_s: 0.0,
            stride: 1,
            lag: 0,
            measured_state: true,
        }
    }
}

/// Build a dataset from the `Δu` channel of a run.
pub fn collect_dataset(
    log: &SimulationLog,
    opts: &DatasetOptions,
    meta: DatasetMeta,
) -> Result<DisturbanceDataset> {
    let stride = opts.stride.max(1);
    let mut samples = Vec::new();
    for n in (opts.lag..log.rows.len()).step_by(stride) {
        let r = &log.rows[n];
        if r.t < opts.skip_s {
            continue;
        }
        let s = &log.rows[n - opts.lag];
        let (psi, th, psid, thd) = if opts.measured_state {
            (s.enc_psi, s.enc_theta, s.meas_psi_dot, s.meas_theta_dot)
        } else {
            (s.psi_a, s.theta_m, s.psi_a_dot, s.theta_m_dot)
        };
        let sample = DisturbanceSample {
            t: r.t,
            psi_a: psi,
            theta_m: th,
            psi_a_dot: psid,
            theta_m_dot: thd,
            du_a: r.du_a,
            du_e: r.du_e,
        };
        if !sample.is_finite() {
            return Err(GimbalError::NonFinite { t: r.t });
        }
        samples.push(sample);
    }
    if samples.is_empty() {
        return Err(GimbalError::EmptyRun);
    }
    Ok(DisturbanceDataset { samples, meta })
}

impl DisturbanceDataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut wr = csv::Writer::from_writer(Vec::new());
        for s in &self.samples {
            wr.serialize(s)?;
        }
        let bytes = wr
            .into_inner()
            .map_err(|e| GimbalError::Io(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| GimbalError::Config(e.to_string()))
    }

    /// Writes `path` and the `<path>.meta.json` sidecar.
    pub fn save(&self, path: &Path) -> Result<()> {
        crate::io::write_atomic(path, self.to_csv_string()?.as_bytes())?;
        crate::io::write_json(&meta_path(path), &self.meta)
    }

    /// Reads a dataset CSV or a full simulation log CSV. The sidecar is
    /// optional.
    pub fn load(path: &Path) -> Result<Self> {
        let mut rd = csv::Reader::from_path(path)?;
        let samples = rd
            .deserialize()
            .collect::<std::result::Result<Vec<DisturbanceSample>, _>>()?;
        let mp = meta_path(path);
        let meta = if mp.exists() {
            crate::io::read_json(&mp)?
        } else {
            DatasetMeta {
                source: path.display().to_string(),
                ..DatasetMeta::default()
            }
        };
        Ok(Self { samples, meta })
    }
}

pub fn meta_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    s.into()
}
