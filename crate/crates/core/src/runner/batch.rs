//! Parallel batches of scenarios: controller comparison tables and
//! amplitude/frequency sweeps.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GimbalError, Result};
use crate::runner::bandwidth::bandwidth_from_chirp;
use crate::runner::config::ScenarioConfig;
use crate::runner::metrics::{metrics, percent_decrease, Axis, MetricsReport};
use crate::runner::reference::ReferenceSpec;
use crate::runner::scenario::{run_scenario, RunOutput};

/// A scenario and the directory its relative paths resolve against.
#[derive(Debug, Clone)]
pub struct Job {
    pub config: ScenarioConfig,
    pub base_dir: PathBuf,
}

impl Job {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(Self {
            config: ScenarioConfig::load(path)?,
            base_dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        })
    }

    pub fn name(&self) -> String {
        if self.config.name.is_empty() {
            format!(
                "{}_{}",
                self.config.reference_label(),
                self.config.controller.label()
            )
        } else {
            self.config.name.clone()
        }
    }
}

/// Run one scenario and compute its standalone metrics, including chirp
/// bandwidth on any chirp-driven axis.
pub fn evaluate_job(job: &Job) -> Result<(RunOutput, MetricsReport)> {
    let out = run_scenario(&job.config, &job.base_dir)?;
    let mut rep = metrics(&out.log, None)?;
    rep.name = job.name();
    rep.controller = job.config.controller.label().to_string();
    rep.runtime = Some(out.stats);
    let specs = [job.config.reference.yaw, job.config.reference.pitch];
    for (a, spec) in Axis::BOTH.into_iter().zip(specs) {
        if spec.is_chirp() {
            let bw = bandwidth_from_chirp(&out.log, a).ok();
            match a {
                Axis::Yaw => rep.yaw.bandwidth_hz = bw,
                Axis::Pitch => rep.pitch.bandwidth_hz = bw,
            }
        }
    }
    Ok((out, rep))
}

/// One (reference, controller) cell of a comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub reference: String,
    pub controller: String,
    pub name: String,
    pub status: String,
    pub error: Option<String>,
    pub yaw_mean_deg: Option<f64>,
    pub yaw_peak_deg: Option<f64>,
    pub pitch_mean_deg: Option<f64>,
    pub pitch_peak_deg: Option<f64>,
    pub yaw_mean_decrease_pct: Option<f64>,
    pub yaw_peak_decrease_pct: Option<f64>,
    pub pitch_mean_decrease_pct: Option<f64>,
    pub pitch_peak_decrease_pct: Option<f64>,
    pub yaw_bandwidth_hz: Option<f64>,
    pub pitch_bandwidth_hz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareTable {
    pub baseline: String,
    pub rows: Vec<CompareRow>,
}

impl CompareTable {
    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| GimbalError::Io(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| GimbalError::Config(e.to_string()))
    }

    pub fn get(&self, reference: &str, controller: &str) -> Option<&CompareRow> {
        self.rows
            .iter()
            .find(|r| r.reference == reference && r.controller == controller)
    }
}

/// Everything a batch produced, in input order.
pub struct BatchResult {
    pub table: CompareTable,
    pub outputs: Vec<Result<(RunOutput, MetricsReport)>>,
    pub jobs: Vec<Job>,
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| GimbalError::Config(format!("thread pool: {e}")))
}

/// Run every job (at most `jobs` at a time; 0 picks the core count) and
/// tabulate each against the `baseline` controller on the same reference.
pub fn compare(jobs_in: Vec<Job>, baseline: &str, jobs: usize) -> Result<BatchResult> {
    let outputs: Vec<_> = pool(jobs)?.install(|| jobs_in.par_iter().map(evaluate_job).collect());
    let mut rows = Vec::with_capacity(jobs_in.len());
    for (job, out) in jobs_in.iter().zip(&outputs) {
        let reference = job.config.reference_label();
        let controller = job.config.controller.label().to_string();
        let mut row = CompareRow {
            reference: reference.clone(),
            controller,
            name: job.name(),
            status: "ok".into(),
            error: None,
            yaw_mean_deg: None,
            yaw_peak_deg: None,
            pitch_mean_deg: None,
            pitch_peak_deg: None,
            yaw_mean_decrease_pct: None,
            yaw_peak_decrease_pct: None,
            pitch_mean_decrease_pct: None,
            pitch_peak_decrease_pct: None,
            yaw_bandwidth_hz: None,
            pitch_bandwidth_hz: None,
        };
        match out {
            Err(e) => {
                row.status = "error".into();
                row.error = Some(format!("{}: {e}", e.kind()));
            }
            Ok((_, m)) => {
                row.yaw_mean_deg = Some(m.yaw.mean_error_deg);
                row.yaw_peak_deg = Some(m.yaw.peak_error_deg);
                row.pitch_mean_deg = Some(m.pitch.mean_error_deg);
                row.pitch_peak_deg = Some(m.pitch.peak_error_deg);
                row.yaw_bandwidth_hz = m.yaw.bandwidth_hz;
                row.pitch_bandwidth_hz = m.pitch.bandwidth_hz;
                let base = jobs_in.iter().zip(&outputs).find_map(|(j, o)| match o {
                    Ok((_, bm))
                        if j.config.controller.label() == baseline
                            && j.config.reference_label() == reference =>
                    {
                        Some(bm)
                    }
                    _ => None,
                });
                if let Some(b) = base {
                    row.yaw_mean_decrease_pct =
                        percent_decrease(b.yaw.mean_error_deg, m.yaw.mean_error_deg);
                    row.yaw_peak_decrease_pct =
                        percent_decrease(b.yaw.peak_error_deg, m.yaw.peak_error_deg);
                    row.pitch_mean_decrease_pct =
                        percent_decrease(b.pitch.mean_error_deg, m.pitch.mean_error_deg);
                    row.pitch_peak_decrease_pct =
                        percent_decrease(b.pitch.peak_error_deg, m.pitch.peak_error_deg);
                }
            }
        }
        rows.push(row);
    }
    Ok(BatchResult {
        table: CompareTable {
            baseline: baseline.to_string(),
            rows,
        },
        outputs,
        jobs: jobs_in,
    })
}

/// A grid of sine references applied to one or more base scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub version: u32,
    /// Scenario files, relative to the sweep file.
    pub scenarios: Vec<PathBuf>,
    pub amplitudes_deg: Vec<f64>,
    pub frequencies_hz: Vec<f64>,
    /// Pitch amplitude as a fraction of the yaw amplitude.
    #[serde(default = "one")]
    pub pitch_ratio: f64,
    #[serde(default = "pid")]
    pub baseline: String,
}

fn one() -> f64 {
    1.0
}
fn pid() -> String {
    "pid".into()
}

impl SweepSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let s: Self = crate::io::read_json(path)?;
        if s.version != crate::runner::config::CONFIG_VERSION {
            return Err(GimbalError::Config(format!(
                "unsupported sweep version {}",
                s.version
            )));
        }
        Ok(s)
    }

    /// Expand into jobs, one per (scenario, amplitude, frequency).
    pub fn jobs(&self, base_dir: &Path) -> Result<Vec<Job>> {
        let mut out = Vec::new();
        for path in &self.scenarios {
            let base = Job::load(&base_dir.join(path))?;
            for &a in &self.amplitudes_deg {
                for &f in &self.frequencies_hz {
                    let mut job = base.clone();
                    let sine = |amp: f64| ReferenceSpec::Sine {
                        amplitude_deg: amp,
                        frequency_hz: f,
                        phase_deg: 0.0,
                        offset_deg: 0.0,
                    };
                    job.config.reference.yaw = sine(a);
                    job.config.reference.pitch = sine(a * self.pitch_ratio);
                    job.config.reference_name = format!("{a}deg@{f}Hz");
                    job.config.name = format!("{}_{a}deg_{f}hz", job.config.controller.label());
                    out.push(job);
                }
            }
        }
        Ok(out)
    }
}

pub fn sweep(spec: &SweepSpec, base_dir: &Path, jobs: usize) -> Result<BatchResult> {
    compare(spec.jobs(base_dir)?, &spec.baseline, jobs)
}
