//! Scenario files: versioned JSON, angles in degrees.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::control::{AdrcParams, InverseModelKind, PidGains};
use crate::error::{GimbalError, Result};
use crate::kinematics::{BaseMotion, GimbalState};
use crate::params::GimbalParams;
use crate::plant::{DisturbanceModel, SensorConfig};
use crate::runner::reference::{Reference, ReferenceSpec};

pub const CONFIG_VERSION: u32 = 1;

fn default_control_hz() -> f64 {
    1000.0
}
fn default_substeps() -> usize {
    10
}
fn yes() -> bool {
    true
}

/// Gimbal parameters: the bench set, a JSON file, or inline values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(untagged)]
pub enum ParamsSource {
    #[default]
    #[serde(skip)]
    Bench,
    File(PathBuf),
    Inline(Box<GimbalParams>),
}

impl ParamsSource {
    pub fn resolve(&self, base_dir: &Path) -> Result<GimbalParams> {
        let p = match self {
            ParamsSource::Bench => GimbalParams::bench(),
            ParamsSource::File(f) => crate::io::read_json(&base_dir.join(f))?,
            ParamsSource::Inline(p) => (**p).clone(),
        };
        p.validate()?;
        Ok(p)
    }

    fn is_default(&self) -> bool {
        matches!(self, ParamsSource::Bench)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ControllerConfig {
    /// Cascaded PID alone.
    Pid {
        gains: PidGains,
    },
    /// PID plus the learned disturbance compensator; `model` is a model JSON
    /// path relative to the scenario file.
    PidNn {
        gains: PidGains,
        model: PathBuf,
    },
    Adrc {
        params: AdrcParams,
    },
    /// PID with the inverse-model disturbance estimate subtracted.
    PidInvff {
        gains: PidGains,
    },
}

impl ControllerConfig {
    pub fn label(&self) -> &'static str {
        match self {
            ControllerConfig::Pid { .. } => "pid",
            ControllerConfig::PidNn { .. } => "pid_nn",
            ControllerConfig::Adrc { .. } => "adrc",
            ControllerConfig::PidInvff { .. } => "pid_invff",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    /// Start on the reference position and rate.
    #[default]
    MatchReference,
    Rest,
    Explicit {
        psi_deg: f64,
        theta_deg: f64,
        #[serde(default)]
        psi_rate_dps: f64,
        #[serde(default)]
        theta_rate_dps: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisReferences {
    pub yaw: ReferenceSpec,
    pub pitch: ReferenceSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    #[serde(default)]
    pub name: String,
    /// Groups scenarios that share a reference in comparison tables.
    #[serde(default)]
    pub reference_name: String,
    pub duration_s: f64,
    #[serde(default = "default_control_hz")]
    pub control_hz: f64,
    /// Physics steps per control tick.
    #[serde(default = "default_substeps")]
    pub substeps: usize,
    /// Recorded in artifacts and used by stochastic stages (training).
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "ParamsSource::is_default")]
    pub params: ParamsSource,
    #[serde(default)]
    pub base: BaseMotion,
    #[serde(default)]
    pub disturbance: DisturbanceModel,
    #[serde(default)]
    pub sensors: SensorConfig,
    pub controller: ControllerConfig,
    pub reference: AxisReferences,
    #[serde(default)]
    pub initial: InitialCondition,
    /// Inverse model behind the logged and compensated `Δu`.
    #[serde(default)]
    pub estimator: InverseModelKind,
    /// Per-axis torque limits, N·m; zero or negative disables.
    #[serde(default)]
    pub torque_limit: [f64; 2],
    /// Model the motor winding lag between commanded voltage and torque.
    #[serde(default)]
    pub motor_lag: bool,
    #[serde(default = "yes")]
    pub enforce_for: bool,
    #[serde(default)]
    pub output: OutputPaths,
}

impl ScenarioConfig {
    /// A scenario with every optional field at its default.
    pub fn new(
        controller: ControllerConfig,
        yaw: ReferenceSpec,
        pitch: ReferenceSpec,
        duration_s: f64,
    ) -> Self {
        Self {
            version: CONFIG_VERSION,
            name: String::new(),
            reference_name: String::new(),
            duration_s,
            control_hz: default_control_hz(),
            substeps: default_substeps(),
            seed: 0,
            params: ParamsSource::Bench,
            base: BaseMotion::default(),
            disturbance: DisturbanceModel::None,
            sensors: SensorConfig::default(),
            controller,
            reference: AxisReferences { yaw, pitch },
            initial: InitialCondition::MatchReference,
            estimator: InverseModelKind::Plant,
            torque_limit: [0.0; 2],
            motor_lag: false,
            enforce_for: true,
            output: OutputPaths::default(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.check_version()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| GimbalError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&s).map_err(|e| match e {
            GimbalError::Json(j) => GimbalError::Config(format!("{}: {j}", path.display())),
            e => e,
        })
    }

    fn check_version(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(GimbalError::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        Ok(())
    }

    pub fn physics_dt(&self) -> f64 {
        1.0 / (self.control_hz * self.substeps as f64)
    }

    pub fn n_ticks(&self) -> usize {
        (self.duration_s * self.control_hz).round() as usize
    }

    /// Checks that do not touch the filesystem.
    pub fn validate(&self) -> Result<()> {
        self.check_version()?;
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return Err(GimbalError::Config("duration_s must be positive".into()));
        }
        if !(self.control_hz > 0.0 && self.control_hz.is_finite()) || self.substeps == 0 {
            return Err(GimbalError::Config(
                "control_hz and substeps must be positive".into(),
            ));
        }
        if self.physics_dt() > crate::plant::MAX_DT {
            return Err(GimbalError::Config("physics step too large".into()));
        }
        if self.torque_limit.iter().any(|v| !v.is_finite()) {
            return Err(GimbalError::Config("torque limits must be finite".into()));
        }
        self.sensors.validate(self.control_hz)?;
        self.disturbance.validate()?;
        Ok(())
    }

    pub fn compile_references(&self, p: &GimbalParams) -> Result<[Reference; 2]> {
        Ok([
            self.reference.yaw.compile(p.for_yaw)?,
            self.reference.pitch.compile(p.for_pitch)?,
        ])
    }

    pub fn initial_state(&self, refs: &[Reference; 2]) -> GimbalState {
        match self.initial {
            InitialCondition::MatchReference => {
                let (a, e) = (refs[0].eval(0.0), refs[1].eval(0.0));
                GimbalState::new(a.pos, e.pos, a.rate, e.rate)
            }
            InitialCondition::Rest => GimbalState::default(),
            InitialCondition::Explicit {
                psi_deg,
                theta_deg,
                psi_rate_dps,
                theta_rate_dps,
            } => GimbalState::new(
                psi_deg.to_radians(),
                theta_deg.to_radians(),
                psi_rate_dps.to_radians(),
                theta_rate_dps.to_radians(),
            ),
        }
    }

    /// Label for comparison tables.
    pub fn reference_label(&self) -> String {
        if !self.reference_name.is_empty() {
            return self.reference_name.clone();
        }
        let one = |r: &ReferenceSpec| match *r {
            ReferenceSpec::Sine {
                amplitude_deg,
                frequency_hz,
                ..
            }
            | ReferenceSpec::Cosine {
                amplitude_deg,
                frequency_hz,
                ..
            } => format!("{amplitude_deg}deg@{frequency_hz}Hz"),
            ReferenceSpec::Pulse {
                amplitude_deg,
                period_s,
                ..
            } => format!("pulse {amplitude_deg}deg/{period_s}s"),
            ReferenceSpec::Chirp {
                amplitude_deg,
                f1_hz,
                ..
            } => format!("chirp {amplitude_deg}deg to {f1_hz}Hz"),
            ReferenceSpec::Sweep { .. } => "sweep".to_string(),
            ReferenceSpec::Hold { value_deg } => format!("hold {value_deg}deg"),
        };
        let (a, e) = (one(&self.reference.yaw), one(&self.reference.pitch));
        if a == e {
            a
        } else {
            format!("{a} / {e}")
        }
    }
}
