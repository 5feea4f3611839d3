//! End-to-end pipelines: disturbance identification and compensator training.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{GimbalError, Result};
use crate::ident::{collect_dataset, DatasetMeta, DatasetOptions, DisturbanceDataset};
use crate::mlp::{
    build_training_set, train_lm, FeatureOptions, HistoryEntry, MlpModel, TrainOptions, TrainingSet,
};
use crate::plant::SimulationLog;
use crate::runner::config::{ScenarioConfig, CONFIG_VERSION};
use crate::runner::reference::SweepConfig;
use crate::runner::scenario::run_scenario;

/// A scenario given inline or as a path relative to the referring file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScenarioSource {
    File(PathBuf),
    Inline(Box<ScenarioConfig>),
}

impl ScenarioSource {
    /// The scenario and the directory its own relative paths resolve against.
    pub fn resolve(&self, base_dir: &Path) -> Result<(ScenarioConfig, PathBuf)> {
        match self {
            ScenarioSource::File(p) => {
                let path = base_dir.join(p);
                let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
                Ok((ScenarioConfig::load(&path)?, dir))
            }
            ScenarioSource::Inline(c) => Ok(((**c).clone(), base_dir.to_path_buf())),
        }
    }
}

/// Apply a training sweep to a scenario: both references and the duration.
pub fn with_sweep(mut cfg: ScenarioConfig, sweep: &SweepConfig) -> ScenarioConfig {
    let [a, e] = sweep.references();
    cfg.reference.yaw = a;
    cfg.reference.pitch = e;
    cfg.duration_s = sweep.duration_s;
    cfg
}

fn default_fraction() -> f64 {
    0.8
}
fn default_hidden() -> Vec<usize> {
    vec![20, 20]
}

/// Everything needed to train a compensator from scratch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub version: u32,
    /// Closed-loop run that records `Δu` (typically PID on the disturbed plant).
    pub scenario: ScenarioSource,
    /// Excitation sweeps, each run separately with the scenario's controller;
    /// their samples are pooled. Empty runs the scenario as written.
    #[serde(default)]
    pub sweeps: Vec<SweepConfig>,
    #[serde(default)]
    pub features: FeatureOptions,
    #[serde(default)]
    pub train: TrainOptions,
    #[serde(default = "default_fraction")]
    pub train_fraction: f64,
    #[serde(default = "default_hidden")]
    pub hidden: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl TrainConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let c: Self = crate::io::read_json(path)?;
        if c.version != CONFIG_VERSION {
            return Err(GimbalError::Config(format!(
                "unsupported training config version {}",
                c.version
            )));
        }
        Ok(c)
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![self.features.n_in()];
        s.extend(&self.hidden);
        s.push(2);
        s
    }
}

pub struct TrainOutput {
    pub model: MlpModel,
    pub history: Vec<HistoryEntry>,
    /// One log per excitation run.
    pub logs: Vec<SimulationLog>,
    /// Validation RMS error over validation target RMS.
    pub val_relative_rms: Option<f64>,
}

/// Run the excitation scenarios and pool their samples.
pub fn collect_training_data(
    cfg: &TrainConfig,
    base_dir: &Path,
) -> Result<(TrainingSet, Vec<SimulationLog>)> {
    let (scen, dir) = cfg.scenario.resolve(base_dir)?;
    let runs: Vec<ScenarioConfig> = if cfg.sweeps.is_empty() {
        vec![scen]
    } else {
        cfg.sweeps
            .iter()
            .map(|s| with_sweep(scen.clone(), s))
            .collect()
    };
    let mut logs = Vec::with_capacity(runs.len());
    let mut set = TrainingSet::default();
    for run in &runs {
        let log = run_scenario(run, &dir)?.log;
        let part = build_training_set(&log, &cfg.features)?;
        set.inputs.extend(part.inputs);
        set.targets.extend(part.targets);
        set.feature_names = part.feature_names;
        logs.push(log);
    }
    Ok((set, logs))
}

/// Run the excitation scenarios, build the training set, split, train.
pub fn train_compensator(cfg: &TrainConfig, base_dir: &Path) -> Result<TrainOutput> {
    if !(cfg.train_fraction > 0.0 && cfg.train_fraction <= 1.0) {
        return Err(GimbalError::Config(
            "train_fraction must be in (0, 1]".into(),
        ));
    }
    let (set, logs) = collect_training_data(cfg, base_dir)?;
    let (train, val) = set.split(cfg.train_fraction, cfg.seed);
    if train.len() < 100 {
        return Err(GimbalError::Config(format!(
            "only {} training samples (need 100)",
            train.len()
        )));
    }
    let model = MlpModel::new(&cfg.sizes(), cfg.seed);
    let val_ref = (!val.is_empty()).then_some(&val);
    let (model, history) = train_lm(model, &train, val_ref, &cfg.train)?;
    let val_relative_rms = model
        .meta
        .final_val_loss
        .map(|l| l.sqrt() / val.target_rms());
    Ok(TrainOutput {
        model,
        history,
        logs,
        val_relative_rms,
    })
}

/// Loss history as CSV: `epoch,loss,val_loss,lambda`.
pub fn history_csv(history: &[HistoryEntry]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for h in history {
        w.serialize(h)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| GimbalError::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| GimbalError::Config(e.to_string()))
}

/// Identification run: a scenario plus the dataset extraction options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentifyConfig {
    pub version: u32,
    pub scenario: ScenarioSource,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub dataset: DatasetOptions,
    #[serde(default)]
    pub description: String,
}

/// Accepts either an identification config or a bare scenario.
pub fn load_identify(path: &Path) -> Result<(IdentifyConfig, PathBuf)> {
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let text = std::fs::read_to_string(path)
        .map_err(|e| GimbalError::Config(format!("cannot read {}: {e}", path.display())))?;
    let v: serde_json::Value = serde_json::from_str(&text)?;
    let cfg = if v.get("scenario").is_some() {
        serde_json::from_value(v)?
    } else {
        IdentifyConfig {
            version: CONFIG_VERSION,
            scenario: ScenarioSource::Inline(Box::new(ScenarioConfig::from_json(&text)?)),
            sweep: None,
            dataset: DatasetOptions::default(),
            description: String::new(),
        }
    };
    Ok((cfg, dir))
}

pub fn identify(cfg: &IdentifyConfig, base_dir: &Path) -> Result<DisturbanceDataset> {
    let (mut scen, dir) = cfg.scenario.resolve(base_dir)?;
    if let Some(s) = &cfg.sweep {
        scen = with_sweep(scen, s);
    }
    let log = run_scenario(&scen, &dir)?.log;
    let meta = DatasetMeta {
        description: if cfg.description.is_empty() {
            scen.name.clone()
        } else {
            cfg.description.clone()
        },
        control_hz: scen.control_hz,
        seed: scen.seed,
        source: scen.name.clone(),
    };
    collect_dataset(&log, &cfg.dataset, meta)
}
