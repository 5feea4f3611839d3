//! Training sets for the disturbance compensator.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GimbalError, Result};
use crate::plant::{LogRow, SimulationLog};

/// Feature names in canonical order; the optional PID torques come last.
pub const FEATURES: [&str; 8] = [
    "ref_psi",
    "ref_theta",
    "ref_psi_dot",
    "ref_theta_dot",
    "ref_psi_ddot",
    "ref_theta_ddot",
    "u_d_a",
    "u_d_e",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureOptions {
    /// Append the feedback torque `u_d` to the desired kinematics.
    pub include_u_d: bool,
    /// Keep every `stride`-th control tick.
    pub stride: usize,
    /// Discard samples before this time, s.
    pub skip_s: f64,
    /// Pair the `Δu` logged at tick `n` with the features of tick
    /// `n − target_lag`, undoing the delay of a differentiated acceleration.
    pub target_lag: usize,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        Self {
            include_u_d: false,
            stride: 8,
            skip_s: 0.05,
            target_lag: 0,
        }
    }
}

impl FeatureOptions {
    pub fn n_in(&self) -> usize {
        if self.include_u_d {
            8
        } else {
            6
        }
    }
}

/// Features of one log row under `opts`.
pub fn features(row: &LogRow, include_u_d: bool) -> Vec<f64> {
    let mut x = vec![
        row.ref_psi,
        row.ref_theta,
        row.ref_psi_dot,
        row.ref_theta_dot,
        row.ref_psi_ddot,
        row.ref_theta_ddot,
    ];
    if include_u_d {
        x.extend([row.u_d_a, row.u_d_e]);
    }
    x
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainingSet {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<Vec<f64>>,
    pub feature_names: Vec<String>,
}

impl TrainingSet {
    pub fn new(inputs: Vec<Vec<f64>>, targets: Vec<Vec<f64>>, feature_names: Vec<String>) -> Self {
        assert_eq!(inputs.len(), targets.len());
        Self {
            inputs,
            targets,
            feature_names,
        }
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn n_in(&self) -> usize {
        self.inputs.first().map_or(0, Vec::len)
    }

    fn subset(&self, idx: &[usize]) -> TrainingSet {
        TrainingSet {
            inputs: idx.iter().map(|&i| self.inputs[i].clone()).collect(),
            targets: idx.iter().map(|&i| self.targets[i].clone()).collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    /// Seeded shuffle, then the first `train_frac` for training.
    pub fn split(&self, train_frac: f64, seed: u64) -> (TrainingSet, TrainingSet) {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let n_train = ((self.len() as f64) * train_frac).round() as usize;
        let (a, b) = idx.split_at(n_train.min(self.len()));
        (self.subset(a), self.subset(b))
    }

    /// Root-mean-square of the targets over both outputs.
    pub fn target_rms(&self) -> f64 {
        let n = (self.len() * self.targets.first().map_or(1, Vec::len)).max(1) as f64;
        (self.targets.iter().flatten().map(|v| v * v).sum::<f64>() / n).sqrt()
    }
}

/// Pair desired kinematics (and optionally `u_d`) with the logged `Δu`.
pub fn build_training_set(log: &SimulationLog, opts: &FeatureOptions) -> Result<TrainingSet> {
    let stride = opts.stride.max(1);
    let mut inputs = Vec::new();
    let mut targets = Vec::new();
    let lag = opts.target_lag;
    let rows = log.rows.iter().zip(log.rows.iter().skip(lag));
    for (src, row) in rows.filter(|(_, r)| r.t >= opts.skip_s).step_by(stride) {
        let x = features(src, opts.include_u_d);
        let y = vec![row.du_a, row.du_e];
        if x.iter().chain(&y).all(|v| v.is_finite()) {
            inputs.push(x);
            targets.push(y);
        }
    }
    if inputs.is_empty() {
        return Err(GimbalError::EmptyRun);
    }
    let names = FEATURES[..opts.n_in()]
        .iter()
        .map(|s| s.to_string())
        .collect();
    Ok(TrainingSet::new(inputs, targets, names))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize) -> TrainingSet {
        TrainingSet::new(
            (0..n).map(|i| vec![i as f64]).collect(),
            (0..n).map(|i| vec![2.0 * i as f64]).collect(),
            vec!["x".into()],
        )
    }

    #[test]
    fn split_is_deterministic_and_disjoint() {
        let s = set(100);
        let (a1, b1) = s.split(0.8, 42);
        let (a2, b2) = s.split(0.8, 42);
        assert_eq!(a1, a2);
        assert_eq!(b1, b2);
        assert_eq!((a1.len(), b1.len()), (80, 20));
        let mut all: Vec<f64> = a1.inputs.iter().chain(&b1.inputs).map(|x| x[0]).collect();
        all.sort_by(f64::total_cmp);
        assert_eq!(all, (0..100).map(|i| i as f64).collect::<Vec<_>>());
        assert_ne!(s.split(0.8, 43).0, a1);
    }

    #[test]
    fn empty_log_is_an_error() {
        assert!(matches!(
            build_training_set(&SimulationLog::new(), &FeatureOptions::default()),
            Err(GimbalError::EmptyRun)
        ));
    }
}
