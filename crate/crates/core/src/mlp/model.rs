//! Fully connected network with tanh hidden layers and a linear output.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GimbalError, Result};

pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    #[default]
    Tanh,
    /// Identity hidden layers; used to check the network against linear models.
    Linear,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Linear => z,
        }
    }

    /// Derivative expressed through the activation value `a`.
    fn slope(self, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
            Activation::Linear => 1.0,
        }
    }
}

/// Per-feature affine input normalization `(x − mean) / std`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Normalization {
    pub fn identity(n: usize) -> Self {
        Self {
            mean: vec![0.0; n],
            std: vec![1.0; n],
        }
    }

    /// Statistics of the rows; zero spread is replaced by 1.
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let n = rows.first().map_or(0, Vec::len);
        let count = rows.len().max(1) as f64;
        let mean: Vec<f64> = (0..n)
            .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / count)
            .collect();
        let std = (0..n)
            .map(|j| {
                let var = rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / count;
                let s = var.sqrt();
                if s > 0.0 && s.is_finite() {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Self { mean, std }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((x, m), s)| (x - m) / s)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct TrainingMeta {
    pub epochs: usize,
    pub final_loss: f64,
    pub final_val_loss: Option<f64>,
    pub stop_reason: String,
    pub n_train: usize,
    pub n_val: usize,
}

/// Weights are stored row-major per layer, `weights[l]` of size
/// `sizes[l+1] × sizes[l]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub version: u32,
    pub sizes: Vec<usize>,
    pub hidden: Activation,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    pub normalization: Option<Normalization>,
    pub seed: u64,
    #[serde(default)]
    pub feature_names: Vec<String>,
    #[serde(default)]
    pub meta: TrainingMeta,
}

/// Activations of every layer for one input; `acts[0]` is the normalized input.
pub struct Trace {
    pub acts: Vec<Vec<f64>>,
}

impl MlpModel {
    /// Glorot-uniform weights and zero biases from a seeded generator.
    pub fn new(sizes: &[usize], seed: u64) -> Self {
        assert!(
            sizes.len() >= 2,
            "need at least an input and an output layer"
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for w in sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            weights.push(
                (0..fan_in * fan_out)
                    .map(|_| rng.gen_range(-limit..limit))
                    .collect(),
            );
            biases.push(vec![0.0; fan_out]);
        }
        Self {
            version: MODEL_VERSION,
            sizes: sizes.to_vec(),
            hidden: Activation::Tanh,
            weights,
            biases,
            normalization: None,
            seed,
            feature_names: Vec::new(),
            meta: TrainingMeta::default(),
        }
    }

    /// The compensator architecture: `n_in → 20 → 20 → 2`.
    pub fn compensator(n_in: usize, seed: u64) -> Self {
        Self::new(&[n_in, 20, 20, 2], seed)
    }

    /// All weights and biases set to zero, identity normalization.
    pub fn zeros(sizes: &[usize]) -> Self {
        let mut m = Self::new(sizes, 0);
        m.weights.iter_mut().flatten().for_each(|w| *w = 0.0);
        m.normalization = Some(Normalization::identity(sizes[0]));
        m
    }

    pub fn n_in(&self) -> usize {
        self.sizes[0]
    }

    pub fn n_out(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn n_params(&self) -> usize {
        self.sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    /// Parameters flattened layer by layer: weights (row-major) then biases.
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_params());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            p.extend_from_slice(w);
            p.extend_from_slice(b);
        }
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.n_params());
        let mut k = 0;
        for (w, b) in self.weights.iter_mut().zip(self.biases.iter_mut()) {
            let (nw, nb) = (w.len(), b.len());
            w.copy_from_slice(&p[k..k + nw]);
            k += nw;
            b.copy_from_slice(&p[k..k + nb]);
            k += nb;
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(GimbalError::InvalidParams(m));
        if self.sizes.len() < 2
            || self.weights.len() != self.sizes.len() - 1
            || self.biases.len() != self.weights.len()
        {
            return bad("layer count mismatch".into());
        }
        for (l, w) in self.sizes.windows(2).enumerate() {
            if self.weights[l].len() != w[0] * w[1] || self.biases[l].len() != w[1] {
                return bad(format!("layer {l} has the wrong shape"));
            }
        }
        if let Some(n) = &self.normalization {
            if n.mean.len() != self.n_in()
                || n.std.len() != self.n_in()
                || n.std.iter().any(|s| !(*s > 0.0))
            {
                return bad("normalization statistics do not match the input layer".into());
            }
        }
        Ok(())
    }

    fn normalization(&self) -> Result<&Normalization> {
        self.normalization
            .as_ref()
            .ok_or(GimbalError::ModelNotTrained)
    }

    /// Forward pass on a raw (un-normalized) input.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let z = self.normalization()?.apply(x);
        Ok(self.forward_normalized(&z))
    }

    /// Forward pass on an already normalized input.
    pub fn forward_normalized(&self, z: &[f64]) -> Vec<f64> {
        self.trace(z).acts.pop().unwrap()
    }

    pub fn trace(&self, z: &[f64]) -> Trace {
        assert_eq!(z.len(), self.n_in(), "input width");
        let last = self.weights.len() - 1;
        let mut acts = vec![z.to_vec()];
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let a = acts.last().unwrap();
            let (n_out, n_in) = (self.sizes[l + 1], self.sizes[l]);
            let out: Vec<f64> = (0..n_out)
                .map(|i| {
                    let row = &w[i * n_in..(i + 1) * n_in];
                    let s = b[i] + row.iter().zip(a).map(|(w, a)| w * a).sum::<f64>();
                    if l == last {
                        s
                    } else {
                        self.hidden.apply(s)
                    }
                })
                .collect();
            acts.push(out);
        }
        Trace { acts }
    }

    /// Jacobian of the outputs with respect to all parameters at one
    /// normalized input: `n_out` rows written into `out` (row-major,
    /// `n_out × n_params`).
    pub fn jacobian_rows(&self, z: &[f64], out: &mut [f64]) {
        let p = self.n_params();
        let n_out = self.n_out();
        assert_eq!(out.len(), n_out * p);
        let tr = self.trace(z);
        let n_layers = self.weights.len();
        // parameter offsets per layer
        let mut offs = Vec::with_capacity(n_layers);
        let mut k = 0;
        for w in self.sizes.windows(2) {
            offs.push(k);
            k += w[0] * w[1] + w[1];
        }
        for o in 0..n_out {
            let row = &mut out[o * p..(o + 1) * p];
            let mut delta = vec![0.0; n_out];
            delta[o] = 1.0;
            for l in (0..n_layers).rev() {
                let (n_o, n_i) = (self.sizes[l + 1], self.sizes[l]);
                let a_in = &tr.acts[l];
                let base = offs[l];
                for i in 0..n_o {
                    let d = delta[i];
                    let wrow = &mut row[base + i * n_i..base + (i + 1) * n_i];
                    for (g, a) in wrow.iter_mut().zip(a_in) {
                        *g = d * a;
                    }
                    row[base + n_o * n_i + i] = d;
                }
                if l > 0 {
                    let w = &self.weights[l];
                    delta = (0..n_i)
                        .map(|j| {
                            let s: f64 = (0..n_o).map(|i| w[i * n_i + j] * delta[i]).sum();
                            s * self.hidden.slope(a_in[j])
                        })
                        .collect();
                }
            }
        }
    }

    /// Stacked Jacobian of a batch of normalized inputs, `(N·n_out) × n_params`.
    pub fn jacobian(&self, inputs: &[Vec<f64>]) -> DMatrix<f64> {
        let p = self.n_params();
        let n_out = self.n_out();
        let mut data = vec![0.0; inputs.len() * n_out * p];
        for (chunk, z) in data.chunks_mut(n_out * p).zip(inputs) {
            self.jacobian_rows(z, chunk);
        }
        DMatrix::from_row_slice(inputs.len() * n_out, p, &data)
    }

    /// Gradient of `½‖y − f‖²` over a batch of normalized inputs.
    pub fn loss_gradient(&self, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> DVector<f64> {
        let p = self.n_params();
        let n_out = self.n_out();
        let mut g = DVector::zeros(p);
        let mut rows = vec![0.0; n_out * p];
        for (z, y) in inputs.iter().zip(targets) {
            let f = self.forward_normalized(z);
            self.jacobian_rows(z, &mut rows);
            for o in 0..n_out {
                let e = y[o] - f[o];
                for (gk, jk) in g.iter_mut().zip(&rows[o * p..(o + 1) * p]) {
                    *gk -= e * jk;
                }
            }
        }
        g
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: MlpModel = serde_json::from_str(s)?;
        if m.version != MODEL_VERSION {
            return Err(GimbalError::Config(format!(
                "unsupported model version {}",
                m.version
            )));
        }
        m.validate()?;
        Ok(m)
    }
}

/// Functional form of the forward pass.
pub fn forward(model: &MlpModel, x: &[f64]) -> Result<Vec<f64>> {
    model.forward(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn parameter_count() {
        assert_eq!(MlpModel::compensator(6, 0).n_params(), 602);
        assert_eq!(MlpModel::compensator(8, 0).n_params(), 642);
    }

    #[test]
    fn zero_weights_output_bias() {
        let mut m = MlpModel::zeros(&[3, 4, 2]);
        m.biases[1] = vec![0.25, -1.5];
        assert_eq!(m.forward(&[1.0, -2.0, 3.0]).unwrap(), vec![0.25, -1.5]);
    }

    #[test]
    fn hand_computed_toy() {
        let mut m = MlpModel::zeros(&[1, 2, 1]);
        m.weights[0] = vec![0.5, -1.0];
        m.biases[0] = vec![0.1, 0.2];
        m.weights[1] = vec![2.0, 3.0];
        m.biases[1] = vec![-0.3];
        let x = 0.7;
        let expect = 2.0 * (0.5f64 * x + 0.1).tanh() + 3.0 * (-x + 0.2f64).tanh() - 0.3;
        assert_relative_eq!(m.forward(&[x]).unwrap()[0], expect, epsilon = 1e-15);
    }

    #[test]
    fn untrained_model_refuses() {
        let m = MlpModel::compensator(6, 1);
        assert!(matches!(
            m.forward(&[0.0; 6]),
            Err(GimbalError::ModelNotTrained)
        ));
    }

    #[test]
    fn params_round_trip() {
        let m = MlpModel::compensator(6, 9);
        let mut n = MlpModel::zeros(&[6, 20, 20, 2]);
        n.set_params(&m.params());
        assert_eq!(n.weights, m.weights);
    }

    #[test]
    fn seeded_init_is_reproducible() {
        assert_eq!(MlpModel::compensator(6, 5), MlpModel::compensator(6, 5));
        assert_ne!(
            MlpModel::compensator(6, 5).weights,
            MlpModel::compensator(6, 6).weights
        );
        let m = MlpModel::compensator(6, 5);
        let lim = (6.0f64 / 26.0).sqrt();
        assert!(m.weights[0].iter().all(|w| w.abs() <= lim));
    }
}
