//! Levenberg–Marquardt (and a first-order fallback) for the MLP.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GimbalError, Result};
use crate::mlp::data::TrainingSet;
use crate::mlp::model::{MlpModel, Normalization};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Optimizer {
    Lm,
    /// Full-batch Adam, for sets too large for the `P × P` normal matrix.
    Adam {
        learning_rate: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainOptions {
    pub optimizer: Optimizer,
    pub max_epochs: usize,
    pub lambda0: f64,
    pub lambda_factor: f64,
    pub lambda_max: f64,
    /// Stop when the largest gradient component falls below this.
    pub grad_tol: f64,
    /// Stop when the training MSE falls below this.
    pub min_loss: f64,
    /// Epochs without validation improvement before stopping.
    pub patience: usize,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            optimizer: Optimizer::Lm,
            max_epochs: 200,
            lambda0: 1e-3,
            lambda_factor: 10.0,
            lambda_max: 1e12,
            grad_tol: 1e-12,
            min_loss: 0.0,
            patience: 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub epoch: usize,
    /// Training mean squared error after the accepted step.
    pub loss: f64,
    pub val_loss: Option<f64>,
    pub lambda: f64,
}

const CHUNK: usize = 128;

struct Normal {
    jtj: DMatrix<f64>,
    jte: DVector<f64>,
    loss: f64,
}

fn mse(model: &MlpModel, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> f64 {
    if inputs.is_empty() {
        return f64::NAN;
    }
    let sse: f64 = inputs
        .par_chunks(CHUNK)
        .zip(targets.par_chunks(CHUNK))
        .map(|(zs, ys)| {
            zs.iter()
                .zip(ys)
                .map(|(z, y)| {
                    model
                        .forward_normalized(z)
                        .iter()
                        .zip(y)
                        .map(|(f, y)| (y - f).powi(2))
                        .sum::<f64>()
                })
                .sum::<f64>()
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    sse / (inputs.len() * model.n_out()) as f64
}

/// `JᵀJ`, `Jᵀe` and the MSE, accumulated over fixed chunks in a fixed order.
fn normal_equations(model: &MlpModel, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Normal {
    let p = model.n_params();
    let n_out = model.n_out();
    let parts: Vec<(DMatrix<f64>, DVector<f64>, f64)> = inputs
        .par_chunks(CHUNK)
        .zip(targets.par_chunks(CHUNK))
        .map(|(zs, ys)| {
            let rows = zs.len() * n_out;
            let mut jdata = vec![0.0; rows * p];
            let mut e = DVector::zeros(rows);
            for (k, (z, y)) in zs.iter().zip(ys).enumerate() {
                model.jacobian_rows(z, &mut jdata[k * n_out * p..(k + 1) * n_out * p]);
                let f = model.forward_normalized(z);
                for o in 0..n_out {
                    e[k * n_out + o] = y[o] - f[o];
                }
            }
            let j = DMatrix::from_row_slice(rows, p, &jdata);
            (j.tr_mul(&j), j.tr_mul(&e), e.norm_squared())
        })
        .collect();
    let mut jtj = DMatrix::zeros(p, p);
    let mut jte = DVector::zeros(p);
    let mut sse = 0.0;
    for (a, b, s) in parts {
        jtj += a;
        jte += b;
        sse += s;
    }
    Normal {
        jtj,
        jte,
        loss: sse / (inputs.len() * n_out) as f64,
    }
}

fn normalized(model: &MlpModel, set: &TrainingSet) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let norm = model
        .normalization
        .as_ref()
        .ok_or(GimbalError::ModelNotTrained)?;
    Ok((
        set.inputs.iter().map(|x| norm.apply(x)).collect(),
        set.targets.clone(),
    ))
}

/// Train on `train`, early-stopping on `val` when given. Normalization
/// statistics are taken from `train` if the model has none. Returns the
/// model with the best validation loss (or the last accepted step).
pub fn train_lm(
    mut model: MlpModel,
    train: &TrainingSet,
    val: Option<&TrainingSet>,
    opts: &TrainOptions,
) -> Result<(MlpModel, Vec<HistoryEntry>)> {
    if train.is_empty() {
        return Err(GimbalError::EmptyRun);
    }
    if train.n_in() != model.n_in() {
        return Err(GimbalError::InvalidParams(format!(
            "training inputs have {} features, model expects {}",
            train.n_in(),
            model.n_in()
        )));
    }
    if model.normalization.is_none() {
        model.normalization = Some(Normalization::fit(&train.inputs));
    }
    if !train.feature_names.is_empty() {
        model.feature_names = train.feature_names.clone();
    }
    let (zs, ys) = normalized(&model, train)?;
    let (vz, vy) = match val {
        Some(v) if !v.is_empty() => normalized(&model, v)?,
        _ => (Vec::new(), Vec::new()),
    };
    let (model, history, reason) = match opts.optimizer {
        Optimizer::Lm => run_lm(model, &zs, &ys, &vz, &vy, opts)?,
        Optimizer::Adam { learning_rate } => {
            run_adam(model, &zs, &ys, &vz, &vy, opts, learning_rate)
        }
    };
    let mut model = model;
    model.meta.epochs = history.len();
    model.meta.final_loss = mse(&model, &zs, &ys);
    model.meta.final_val_loss = (!vz.is_empty()).then(|| mse(&model, &vz, &vy));
    model.meta.stop_reason = reason;
    model.meta.n_train = train.len();
    model.meta.n_val = val.map_or(0, TrainingSet::len);
    Ok((model, history))
}

struct EarlyStop {
    best: f64,
    best_params: Vec<f64>,
    since: usize,
}

fn run_lm(
    mut model: MlpModel,
    zs: &[Vec<f64>],
    ys: &[Vec<f64>],
    vz: &[Vec<f64>],
    vy: &[Vec<f64>],
    opts: &TrainOptions,
) -> Result<(MlpModel, Vec<HistoryEntry>, String)> {
    let p = model.n_params();
    let mut lambda = opts.lambda0;
    let mut params = model.params();
    let mut ne = normal_equations(&model, zs, ys);
    if !ne.loss.is_finite() {
        return Err(GimbalError::Diverged { lambda });
    }
    let mut history = Vec::new();
    let mut stop = EarlyStop {
        best: if vz.is_empty() {
            f64::INFINITY
        } else {
            mse(&model, vz, vy)
        },
        best_params: params.clone(),
        since: 0,
    };
    let mut reason = "max_epochs".to_string();

    'epochs: for epoch in 1..=opts.max_epochs {
        if ne.jte.amax() < opts.grad_tol {
            reason = "gradient".into();
            break;
        }
        if ne.loss <= opts.min_loss {
            reason = "min_loss".into();
            break;
        }
        loop {
            let mut a = ne.jtj.clone();
            for i in 0..p {
                a[(i, i)] += lambda;
            }
            let step = a.cholesky().map(|c| c.solve(&ne.jte));
            if let Some(delta) = step {
                let trial: Vec<f64> = params
                    .iter()
                    .zip(delta.iter())
                    .map(|(p, d)| p + d)
                    .collect();
                model.set_params(&trial);
                let loss = mse(&model, zs, ys);
                if loss.is_finite() && loss < ne.loss {
                    params = trial;
                    lambda = (lambda / opts.lambda_factor).max(1e-20);
                    ne = normal_equations(&model, zs, ys);
                    break;
                }
            }
            model.set_params(&params);
            lambda *= opts.lambda_factor;
            if lambda > opts.lambda_max {
                if history.is_empty() {
                    return Err(GimbalError::Diverged { lambda });
                }
                reason = "lambda_max".into();
                break 'epochs;
            }
        }
        let val_loss = (!vz.is_empty()).then(|| mse(&model, vz, vy));
        history.push(HistoryEntry {
            epoch,
            loss: ne.loss,
            val_loss,
            lambda,
        });
        if let Some(val_loss) = val_loss {
            if val_loss < stop.best {
                stop.best = val_loss;
                stop.best_params = params.clone();
                stop.since = 0;
            } else {
                stop.since += 1;
                if stop.since >= opts.patience {
                    reason = "validation".into();
                    break;
                }
            }
        }
    }
    if !vz.is_empty() {
        model.set_params(&stop.best_params);
    } else {
        model.set_params(&params);
    }
    Ok((model, history, reason))
}

fn run_adam(
    mut model: MlpModel,
    zs: &[Vec<f64>],
    ys: &[Vec<f64>],
    vz: &[Vec<f64>],
    vy: &[Vec<f64>],
    opts: &TrainOptions,
    lr: f64,
) -> (MlpModel, Vec<HistoryEntry>, String) {
    let (b1, b2, eps) = (0.9, 0.999, 1e-8);
    let p = model.n_params();
    let mut params = model.params();
    let (mut m, mut v) = (vec![0.0; p], vec![0.0; p]);
    let scale = 1.0 / (zs.len() * model.n_out()) as f64;
    let mut history = Vec::new();
    let mut best = (f64::INFINITY, params.clone(), 0usize);
    let mut reason = "max_epochs".to_string();
    for epoch in 1..=opts.max_epochs {
        let g = model.loss_gradient(zs, ys) * scale;
        if g.amax() < opts.grad_tol {
            reason = "gradient".into();
            break;
        }
        for i in 0..p {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            let mh = m[i] / (1.0 - b1.powi(epoch as i32));
            let vh = v[i] / (1.0 - b2.powi(epoch as i32));
            params[i] -= lr * mh / (vh.sqrt() + eps);
        }
        model.set_params(&params);
        let loss = mse(&model, zs, ys);
        let val_loss = (!vz.is_empty()).then(|| mse(&model, vz, vy));
        history.push(HistoryEntry {
            epoch,
            loss,
            val_loss,
            lambda: 0.0,
        });
        if let Some(vl) = val_loss.filter(|vl| *vl < best.0) {
            best = (vl, params.clone(), epoch);
        }
    }
    if !vz.is_empty() {
        model.set_params(&best.1);
    }
    (model, history, reason)
}
