//! Least-squares identification of the regressor coefficients.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GimbalError, Result};
use crate::ident::dataset::DisturbanceDataset;
use crate::ident::regressor::{features, N_TERMS};
use crate::plant::DisturbanceCoefficients;

/// Relative threshold on the equilibrated `R` diagonal for rank decisions.
pub const RANK_TOL: f64 = 1e-12;

/// Stacked regressor: row `2n` carries the azimuth terms in columns
/// `0..37`, row `2n+1` the elevation terms in columns `37..74`.
pub fn build_regressor(ds: &DisturbanceDataset) -> (DMatrix<f64>, DVector<f64>) {
    let n = ds.len();
    let mut a = DMatrix::zeros(2 * n, 2 * N_TERMS);
    let mut b = DVector::zeros(2 * n);
    for (i, s) in ds.samples.iter().enumerate() {
        let phi = features(&s.state());
        for (k, v) in phi.iter().enumerate() {
            a[(2 * i, k)] = *v;
            a[(2 * i + 1, N_TERMS + k)] = *v;
        }
        b[2 * i] = s.du_a;
        b[2 * i + 1] = s.du_e;
    }
    (a, b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsDiagnostics {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub residual_rms: f64,
    /// Ratio of largest to smallest `|R_ii|` after column equilibration.
    pub condition_estimate: f64,
    pub column_norms: Vec<f64>,
    pub ridge: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsSolution {
    pub x: DVector<f64>,
    pub diagnostics: LsDiagnostics,
}

/// Minimise `‖Ax − b‖² + ridge·‖x‖²` by Householder QR on the column-
/// equilibrated (and, with a ridge, augmented) system.
pub fn solve_ls(a: &DMatrix<f64>, b: &DVector<f64>, ridge: f64) -> Result<LsSolution> {
    let (m, n) = a.shape();
    if !(ridge >= 0.0) {
        return Err(GimbalError::InvalidParams(
            "ridge must be non-negative".into(),
        ));
    }
    if m < n && ridge == 0.0 {
        return Err(GimbalError::RankDeficient { rank: m, cols: n });
    }
    let norms: Vec<f64> = (0..n).map(|j| a.column(j).norm()).collect();
    let scale: Vec<f64> = norms
        .iter()
        .map(|v| if *v > 0.0 { 1.0 / v } else { 1.0 })
        .collect();

    let extra = if ridge > 0.0 { n } else { 0 };
    let mut aa = DMatrix::zeros(m + extra, n);
    aa.rows_mut(0, m).copy_from(a);
    let mut bb = DVector::zeros(m + extra);
    bb.rows_mut(0, m).copy_from(b);
    for j in 0..extra {
        aa[(m + j, j)] = ridge.sqrt();
    }
    for j in 0..n {
        aa.column_mut(j).scale_mut(scale[j]);
    }

    let qr = aa.qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..n).map(|i| r[(i, i)].abs()).collect();
    let dmax = diag.iter().cloned().fold(0.0, f64::max);
    let rank = diag.iter().filter(|d| **d > RANK_TOL * dmax).count();
    if rank < n {
        return Err(GimbalError::RankDeficient { rank, cols: n });
    }
    let dmin = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut qtb = bb.clone();
    qr.q_tr_mul(&mut qtb);
    let y = r
        .solve_upper_triangular(&qtb.rows(0, n).into_owned())
        .ok_or(GimbalError::RankDeficient { rank, cols: n })?;
    let x = DVector::from_iterator(n, y.iter().zip(&scale).map(|(y, s)| y * s));
    let resid = a * &x - b;
    let residual_rms = if m > 0 {
        (resid.norm_squared() / m as f64).sqrt()
    } else {
        0.0
    };
    Ok(LsSolution {
        x,
        diagnostics: LsDiagnostics {
            rows: m,
            cols: n,
            rank,
            residual_rms,
            condition_estimate: dmax / dmin,
            column_norms: norms,
            ridge,
        },
    })
}

/// Coefficients fitted to one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub regressor_version: u32,
    pub coefficients: DisturbanceCoefficients,
    pub diagnostics: LsDiagnostics,
    pub source: String,
}

pub fn fit(ds: &DisturbanceDataset, ridge: f64) -> Result<FitResult> {
    if ds.is_empty() {
        return Err(GimbalError::EmptyRun);
    }
    let (a, b) = build_regressor(ds);
    let sol = solve_ls(&a, &b, ridge)?;
    let x = sol.x.as_slice();
    Ok(FitResult {
        regressor_version: crate::ident::regressor::REGRESSOR_VERSION,
        coefficients: DisturbanceCoefficients {
            k_a: x[..N_TERMS].to_vec(),
            k_m: x[N_TERMS..].to_vec(),
        },
        diagnostics: sol.diagnostics,
        source: ds.meta.source.clone(),
    })
}

/// Fit quality of coefficients on their own dataset and on another.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossReport {
    /// Per-axis RMS of `estimated − actual` on the fitting dataset.
    pub self_rms: [f64; 2],
    /// Per-axis RMS on the other dataset.
    pub cross_rms: [f64; 2],
    pub self_rms_total: f64,
    pub cross_rms_total: f64,
    /// `(estimated, actual)` torque pairs on the other dataset.
    #[serde(skip)]
    pub series: Vec<([f64; 2], [f64; 2])>,
}

impl CrossReport {
    pub fn ratio(&self) -> f64 {
        self.cross_rms_total / self.self_rms_total
    }
}

fn residuals(
    k: &DisturbanceCoefficients,
    ds: &DisturbanceDataset,
) -> ([f64; 2], f64, Vec<([f64; 2], [f64; 2])>) {
    let mut sse = [0.0; 2];
    let mut series = Vec::with_capacity(ds.len());
    for s in &ds.samples {
        let (ea, em) = k.eval(&s.state());
        sse[0] += (ea - s.du_a).powi(2);
        sse[1] += (em - s.du_e).powi(2);
        series.push(([ea, em], [s.du_a, s.du_e]));
    }
    let n = ds.len().max(1) as f64;
    let rms = [(sse[0] / n).sqrt(), (sse[1] / n).sqrt()];
    let total = ((sse[0] + sse[1]) / (2.0 * n)).sqrt();
    (rms, total, series)
}

/// Evaluate coefficients fitted on `fitted_on` against `other`.
pub fn cross_validate(
    k: &DisturbanceCoefficients,
    fitted_on: &DisturbanceDataset,
    other: &DisturbanceDataset,
) -> Result<CrossReport> {
    if fitted_on.is_empty() || other.is_empty() {
        return Err(GimbalError::EmptyRun);
    }
    let (self_rms, self_total, _) = residuals(k, fitted_on);
    let (cross_rms, cross_total, series) = residuals(k, other);
    Ok(CrossReport {
        self_rms,
        cross_rms,
        self_rms_total: self_total,
        cross_rms_total: cross_total,
        series,
    })
}

/// Largest relative disagreement `|a − b| / max(|a|, |b|)` over all
/// coefficients, with its index (0..74, azimuth first).
pub fn max_relative_disagreement(
    a: &DisturbanceCoefficients,
    b: &DisturbanceCoefficients,
) -> (usize, f64) {
    a.k_a
        .iter()
        .chain(&a.k_m)
        .zip(b.k_a.iter().chain(&b.k_m))
        .map(|(x, y)| {
            let d = x.abs().max(y.abs());
            if d == 0.0 {
                0.0
            } else {
                (x - y).abs() / d
            }
        })
        .enumerate()
        .fold(
            (0, 0.0),
            |best, (i, v)| if v > best.1 { (i, v) } else { best },
        )
}
