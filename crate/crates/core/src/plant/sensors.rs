//! Encoder, rate-gyro and derived-acceleration sensing.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{GimbalError, Result};
use crate::kinematics::{AngularKinematics, BaseMotion, GimbalState, JointAccel, Vec3};

/// First-order low-pass, bilinear transform with the cutoff prewarped so the
/// discrete magnitude at `cutoff` is exactly `1/√2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lowpass {
    k: f64,
    x_prev: f64,
    y_prev: f64,
    primed: bool,
}

impl Lowpass {
    pub fn new(cutoff: f64, fs: f64) -> Result<Self> {
        if !(cutoff > 0.0 && fs > 2.0 * cutoff) {
            return Err(GimbalError::BadRate { fs, cutoff });
        }
        Ok(Self {
            k: (std::f64::consts::PI * cutoff / fs).tan(),
            x_prev: 0.0,
            y_prev: 0.0,
            primed: false,
        })
    }

    /// Starts from rest at the first sample's value.
    pub fn filter(&mut self, x: f64) -> f64 {
        if !self.primed {
            self.primed = true;
            self.x_prev = x;
            self.y_prev = x;
            return x;
        }
        let k = self.k;
        let y = (k * (x + self.x_prev) - (k - 1.0) * self.y_prev) / (k + 1.0);
        self.x_prev = x;
        self.y_prev = y;
        y
    }

    pub fn reset(&mut self) {
        self.primed = false;
    }
}

pub fn lowpass(series: &[f64], cutoff: f64, fs: f64) -> Result<Vec<f64>> {
    let mut f = Lowpass::new(cutoff, fs)?;
    Ok(series.iter().map(|x| f.filter(*x)).collect())
}

/// Streaming `(x[n] - x[n-window])·fs/window`; zero until the window fills.
#[derive(Debug, Clone, PartialEq)]
pub struct BackwardDiff {
    window: usize,
    fs: f64,
    buf: VecDeque<f64>,
}

impl BackwardDiff {
    pub fn new(window: usize, fs: f64) -> Result<Self> {
        if window == 0 {
            return Err(GimbalError::InvalidParams(
                "difference window must be at least 1".into(),
            ));
        }
        Ok(Self {
            window,
            fs,
            buf: VecDeque::with_capacity(window + 1),
        })
    }

    /// Pretend the signal has been constant at `x`, so the warm-up outputs 0
    /// without a start-up spike.
    pub fn prefill(&mut self, x: f64) {
        self.buf.clear();
        self.buf.extend(std::iter::repeat(x).take(self.window));
    }

    pub fn push(&mut self, x: f64) -> f64 {
        self.buf.push_back(x);
        if self.buf.len() > self.window + 1 {
            self.buf.pop_front();
        }
        if self.buf.len() == self.window + 1 {
            (x - self.buf[0]) * self.fs / self.window as f64
        } else {
            0.0
        }
    }
}

pub fn backward_diff(series: &[f64], window: usize, fs: f64) -> Result<Vec<f64>> {
    let mut d = BackwardDiff::new(window, fs)?;
    Ok(series.iter().map(|x| d.push(*x)).collect())
}

/// Where the controllers' azimuth rate comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AzimuthRateSource {
    /// One-sample backward difference of the yaw encoder.
    #[default]
    EncoderDiff,
    /// Gyro body rate mapped back through the pitch angle, base rate removed.
    GyroTransform,
    Truth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccelSource {
    /// Backward difference of the measured rates.
    #[default]
    BackwardDiff,
    /// Exact joint accelerations from the plant (noiseless reference).
    Ideal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorConfig {
    /// Gyro low-pass cutoff, Hz; `None` bypasses the filter.
    pub gyro_lpf_cutoff: Option<f64>,
    pub accel_diff_window: usize,
    /// Encoder resolution, rad; 0 means ideal.
    pub encoder_quant: f64,
    pub azimuth_rate: AzimuthRateSource,
    pub accel: AccelSource,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self {
            gyro_lpf_cutoff: Some(100.0),
            accel_diff_window: 10,
            encoder_quant: 0.0,
            azimuth_rate: AzimuthRateSource::EncoderDiff,
            accel: AccelSource::BackwardDiff,
        }
    }
}

impl SensorConfig {
    /// Sensors equal to the truth, accelerations from the plant.
    pub fn ideal() -> Self {
        Self {
            gyro_lpf_cutoff: None,
            accel_diff_window: 1,
            encoder_quant: 0.0,
            azimuth_rate: AzimuthRateSource::Truth,
            accel: AccelSource::Ideal,
        }
    }

    pub fn validate(&self, fs: f64) -> Result<()> {
        if self.accel_diff_window == 0 {
            return Err(GimbalError::InvalidParams(
                "accel_diff_window must be at least 1".into(),
            ));
        }
        if let Some(fc) = self.gyro_lpf_cutoff {
            Lowpass::new(fc, fs)?;
        }
        if !(self.encoder_quant >= 0.0 && self.encoder_quant.is_finite()) {
            return Err(GimbalError::InvalidParams(
                "encoder_quant must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Samples by which the derived acceleration lags the truth, on average.
    pub fn accel_delay_samples(&self) -> f64 {
        match self.accel {
            AccelSource::Ideal => 0.0,
            AccelSource::BackwardDiff => self.accel_diff_window as f64 / 2.0,
        }
    }
}

/// One sensor sample.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Measurement {
    pub enc_psi: f64,
    pub enc_theta: f64,
    /// Filtered gyro body rate of the pitch gimbal, `F_m` components.
    pub gyro: [f64; 3],
    pub psi_a_dot: f64,
    pub theta_m_dot: f64,
    pub psi_a_ddot: f64,
    pub theta_m_ddot: f64,
}

impl Measurement {
    pub fn state(&self) -> GimbalState {
        GimbalState::new(
            self.enc_psi,
            self.enc_theta,
            self.psi_a_dot,
            self.theta_m_dot,
        )
    }

    pub fn accel(&self) -> JointAccel {
        JointAccel::new(self.psi_a_ddot, self.theta_m_ddot)
    }
}

fn quantize(x: f64, q: f64) -> f64 {
    if q > 0.0 {
        (x / q).round() * q
    } else {
        x
    }
}

/// Streaming sensor chain sampled at the control rate.
#[derive(Debug, Clone)]
pub struct SensorChain {
    cfg: SensorConfig,
    fs: f64,
    lpf: Option<[Lowpass; 3]>,
    prev_enc_psi: f64,
    diff: [BackwardDiff; 2],
}

impl SensorChain {
    /// The chain starts as if the gimbal had been moving steadily at `initial`.
    pub fn new(cfg: SensorConfig, fs: f64, initial: &GimbalState) -> Result<Self> {
        cfg.validate(fs)?;
        let lpf = match cfg.gyro_lpf_cutoff {
            Some(fc) => Some([Lowpass::new(fc, fs)?; 3]),
            None => None,
        };
        let mut diff = [
            BackwardDiff::new(cfg.accel_diff_window, fs)?,
            BackwardDiff::new(cfg.accel_diff_window, fs)?,
        ];
        diff[0].prefill(initial.psi_a_dot);
        diff[1].prefill(initial.theta_m_dot);
        Ok(Self {
            cfg,
            fs,
            lpf,
            prev_enc_psi: quantize(initial.psi_a - initial.psi_a_dot / fs, cfg.encoder_quant),
            diff,
        })
    }

    pub fn config(&self) -> &SensorConfig {
        &self.cfg
    }

    /// Sample the true state. `true_accel` feeds the ideal acceleration source.
    pub fn sample(
        &mut self,
        truth: &GimbalState,
        base: &BaseMotion,
        true_accel: Option<JointAccel>,
    ) -> Measurement {
        let kin = AngularKinematics::new(truth, base);
        let raw = kin.omega_m;
        let gyro = match &mut self.lpf {
            Some(f) => Vec3::new(f[0].filter(raw.x), f[1].filter(raw.y), f[2].filter(raw.z)),
            None => raw,
        };
        // base contributions, known from the platform's own inertial unit
        let base_a = kin.r3 * base.omega_b;
        let base_m = kin.r2 * base_a;

        let enc_psi = quantize(truth.psi_a, self.cfg.encoder_quant);
        let enc_theta = quantize(truth.theta_m, self.cfg.encoder_quant);

        let theta_m_dot = gyro.y - base_m.y;
        let psi_a_dot = match self.cfg.azimuth_rate {
            AzimuthRateSource::EncoderDiff => (enc_psi - self.prev_enc_psi) * self.fs,
            AzimuthRateSource::GyroTransform => {
                let (s, c) = enc_theta.sin_cos();
                -s * gyro.x + c * gyro.z - base_a.z
            }
            AzimuthRateSource::Truth => truth.psi_a_dot,
        };
        self.prev_enc_psi = enc_psi;

        let d_psi = self.diff[0].push(psi_a_dot);
        let d_theta = self.diff[1].push(theta_m_dot);
        let (psi_a_ddot, theta_m_ddot) = match (self.cfg.accel, true_accel) {
            (AccelSource::Ideal, Some(a)) => (a.psi_a, a.theta_m),
            _ => (d_psi, d_theta),
        };

        Measurement {
            enc_psi,
            enc_theta,
            gyro: [gyro.x, gyro.y, gyro.z],
            psi_a_dot,
            theta_m_dot,
            psi_a_ddot,
            theta_m_ddot,
        }
    }
}

/// Batch sensing of a recorded true-state history (stationary base unless
/// given). `accels`, when present, feeds the ideal acceleration source.
pub fn sense(
    history: &[GimbalState],
    accels: Option<&[JointAccel]>,
    base: &BaseMotion,
    cfg: &SensorConfig,
    fs: f64,
) -> Result<Vec<Measurement>> {
    let Some(first) = history.first() else {
        return Ok(Vec::new());
    };
    let mut chain = SensorChain::new(*cfg, fs, first)?;
    Ok(history
        .iter()
        .enumerate()
        .map(|(i, s)| chain.sample(s, base, accels.map(|a| a[i])))
        .collect())
}
