//! Uniformly sampled simulation records and their CSV form.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GimbalError, Result};

/// One control tick. Column order of the CSV follows field order.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LogRow {
    pub t: f64,
    pub ref_psi: f64,
    pub ref_theta: f64,
    pub ref_psi_dot: f64,
    pub ref_theta_dot: f64,
    pub ref_psi_ddot: f64,
    pub ref_theta_ddot: f64,
    pub psi_a: f64,
    pub theta_m: f64,
    pub psi_a_dot: f64,
    pub theta_m_dot: f64,
    /// Feedback controller torque before any compensation.
    pub u_d_a: f64,
    pub u_d_e: f64,
    /// Torque applied to the plant over the following control interval.
    pub u_a: f64,
    pub u_e: f64,
    /// Disturbance-torque estimate (inverse model of the measured motion
    /// minus the torque that produced it).
    pub du_a: f64,
    pub du_e: f64,
    /// True disturbance torque at this state.
    pub td_a: f64,
    pub td_e: f64,
    pub f_am_x: f64,
    pub f_am_y: f64,
    pub f_am_z: f64,
    pub f_ab_x: f64,
    pub f_ab_y: f64,
    pub f_ab_z: f64,
    pub m_amx: f64,
    pub m_amz: f64,
    pub m_abx: f64,
    pub m_aby: f64,
    pub enc_psi: f64,
    pub enc_theta: f64,
    pub gyro_x: f64,
    pub gyro_y: f64,
    pub gyro_z: f64,
    pub meas_psi_dot: f64,
    pub meas_theta_dot: f64,
    pub meas_psi_ddot: f64,
    pub meas_theta_ddot: f64,
    pub v_a: f64,
    pub v_e: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimulationLog {
    pub rows: Vec<LogRow>,
}

impl SimulationLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push(&mut self, row: LogRow) {
        self.rows.push(row);
    }

    pub fn column(&self, f: impl Fn(&LogRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }

    pub fn times(&self) -> Vec<f64> {
        self.column(|r| r.t)
    }

    /// Sample interval, from the first two rows.
    pub fn dt(&self) -> Option<f64> {
        (self.rows.len() >= 2).then(|| self.rows[1].t - self.rows[0].t)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        if self.rows.is_empty() {
            wr.write_record(header())?;
        }
        for r in &self.rows {
            wr.serialize(r)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| GimbalError::Config(e.to_string()))
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let rows = rd
            .deserialize()
            .collect::<std::result::Result<Vec<LogRow>, _>>()?;
        Ok(Self { rows })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::io::write_atomic(path, self.to_csv_string()?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

/// CSV column names in order.
pub fn header() -> Vec<String> {
    let mut wr = csv::Writer::from_writer(Vec::new());
    wr.serialize(LogRow::default()).expect("in-memory write");
    let data = wr.into_inner().expect("in-memory flush");
    let text = String::from_utf8(data).expect("utf8");
    text.lines()
        .next()
        .unwrap_or_default()
        .split(',')
        .map(str::to_string)
        .collect()
}
