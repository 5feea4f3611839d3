//! Closed-loop scenario execution.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::control::{
    AdrcController, AxisRef, CascadePid, ControlInput, Controller, DeltaUEstimator, InverseModel,
    NnCompensator, PidController,
};
use crate::dynamics::TorqueCommand;
use crate::error::{GimbalError, Result};
use crate::kinematics::GimbalState;
use crate::mlp::MlpModel;
use crate::params::GimbalParams;
use crate::plant::{
    motor_t2v, AccelSource, ElectricalLag, LogRow, Plant, SensorChain, SimulationLog,
};
use crate::runner::config::{ControllerConfig, ScenarioConfig};

/// Deterministic counters describing the work done by one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RuntimeStats {
    pub control_ticks: usize,
    pub physics_steps: usize,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub log: SimulationLog,
    pub stats: RuntimeStats,
}

fn pid(gains: crate::control::PidGains, limits: [f64; 2], subtract: bool) -> PidController {
    PidController {
        pid: CascadePid::new(gains),
        subtract_delta_u: subtract,
        limits,
    }
}

/// Controller described by `cfg`, loading any model file relative to `base_dir`.
pub fn build_controller(
    cfg: &ScenarioConfig,
    base_dir: &Path,
    initial: &GimbalState,
) -> Result<Box<dyn Controller>> {
    let lim = cfg.torque_limit;
    Ok(match &cfg.controller {
        ControllerConfig::Pid { gains } => Box::new(pid(*gains, lim, false)),
        ControllerConfig::PidInvff { gains } => Box::new(pid(*gains, lim, true)),
        ControllerConfig::PidNn { gains, model } => {
            let path = base_dir.join(model);
            let text = std::fs::read_to_string(&path).map_err(|e| {
                GimbalError::Config(format!("cannot read model {}: {e}", path.display()))
            })?;
            let m = MlpModel::from_json(&text)?;
            Box::new(NnCompensator::new(pid(*gains, lim, false), m)?)
        }
        ControllerConfig::Adrc { params } => {
            let mut p = *params;
            if lim[0] > 0.0 {
                p.yaw.saturation = lim[0];
            }
            if lim[1] > 0.0 {
                p.pitch.saturation = lim[1];
            }
            let mut c = AdrcController::new(p)?;
            c.prime(
                [initial.psi_a, initial.theta_m],
                [initial.psi_a_dot, initial.theta_m_dot],
            );
            Box::new(c)
        }
    })
}

/// PID wrapped with an in-memory compensator model, for pipelines that train
/// and evaluate without touching disk.
pub fn nn_controller(cfg: &ScenarioConfig, model: MlpModel) -> Result<Box<dyn Controller>> {
    let gains = match &cfg.controller {
        ControllerConfig::Pid { gains }
        | ControllerConfig::PidNn { gains, .. }
        | ControllerConfig::PidInvff { gains } => *gains,
        ControllerConfig::Adrc { .. } => {
            return Err(GimbalError::Config(
                "compensator needs a PID baseline".into(),
            ));
        }
    };
    Ok(Box::new(NnCompensator::new(
        pid(gains, cfg.torque_limit, false),
        model,
    )?))
}

/// Run `cfg` with the controller it describes.
pub fn run_scenario(cfg: &ScenarioConfig, base_dir: &Path) -> Result<RunOutput> {
    cfg.validate()?;
    let params = cfg.params.resolve(base_dir)?;
    let refs = cfg.compile_references(&params)?;
    let x0 = cfg.initial_state(&refs);
    let ctrl = build_controller(cfg, base_dir, &x0)?;
    run_with(cfg, &params, ctrl)
}

/// Run `cfg` with a caller-supplied controller.
///
/// Each control tick samples the sensors, forms the inverse-model `Δu`
/// estimate, calls the controller, logs, then holds the torque over
/// `substeps` RK4 steps.
pub fn run_with(
    cfg: &ScenarioConfig,
    params: &GimbalParams,
    mut ctrl: Box<dyn Controller>,
) -> Result<RunOutput> {
    cfg.validate()?;
    let refs = cfg.compile_references(params)?;
    let fs = cfg.control_hz;
    let dt = 1.0 / fs;
    let h = cfg.physics_dt();
    let mut plant = Plant::new(params.clone(), cfg.base, cfg.disturbance.clone());
    plant.enforce_for = cfg.enforce_for;

    let mut state = cfg.initial_state(&refs);
    plant.check(&state, 0.0)?;
    let mut sensors = SensorChain::new(cfg.sensors, fs, &state)?;
    let window = match cfg.sensors.accel {
        AccelSource::BackwardDiff => cfg.sensors.accel_diff_window,
        AccelSource::Ideal => 1,
    };
    let mut est = DeltaUEstimator::new(
        InverseModel::build(cfg.estimator, params, &cfg.base),
        window,
    );
    let mut u_prev = TorqueCommand::ZERO;
    est.prefill(u_prev);
    let mut lag = cfg.motor_lag.then(|| {
        [
            ElectricalLag::new(params.motor_yaw),
            ElectricalLag::new(params.motor_pitch),
        ]
    });

    let n = cfg.n_ticks();
    let mut log = SimulationLog {
        rows: Vec::with_capacity(n + 1),
    };
    let mut stats = RuntimeStats::default();

    for k in 0..=n {
        let t = k as f64 * dt;
        let wrap = |e: GimbalError| e.at(t);
        let true_accel = match cfg.sensors.accel {
            AccelSource::Ideal => Some(plant.accel(&state, &u_prev).map_err(wrap)?),
            AccelSource::BackwardDiff => None,
        };
        let meas = sensors.sample(&state, &cfg.base, true_accel);
        let delta_u = est.estimate(&meas.state(), &meas.accel()).map_err(wrap)?;
        let r: [AxisRef; 2] = [refs[0].eval(t), refs[1].eval(t)];
        let out = ctrl
            .step(
                &ControlInput {
                    t,
                    refs: r,
                    meas: &meas,
                    delta_u,
                },
                dt,
            )
            .map_err(wrap)?;
        let u = out.u;
        if !u.is_finite() {
            return Err(GimbalError::NonFinite { t });
        }
        stats.control_ticks += 1;

        let v = [
            motor_t2v(u.t_a, state.psi_a_dot, &params.motor_yaw),
            motor_t2v(u.t_e, state.theta_m_dot, &params.motor_pitch),
        ];
        let sol = plant.solve(&state, &u).map_err(wrap)?;
        let (td_a, td_e) = plant.disturbance.eval(&state);
        let re = sol.reactions;
        log.push(LogRow {
            t,
            ref_psi: r[0].pos,
            ref_theta: r[1].pos,
            ref_psi_dot: r[0].rate,
            ref_theta_dot: r[1].rate,
            ref_psi_ddot: r[0].accel,
            ref_theta_ddot: r[1].accel,
            psi_a: state.psi_a,
            theta_m: state.theta_m,
            psi_a_dot: state.psi_a_dot,
            theta_m_dot: state.theta_m_dot,
            u_d_a: out.u_d.t_a,
            u_d_e: out.u_d.t_e,
            u_a: u.t_a,
            u_e: u.t_e,
            du_a: delta_u.t_a,
            du_e: delta_u.t_e,
            td_a,
            td_e,
            f_am_x: re.f_am[0],
            f_am_y: re.f_am[1],
            f_am_z: re.f_am[2],
            f_ab_x: re.f_ab[0],
            f_ab_y: re.f_ab[1],
            f_ab_z: re.f_ab[2],
            m_amx: re.m_amx,
            m_amz: re.m_amz,
            m_abx: re.m_abx,
            m_aby: re.m_aby,
            enc_psi: meas.enc_psi,
            enc_theta: meas.enc_theta,
            gyro_x: meas.gyro[0],
            gyro_y: meas.gyro[1],
            gyro_z: meas.gyro[2],
            meas_psi_dot: meas.psi_a_dot,
            meas_theta_dot: meas.theta_m_dot,
            meas_psi_ddot: meas.psi_a_ddot,
            meas_theta_ddot: meas.theta_m_ddot,
            v_a: v[0],
            v_e: v[1],
        });
        if k == n {
            break;
        }

        for j in 0..cfg.substeps {
            let ts = t + j as f64 * h;
            let drive = match &mut lag {
                Some([la, le]) => {
                    let drive = TorqueCommand::new(la.torque(), le.torque());
                    la.step(v[0], state.psi_a_dot, h);
                    le.step(v[1], state.theta_m_dot, h);
                    drive
                }
                None => u,
            };
            state = plant
                .step_with(&state, ts, h, |_, _| drive)
                .map_err(|e| match e {
                    GimbalError::LimitHit { .. } => e,
                    e => e.at(ts),
                })?;
            stats.physics_steps += 1;
        }
        est.record(u);
        u_prev = u;
    }
    Ok(RunOutput { log, stats })
}
