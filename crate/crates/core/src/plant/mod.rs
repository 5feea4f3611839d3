//! The simulated "real" plant: disturbed forward dynamics, motors and sensors.

pub mod disturbance;
pub mod integrator;
pub mod log;
pub mod motor;
pub mod sensors;
mod sim;

pub use disturbance::{disturbance_eval, DisturbanceCoefficients, DisturbanceModel};
pub use integrator::rk4_step;
pub use log::{LogRow, SimulationLog};
pub use motor::{motor_t2v, motor_v2t, ElectricalLag};
pub use sensors::{
    backward_diff, lowpass, sense, AccelSource, AzimuthRateSource, BackwardDiff, Lowpass,
    Measurement, SensorChain, SensorConfig,
};
pub use sim::{step, Plant, MAX_DT};
