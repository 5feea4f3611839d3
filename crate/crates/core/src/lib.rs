//! Two-axis yaw-pitch gimbal: multibody dynamics, disturbance identification
//! and learned torque compensation.

pub mod control;
pub mod dynamics;
pub mod error;
pub mod ident;
pub mod io;
pub mod kinematics;
pub mod linalg;
pub mod mlp;
pub mod params;
pub mod plant;
pub mod runner;

pub use error::{GimbalError, Result};
