//! Disturbance-torque estimation and least-squares identification.

pub mod dataset;
pub mod lsq;
pub mod regressor;

pub use dataset::{
    collect_dataset, DatasetMeta, DatasetOptions, DisturbanceDataset, DisturbanceSample,
};
pub use lsq::{
    build_regressor, cross_validate, fit, max_relative_disagreement, solve_ls, CrossReport,
    FitResult, LsDiagnostics, LsSolution,
};
