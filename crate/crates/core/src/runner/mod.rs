//! References, scenario execution, metrics and batch comparisons.

pub mod bandwidth;
pub mod batch;
pub mod config;
pub mod metrics;
pub mod pipeline;
pub mod reference;
pub mod scenario;

pub use bandwidth::{bandwidth_from_chirp, bandwidth_from_series};
pub use batch::{
    compare, evaluate_job, sweep, BatchResult, CompareRow, CompareTable, Job, SweepSpec,
};
pub use config::{ControllerConfig, InitialCondition, ScenarioConfig, CONFIG_VERSION};
pub use metrics::{metrics, percent_decrease, Axis, AxisMetrics, MetricsReport};
pub use pipeline::{
    collect_training_data, history_csv, identify, load_identify, train_compensator, with_sweep,
    IdentifyConfig, ScenarioSource, TrainConfig, TrainOutput,
};
pub use reference::{
    gen_reference, generate_training_sweep, Reference, ReferenceSpec, SweepConfig,
};
pub use scenario::{
    build_controller, nn_controller, run_scenario, run_with, RunOutput, RuntimeStats,
};
