//! Multilayer perceptron disturbance compensator.

pub mod data;
pub mod model;
pub mod train;

pub use data::{build_training_set, FeatureOptions, TrainingSet};
pub use model::{forward, Activation, MlpModel, Normalization};
pub use train::{train_lm, HistoryEntry, Optimizer, TrainOptions};
