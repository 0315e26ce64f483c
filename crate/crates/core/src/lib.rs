//! Undersampling ensemble learning for feature selection and classification
//! on imbalanced tabular data with missing values.
//!
//! The pipeline filters a [`Dataset`](data::Dataset) by completion rate,
//! imputes the remaining gaps ([`impute`]), trains one CART tree per balanced
//! undersampled "way" ([`ensemble`]), aggregates the per-way feature rankings
//! or occurrence sets into a single selection ([`aggregate`]) and evaluates
//! the selection by nested cross-validation with majority voting.
//!
//! See `examples/` for one runnable program per capability.

pub mod aggregate;
pub mod cart;
pub mod data;
pub mod ensemble;
pub mod error;
pub mod impute;
pub mod metrics;
pub mod pipeline;
pub mod rfe;
pub mod seed;
pub mod synth;

pub use aggregate::{AggregateScores, AggregationMethod, EntropyDelta, VarianceWeightParams};
pub use cart::{DecisionTree, TreeParams};
pub use data::{ColumnKind, Dataset, Matrix};
pub use ensemble::{EnsembleConfig, WayModel};
pub use error::{Error, Result};
pub use impute::ImputationMethod;
pub use metrics::EvalReport;
pub use pipeline::PipelineConfig;
pub use rfe::RankList;
pub use synth::{GroundTruth, SyntheticSpec};
