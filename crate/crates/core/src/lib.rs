//! Cost-sensitive boosting: AdaBoost and its asymmetric variants over
//! decision stumps, with the numerics and diagnostics needed to compare them.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN

pub mod boosters;
pub mod datagen;
pub mod domain;
pub mod error;
pub mod metrics;
pub mod numerics;
pub mod par;
pub mod persist;
pub mod predictors;
pub mod sweep;
pub mod weaklearn;

pub use boosters::{train, Algorithm, TrainConfig, TrainedModel};
pub use domain::{CostSpec, Dataset, Ensemble, Prediction, RoundTrace, Stump, Voting, WeightState};
pub use error::{Error, Result};
pub use par::Parallelism;
pub use weaklearn::{build_pool, StumpPool};
