//! Partial least squares regression (PLS) and its generalized-linear
//! extension (PLSGLR), with criteria for choosing the number of components.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod criteria;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod glm;
pub mod linalg;
pub mod pls;
pub mod resampling;
pub mod rng;
pub mod simulation;
pub mod special;

pub use criteria::{select, CriterionKind, CriterionResult, CriterionSpec, Decision, TraceRecord};
pub use data::{center_scale, Dataset, Family, ScalingParams, Standardized};
pub use error::{Error, Result};
pub use evaluation::{missclassed_count, nmse, partition_count, welch_t_test, RobustnessMode};
pub use linalg::Matrix;
pub use pls::{fit_pls, fit_plsglr, PlsModel, PlsPath};
pub use resampling::{bca_interval, BcaInterval, ResamplePlan, Sidedness};
pub use simulation::{simulate_univ_yx, GridRow, GridSpec, SimConfig, SimulatedDataset};
