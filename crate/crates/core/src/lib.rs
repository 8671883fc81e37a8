//! Optimal minimax step-function fitting for weighted points.
//!
//! [`kstep::k_step`] fits a `k`-step function minimizing the largest weighted
//! vertical error in linear time. The [`oracle`] module holds slow, simple
//! reference solvers used to cross-check it.

pub mod anchored;
mod engine;
pub mod error;
pub mod generate;
pub mod geom;
pub mod kstep;
pub mod one_center;
pub mod oracle;
pub mod scalar;

pub use anchored::{anchored_j_step, doubly_anchored_two_step, AnchorSpec, SplitSolution};
pub use engine::{EngineStats, PruneRecord};
pub use error::FitError;
pub use geom::{CostModel, Segment, StepFunction, WeightedPoint};
pub use kstep::{feasibility_test, k_step, Diagnostics, FitReport};
pub use one_center::weighted_one_center;
pub use scalar::Scalar;

pub type Point = WeightedPoint<f64>;
pub type Fit = StepFunction<f64>;
