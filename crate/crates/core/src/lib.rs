pub mod autodiff;
pub mod dynamics;
pub mod error;
pub mod frenet;
pub mod geometry;
pub mod integrate;
pub mod sampling;
pub mod varcalc;
pub mod worldline;

pub use error::{Error, Result};
pub use geometry::{MetricSpace, Variance, Vector};
