pub mod cli;
pub mod data;
pub mod error;
pub mod estimators;
pub mod kernel;
pub mod models;
pub mod quadrature;
pub mod reconstruction;
pub mod robustness;
pub mod simharness;
pub mod weak;

pub use data::Dataset;
pub use error::{Error, Result};
pub use kernel::{GaussianKernel, Kernel};
pub use models::{ContaminatedModel, DataModel, Family, ParametricModel};
