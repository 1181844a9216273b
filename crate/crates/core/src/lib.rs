//! Robust control barrier function safety filters for spacecraft landing
//! and docking under bounded matched and unmatched disturbances.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`, which the scenario
//! runner, configuration and CLI use.

pub mod barrier;
pub mod config;
pub mod controller;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod presets;
pub mod qp;
pub mod scalar;
pub mod sim;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{abssq, abssq_inv, Scalar};

pub type BarrierSpecF64 = barrier::BarrierSpec<f64>;
pub type BarrierSpecF32 = barrier::BarrierSpec<f32>;
pub type PotentialF64 = barrier::Potential<f64>;
pub type ClassKF64 = barrier::ClassK<f64>;
pub type DisturbanceBoundsF64 = barrier::DisturbanceBounds<f64>;
pub type CeresModelF64 = dynamics::CeresModel<f64>;
pub type CeresModelF32 = dynamics::CeresModel<f32>;
pub type HcwModelF64 = dynamics::HcwModel<f64>;
pub type HcwModelF32 = dynamics::HcwModel<f32>;
pub type DoubleIntegratorF64 = dynamics::DoubleIntegrator<f64>;
pub type DisturbancePolicyF64 = dynamics::DisturbancePolicy<f64>;
pub type QpProblemF64 = qp::QpProblem<f64>;
pub type QpProblemF32 = qp::QpProblem<f32>;
pub type DockingControllerConfigF64 = controller::DockingControllerConfig<f64>;
