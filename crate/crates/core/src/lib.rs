//! Spatial adiabatic passage of a Bose–Einstein condensate across three
//! tunnel-coupled wells, in the three-mode mean-field approximation.
//!
//! Energies and tunneling rates are in units of ħω_x, times in units of
//! 1/ω_x, with ω_x the longitudinal trap frequency.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod model;
pub mod optimal_zone;
pub mod scalar;
pub mod selftest;
pub mod spectral;
pub mod sweeps;

pub use error::{Result, SapError};
pub use scalar::Real;

pub type SystemParamsF64 = model::SystemParams<f64>;
pub type PulseScheduleF64 = model::PulseSchedule<f64>;
pub type CouplingsF64 = model::Couplings<f64>;
pub type ModeStateF64 = model::ModeState<f64>;
pub type PhysicalParamsF64 = model::PhysicalParams<f64>;
pub type BiasProtocolF64 = dynamics::BiasProtocol<f64>;
pub type StepControlF64 = dynamics::StepControl<f64>;
pub type TrajectoryF64 = dynamics::Trajectory<f64>;
pub type SpectralSnapshotF64 = spectral::SpectralSnapshot<f64>;
pub type OzVerdictF64 = optimal_zone::OzVerdict<f64>;
pub type CrossingF64 = optimal_zone::Crossing<f64>;
pub type EfficiencyCurveF64 = sweeps::EfficiencyCurve<f64>;
pub type PlateauF64 = sweeps::Plateau<f64>;
pub type OzRasterF64 = sweeps::OzRaster<f64>;
