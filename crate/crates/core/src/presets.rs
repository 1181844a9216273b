//! Barrier constructions for the two reference scenarios.

use crate::barrier::{BarrierSpec, ClassK, ContactObjective, ContactTolerances, Potential};
use crate::controller::{DockingControllerConfig, DockingSpecs};
use crate::dynamics::{CeresModel, DoubleIntegrator, HcwModel, VelocityLimit};
use crate::error::Result;
use crate::scalar::Scalar;

pub const CERES_GAMMA1: f64 = 0.1;
pub const CERES_GAMMA2: f64 = 1.5;
/// Published landing gain (the solved value rounds to it).
pub const CERES_GAIN: f64 = 0.355;
pub const DOCKING_GAMMA1: f64 = 0.07;
pub const DOCKING_GAMMA2: f64 = 0.12;

pub fn ceres_tolerances<T: Scalar>(gamma1: T, gamma2: T) -> ContactTolerances<T> {
    ContactTolerances { gamma1, gamma2, objective: ContactObjective::Landing }
}

pub fn docking_tolerances<T: Scalar>(gamma1: T, gamma2: T) -> ContactTolerances<T> {
    ContactTolerances { gamma1, gamma2, objective: ContactObjective::Docking }
}

/// `Φ(λ) = μ/(ρ−λ) + (w_u,max − ū)·λ`: gravity potential plus the braking
/// authority left after the worst matched disturbance.
pub fn ceres_potential<T: Scalar>(model: &CeresModel<T>) -> Result<Potential<T>> {
    Potential::ceres_gravity(model.mu, model.radius, model.bounds.w_u_max - model.input_bound)
}

/// Landing barrier with the reference tolerances.
pub fn ceres_h1<T: Scalar>(model: &CeresModel<T>, gain: T) -> Result<BarrierSpec<T>> {
    ceres_h1_with(model, ceres_tolerances(T::lit(CERES_GAMMA1), T::lit(CERES_GAMMA2)), gain)
}

pub fn ceres_h1_with<T: Scalar>(
    model: &CeresModel<T>,
    tolerances: ContactTolerances<T>,
    gain: T,
) -> Result<BarrierSpec<T>> {
    BarrierSpec::h1(model.altitude_output(), ceres_potential(model)?, tolerances, ClassK::linear(gain)?, T::one())
}

/// Docking barriers with the reference tolerances.
pub fn docking_specs<T: Scalar>(config: &DockingControllerConfig<T>, model: &HcwModel<T>) -> Result<DockingSpecs<T>> {
    docking_specs_with(config, model, docking_tolerances(T::lit(DOCKING_GAMMA1), T::lit(DOCKING_GAMMA2)))
}

pub fn docking_specs_with<T: Scalar>(
    config: &DockingControllerConfig<T>,
    model: &HcwModel<T>,
    tolerances: ContactTolerances<T>,
) -> Result<DockingSpecs<T>> {
    config.validate()?;
    let family = model.family();
    let lateral = Potential::linear(-config.u0)?;
    Ok(DockingSpecs {
        h1: BarrierSpec::h1(
            family.axial,
            Potential::linear(-config.u1)?,
            tolerances,
            ClassK::linear(config.k1)?,
            T::one(),
        )?,
        h0_right: BarrierSpec::h0(family.right, lateral, ClassK::linear(config.k0)?, T::one())?,
        h0_left: BarrierSpec::h0(family.left, lateral, ClassK::linear(config.k0)?, T::one())?,
        velocity: VelocityLimit { max_speed: model.max_speed, alpha: ClassK::linear(config.kv)? },
    })
}

/// The docking `H₁` restricted to the approach axis.
pub fn axis_h1<T: Scalar>(
    config: &DockingControllerConfig<T>,
    model: &DoubleIntegrator<T>,
    tolerances: ContactTolerances<T>,
) -> Result<BarrierSpec<T>> {
    BarrierSpec::h1(
        model.position_output(),
        Potential::linear(-config.u1)?,
        tolerances,
        ClassK::linear(config.k1)?,
        T::one(),
    )
}

/// Approach-axis model with the docking thrust and disturbance levels.
pub fn docking_axis<T: Scalar>(hcw: &HcwModel<T>) -> DoubleIntegrator<T> {
    DoubleIntegrator::new(hcw.input_bound, hcw.bounds)
}
