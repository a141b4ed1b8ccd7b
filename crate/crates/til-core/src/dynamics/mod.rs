//! Nonlinear single-track vehicle simulation: tire and load models, the
//! steer-by-wire actuator, plant perturbations for the "physical vehicle",
//! noisy sensors, and the per-step linearization/discrete model consumed by
//! the MPC.

mod model;
mod params;
mod sensors;
mod tire;
mod vehicle;

pub use model::{build_discrete_model, LtiModel};
pub use params::{
    apply_perturbation, ActuatorParams, NoiseConfig, PlantPerturbation, TireParams, VehicleParams,
};
pub use sensors::{measure, Measurement, SensorNoise};
pub use tire::{axle_slip_angles, lateral_tire_force, linearize_tire, vertical_loads, LinearizedTire};
pub use vehicle::{steady_state, vehicle_step, Plant, VehicleState};

/// Errors from the plant model family.
#[derive(Debug, Clone, PartialEq)]
pub enum DynamicsError {
    /// The single-track model is singular at `v_x <= 0`.
    SpeedSingularity { v_x: f64 },
    /// Tire slip angle left the `|alpha| < pi/2` domain of the force law.
    SlipOutOfRange { alpha: f64 },
    /// A mass layout moved the center of mass outside the wheelbase.
    CenterOfMassOutsideWheelbase { l_f: f64, l_r: f64 },
    /// Steady-state solve did not converge.
    NoSteadyState { steer: f64, v_x: f64 },
    /// A state stopped being finite (diverged simulation).
    NonFiniteState,
}

impl core::fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DynamicsError::SpeedSingularity { v_x } => {
                write!(f, "single-track model singular at v_x = {v_x} m/s")
            }
            DynamicsError::SlipOutOfRange { alpha } => {
                write!(f, "tire slip angle {alpha} rad outside (-pi/2, pi/2)")
            }
            DynamicsError::CenterOfMassOutsideWheelbase { l_f, l_r } => {
                write!(f, "perturbed center of mass outside wheelbase (L_f = {l_f}, L_r = {l_r})")
            }
            DynamicsError::NoSteadyState { steer, v_x } => {
                write!(f, "no steady state found for steer = {steer} rad at v_x = {v_x} m/s")
            }
            DynamicsError::NonFiniteState => write!(f, "simulation state is not finite"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for DynamicsError {}
