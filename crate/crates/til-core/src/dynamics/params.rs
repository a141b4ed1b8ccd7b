use alloc::vec::Vec;

use super::DynamicsError;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// Simplified Pacejka shape coefficients for one lumped axle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TireParams {
    pub shape_a: f64,
    pub shape_b: f64,
    pub stiffness_c: f64,
}

impl TireParams {
    pub fn validate(&self) -> bool {
        self.shape_a > 0.0 && self.shape_b > 0.0 && self.stiffness_c > 0.0
    }
}

/// Single-track vehicle constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleParams {
    /// Mass [kg].
    pub mass: f64,
    /// Yaw moment of inertia [kg m^2].
    pub yaw_inertia: f64,
    /// Center of mass to front axle [m].
    pub dist_front: f64,
    /// Center of mass to rear axle [m].
    pub dist_rear: f64,
    /// Aerodynamic downforce coefficients [kg/m].
    pub aero_front: f64,
    pub aero_rear: f64,
    /// Longitudinal load-transfer coefficient [kg].
    pub load_transfer: f64,
    /// Gravity [m/s^2].
    pub gravity: f64,
    pub front_tire: TireParams,
    pub rear_tire: TireParams,
}

impl VehicleParams {
    pub fn wheelbase(&self) -> f64 {
        self.dist_front + self.dist_rear
    }

    pub fn validate(&self) -> bool {
        self.mass > 0.0
            && self.yaw_inertia > 0.0
            && self.dist_front > 0.0
            && self.dist_rear > 0.0
            && self.aero_front > 0.0
            && self.aero_rear > 0.0
            && self.load_transfer > 0.0
            && self.gravity > 0.0
            && self.front_tire.validate()
            && self.rear_tire.validate()
    }

    /// High-performance two-seater constants used throughout the tests.
    pub fn sports_car() -> Self {
        VehicleParams {
            mass: 1729.1,
            yaw_inertia: 2482.7,
            dist_front: 1.48,
            dist_rear: 1.16,
            aero_front: 0.065,
            aero_rear: 0.221,
            load_transfer: 153.63,
            gravity: 9.81,
            front_tire: TireParams { shape_a: 10.72, shape_b: 1.51, stiffness_c: 20.08 },
            rear_tire: TireParams { shape_a: 19.75, shape_b: 0.75, stiffness_c: 28.69 },
        }
    }
}

/// Steer-by-wire actuator: third-order closed-loop transfer function plus
/// rate limiter and position saturation. The first-order bandwidth model is
/// what the MPC's internal model uses.
#[derive(Debug, Clone, PartialEq)]
pub struct ActuatorParams {
    /// Transfer-function numerator, ascending powers of `s`.
    pub tf_num: Vec<f64>,
    /// Transfer-function denominator, ascending powers of `s`.
    pub tf_den: Vec<f64>,
    /// Simplified first-order bandwidth [rad/s].
    pub bandwidth: f64,
    /// Steer rate limit [rad/s].
    pub rate_limit: f64,
    /// Steer position limit [rad].
    pub position_limit: f64,
}

impl ActuatorParams {
    pub fn validate(&self) -> bool {
        self.bandwidth > 0.0
            && self.rate_limit > 0.0
            && self.position_limit > 0.0
            && self.tf_den.len() == 4
            && self.tf_num.len() <= self.tf_den.len()
            && *self.tf_den.last().unwrap() != 0.0
    }

    /// Production steer-by-wire low-level loop.
    pub fn steer_by_wire() -> Self {
        ActuatorParams {
            tf_num: alloc::vec![9137.0, 1547.0, 58.34],
            tf_den: alloc::vec![9137.0, 1549.0, 64.55, 1.002],
            bandwidth: 33.8,
            rate_limit: 100.0_f64.to_radians(),
            position_limit: 20.0_f64.to_radians(),
        }
    }
}

/// Sensor noise of the physical vehicle. The sideslip channel mimics a state
/// estimator: low-pass filtered noise with a prescribed post-filter standard
/// deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    /// White yaw-rate noise std [rad/s].
    pub sigma_yaw_rate: f64,
    /// Post-filter sideslip noise std [rad].
    pub sigma_sideslip: f64,
    /// Low-pass cutoff of the sideslip noise [Hz].
    pub sideslip_cutoff_hz: f64,
}

impl NoiseConfig {
    pub fn noiseless() -> Self {
        NoiseConfig { sigma_yaw_rate: 0.0, sigma_sideslip: 0.0, sideslip_cutoff_hz: 5.0 }
    }
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig { sigma_yaw_rate: 0.006, sigma_sideslip: 0.0044, sideslip_cutoff_hz: 5.0 }
    }
}

/// What separates the "physical vehicle" from its twin: extra masses, a rear
/// cornering-stiffness error, tire relaxation and sensor noise.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantPerturbation {
    /// `(mass [kg], x ahead of the nominal CoM [m], y left of centerline [m])`.
    pub added_masses: Vec<(f64, f64, f64)>,
    /// Multiplies the rear tire stiffness coefficient, in `(0, 1]`.
    pub rear_stiffness_scale: f64,
    /// Tire relaxation length [m]; `0` disables the lateral-force lag.
    pub relaxation_length: f64,
    pub noise: NoiseConfig,
}

impl PlantPerturbation {
    pub fn none() -> Self {
        PlantPerturbation {
            added_masses: Vec::new(),
            rear_stiffness_scale: 1.0,
            relaxation_length: 0.0,
            noise: NoiseConfig::noiseless(),
        }
    }

    /// Passenger plus unbalanced front-trunk load, softened rear tires,
    /// relaxation lag and production-grade sensor noise.
    pub fn loaded_vehicle() -> Self {
        PlantPerturbation {
            added_masses: alloc::vec![(100.0, 0.0, -0.35), (70.0, 1.2, -0.5), (10.0, 1.2, 0.5)],
            rear_stiffness_scale: 0.85,
            relaxation_length: 0.3,
            noise: NoiseConfig::default(),
        }
    }

    pub fn validate(&self) -> bool {
        self.rear_stiffness_scale > 0.0
            && self.rear_stiffness_scale <= 1.0
            && self.relaxation_length >= 0.0
            && self.noise.sigma_yaw_rate >= 0.0
            && self.noise.sigma_sideslip >= 0.0
    }
}

/// Rebuild the vehicle constants after bolting the perturbation masses onto
/// the body: total mass, center of mass (hence axle distances), yaw inertia
/// (point masses, parallel axis) and the load-transfer coefficient all move.
pub fn apply_perturbation(
    params: &VehicleParams,
    pert: &PlantPerturbation,
) -> Result<VehicleParams, DynamicsError> {
    let mut p = *params;
    let added: f64 = pert.added_masses.iter().map(|m| m.0).sum();
    if added > 0.0 {
        let new_mass = params.mass + added;
        let shift_x: f64 =
            pert.added_masses.iter().map(|&(m, x, _)| m * x).sum::<f64>() / new_mass;
        let shift_y: f64 =
            pert.added_masses.iter().map(|&(m, _, y)| m * y).sum::<f64>() / new_mass;
        let l_f = params.dist_front - shift_x;
        let l_r = params.dist_rear + shift_x;
        if l_f <= 0.0 || l_r <= 0.0 {
            return Err(DynamicsError::CenterOfMassOutsideWheelbase { l_f, l_r });
        }
        let mut inertia = params.yaw_inertia + params.mass * (shift_x * shift_x + shift_y * shift_y);
        for &(m, x, y) in &pert.added_masses {
            let dx = x - shift_x;
            let dy = y - shift_y;
            inertia += m * (dx * dx + dy * dy);
        }
        p.mass = new_mass;
        p.dist_front = l_f;
        p.dist_rear = l_r;
        p.yaw_inertia = inertia;
        // CoM height assumed unchanged by the loads, so k_x scales with mass.
        p.load_transfer = params.load_transfer * new_mass / params.mass;
    }
    p.rear_tire.stiffness_c = params.rear_tire.stiffness_c * pert.rear_stiffness_scale;
    Ok(p)
}
