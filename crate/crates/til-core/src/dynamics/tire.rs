use super::{DynamicsError, TireParams, VehicleParams};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// Simplified Pacejka lateral force
/// `F_y = -(F_z C / (A B)) sin(B atan(A tan(alpha)))`.
///
/// Total on `|alpha| < pi/2`; the tangent blows up at the boundary.
pub fn lateral_tire_force(alpha: f64, f_z: f64, tire: &TireParams) -> Result<f64, DynamicsError> {
    if !(alpha.abs() < core::f64::consts::FRAC_PI_2) {
        return Err(DynamicsError::SlipOutOfRange { alpha });
    }
    debug_assert!(f_z >= 0.0, "vertical load must be non-negative");
    let TireParams { shape_a: a, shape_b: b, stiffness_c: c } = *tire;
    Ok(-(f_z * c / (a * b)) * (b * (a * alpha.tan()).atan()).sin())
}

/// Lumped-axle slip angles under the small-angle kinematics
/// `alpha_f = beta + L_f r / v_x - s_act`, `alpha_r = beta - L_r r / v_x`.
pub fn axle_slip_angles(
    beta: f64,
    r: f64,
    v_x: f64,
    s_act: f64,
    params: &VehicleParams,
) -> Result<(f64, f64), DynamicsError> {
    if v_x <= 0.0 {
        return Err(DynamicsError::SpeedSingularity { v_x });
    }
    let alpha_f = beta + params.dist_front * r / v_x - s_act;
    let alpha_r = beta - params.dist_rear * r / v_x;
    Ok((alpha_f, alpha_r))
}

/// Axle vertical loads: static weight split, aerodynamic downforce and
/// longitudinal load transfer. The transfer terms cancel in the sum.
pub fn vertical_loads(v_x: f64, a_x: f64, params: &VehicleParams) -> (f64, f64) {
    let l = params.wheelbase();
    let weight = params.mass * params.gravity;
    let f_front = params.dist_rear / l * weight + params.aero_front * v_x * v_x
        - params.load_transfer * a_x;
    let f_rear = params.dist_front / l * weight + params.aero_rear * v_x * v_x
        + params.load_transfer * a_x;
    (f_front, f_rear)
}

/// Tire force linearized at `(alpha_bar, f_z)`:
/// `F_y(alpha) ~ force_at - stiffness * (alpha - alpha_bar)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearizedTire {
    /// Force at the linearization point [N].
    pub force_at: f64,
    /// Local cornering stiffness `-dF_y/dalpha` at the point [N/rad].
    pub stiffness: f64,
    /// Linearization slip angle [rad].
    pub alpha_bar: f64,
    /// Vertical load at the point [N].
    pub f_z: f64,
}

impl LinearizedTire {
    /// First-order force prediction at `alpha`.
    pub fn force(&self, alpha: f64) -> f64 {
        self.force_at - self.stiffness * (alpha - self.alpha_bar)
    }
}

/// Exact tangent-line linearization of [`lateral_tire_force`]. The stiffness
/// is the analytic derivative, so a finite-difference check on the force law
/// reproduces it to first order; it changes sign past the force peak.
pub fn linearize_tire(
    alpha_bar: f64,
    f_z: f64,
    tire: &TireParams,
) -> Result<LinearizedTire, DynamicsError> {
    let force_at = lateral_tire_force(alpha_bar, f_z, tire)?;
    let TireParams { shape_a: a, shape_b: b, stiffness_c: c } = *tire;
    let t = alpha_bar.tan();
    let sec2 = 1.0 + t * t;
    let stiffness = f_z * c * (b * (a * t).atan()).cos() * sec2 / (1.0 + a * a * t * t);
    Ok(LinearizedTire { force_at, stiffness, alpha_bar, f_z })
}
