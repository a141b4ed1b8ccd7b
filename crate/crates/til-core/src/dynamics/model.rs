use super::sensors::Measurement;
use super::tire::{axle_slip_angles, linearize_tire, vertical_loads};
use super::{DynamicsError, VehicleParams};

/// Discrete-time local model `x_{k+1} = A x_k + B u_k + E d`, `y = C x`,
/// with state `[beta, r, s_act]`, input `s_cmd` and the constant
/// linearization-offset disturbance `d`. Forward-Euler structure: the
/// off-diagonal terms all scale with the sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct LtiModel {
    pub a: [[f64; 3]; 3],
    pub b: [f64; 3],
    pub e: [[f64; 2]; 3],
    pub c: [f64; 3],
    pub d: [f64; 2],
    pub ts: f64,
    /// Speed frozen over the horizon [m/s]; the slip read-out row needs it.
    pub v_x: f64,
}

impl LtiModel {
    /// One-step propagation.
    pub fn step(&self, x: &[f64; 3], u: f64) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = self.a[i][0] * x[0] + self.a[i][1] * x[1] + self.a[i][2] * x[2]
                + self.b[i] * u
                + self.e[i][0] * self.d[0]
                + self.e[i][1] * self.d[1];
        }
        out
    }

    /// Front-slip read-out row: `alpha_f = row . x` at the frozen speed
    /// (the actuated steer is the third state).
    pub fn front_slip_row(&self, params: &VehicleParams) -> [f64; 3] {
        [1.0, params.dist_front / self.v_x, -1.0]
    }
}

/// Build the MPC's internal model from one measurement set, following the
/// per-step procedure: slips and loads from the measurement, tangent-line
/// tire linearization at the current operating point, then the discrete
/// matrices with the first-order actuator.
pub fn build_discrete_model(
    meas: &Measurement,
    beta_est: f64,
    params: &VehicleParams,
    actuator_bandwidth: f64,
    ts: f64,
) -> Result<LtiModel, DynamicsError> {
    let v_x = meas.v_x;
    if v_x <= 0.0 {
        return Err(DynamicsError::SpeedSingularity { v_x });
    }
    let (alpha_f, alpha_r) = axle_slip_angles(beta_est, meas.r, v_x, meas.s_act, params)?;
    let (fz_f, fz_r) = vertical_loads(v_x, meas.a_x, params);
    let front = linearize_tire(alpha_f, fz_f.max(0.0), &params.front_tire)?;
    let rear = linearize_tire(alpha_r, fz_r.max(0.0), &params.rear_tire)?;

    let (m, j) = (params.mass, params.yaw_inertia);
    let (lf, lr) = (params.dist_front, params.dist_rear);
    let (cf, cr) = (front.stiffness, rear.stiffness);
    let w = actuator_bandwidth;

    let a = [
        [
            1.0 - ts * (cf + cr) / (m * v_x),
            ts * ((-lf * cf + lr * cr - m * v_x * v_x) / (m * v_x * v_x)),
            ts * cf / (m * v_x),
        ],
        [
            ts * (-lf * cf + lr * cr) / j,
            1.0 - ts * (lf * lf * cf + lr * lr * cr) / (j * v_x),
            ts * cf * lf / j,
        ],
        [0.0, 0.0, 1.0 - ts * w],
    ];
    let b = [0.0, 0.0, ts * w];
    let e = [[ts, 0.0], [0.0, ts], [0.0, 0.0]];
    let c = [0.0, 1.0, 0.0];

    let off_f = front.force_at + cf * front.alpha_bar;
    let off_r = rear.force_at + cr * rear.alpha_bar;
    let d = [(off_f + off_r) / (m * v_x), (lf * off_f - lr * off_r) / j];

    Ok(LtiModel { a, b, e, c, d, ts, v_x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::sensors::Measurement;

    fn straight_measurement(v: f64) -> Measurement {
        Measurement { r: 0.0, beta: 0.0, s_act: 0.0, v_x: v, a_x: 0.0 }
    }

    #[test]
    fn actuator_diagonal_entry() {
        let p = VehicleParams::sports_car();
        let m = build_discrete_model(&straight_measurement(33.3), 0.0, &p, 33.8, 0.01).unwrap();
        assert!((m.a[2][2] - 0.662).abs() < 1e-12);
        assert_eq!(m.b, [0.0, 0.0, 0.01 * 33.8]);
        assert_eq!(m.c, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn zero_slip_first_row_matches_hand_expansion() {
        let p = VehicleParams::sports_car();
        let v = 30.0;
        let m = build_discrete_model(&straight_measurement(v), 0.0, &p, 33.8, 0.01).unwrap();
        let (fz_f, fz_r) = vertical_loads(v, 0.0, &p);
        let cf = fz_f * p.front_tire.stiffness_c;
        let cr = fz_r * p.rear_tire.stiffness_c;
        assert!((m.a[0][0] - (1.0 - 0.01 * (cf + cr) / (p.mass * v))).abs() < 1e-12);
        // zero-slip linearization: offset disturbance vanishes
        assert!(m.d[0].abs() < 1e-12 && m.d[1].abs() < 1e-12);
    }

    #[test]
    fn one_step_matches_forward_euler_of_linearized_ode() {
        let p = VehicleParams::sports_car();
        let meas = Measurement { r: 0.12, beta: 0.01, s_act: 0.015, v_x: 33.3, a_x: 0.4 };
        let ts = 0.01;
        let m = build_discrete_model(&meas, meas.beta, &p, 33.8, ts).unwrap();
        let x0 = [meas.beta, meas.r, meas.s_act];
        let u = 0.02;

        // explicit continuous linearized derivative at x0, then Euler
        let (alpha_f, alpha_r) =
            axle_slip_angles(meas.beta, meas.r, meas.v_x, meas.s_act, &p).unwrap();
        let (fz_f, fz_r) = vertical_loads(meas.v_x, meas.a_x, &p);
        let front = linearize_tire(alpha_f, fz_f, &p.front_tire).unwrap();
        let rear = linearize_tire(alpha_r, fz_r, &p.rear_tire).unwrap();
        let f_f = front.force(alpha_f);
        let f_r = rear.force(alpha_r);
        let beta_dot = (f_f + f_r) / (p.mass * meas.v_x) - meas.r;
        let r_dot = (p.dist_front * f_f - p.dist_rear * f_r) / p.yaw_inertia;
        let s_dot = 33.8 * (u - meas.s_act);
        let euler = [x0[0] + ts * beta_dot, x0[1] + ts * r_dot, x0[2] + ts * s_dot];

        let x1 = m.step(&x0, u);
        for i in 0..3 {
            assert!(
                (x1[i] - euler[i]).abs() < 1e-12,
                "component {i}: {} vs {}",
                x1[i],
                euler[i]
            );
        }
    }

    #[test]
    fn prediction_error_shrinks_quadratically() {
        // halve the sample time and the state perturbation: one-step error
        // against the nonlinear (first-order-actuator) model drops ~4x
        let p = VehicleParams::sports_car();
        let v = 33.3;
        let nonlinear_step = |x: &[f64; 3], u: f64, ts: f64| -> [f64; 3] {
            // RK4 on the same model class the LTI matrices discretize
            let deriv = |y: &[f64; 3]| -> [f64; 3] {
                let (af, ar) = axle_slip_angles(y[0], y[1], v, y[2], &p).unwrap();
                let (fz_f, fz_r) = vertical_loads(v, 0.0, &p);
                let f_f = crate::dynamics::lateral_tire_force(af, fz_f, &p.front_tire).unwrap();
                let f_r = crate::dynamics::lateral_tire_force(ar, fz_r, &p.rear_tire).unwrap();
                [
                    (f_f + f_r) / (p.mass * v) - y[1],
                    (p.dist_front * f_f - p.dist_rear * f_r) / p.yaw_inertia,
                    33.8 * (u - y[2]),
                ]
            };
            let n = 64; // fine inner steps: reference trajectory
            let h = ts / n as f64;
            let mut y = *x;
            for _ in 0..n {
                let k1 = deriv(&y);
                let y2 = [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1], y[2] + h / 2.0 * k1[2]];
                let k2 = deriv(&y2);
                let y3 = [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1], y[2] + h / 2.0 * k2[2]];
                let k3 = deriv(&y3);
                let y4 = [y[0] + h * k3[0], y[1] + h * k3[1], y[2] + h * k3[2]];
                let k4 = deriv(&y4);
                for i in 0..3 {
                    y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
            y
        };

        let err_at = |ts: f64, scale: f64| -> f64 {
            let meas = Measurement {
                r: 0.1 * scale,
                beta: 0.008 * scale,
                s_act: 0.012 * scale,
                v_x: v,
                a_x: 0.0,
            };
            let m = build_discrete_model(&meas, meas.beta, &p, 33.8, ts).unwrap();
            let x0 = [meas.beta, meas.r, meas.s_act];
            let u = meas.s_act + 0.004 * scale;
            let lin = m.step(&x0, u);
            let non = nonlinear_step(&x0, u, ts);
            (0..3).map(|i| (lin[i] - non[i]).abs()).fold(0.0, f64::max)
        };

        let e_full = err_at(0.01, 1.0);
        let e_half = err_at(0.005, 0.5);
        // O(ts^2) + O(|dx|^2): halving both shrinks the bound by ~4
        assert!(
            e_half < e_full / 2.5,
            "error did not shrink quadratically: {e_full} -> {e_half}"
        );
    }
}
