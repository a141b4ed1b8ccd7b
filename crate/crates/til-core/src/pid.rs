//! Tustin-discretized PID with a filtered derivative and conditional
//! anti-windup, in the ideal form `k_p (1 + 1/(s T_I) + s T_D/(1 + s T_D/N))`.

use crate::filter::{poly_mul, Tf};
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// The compensator tuning knobs searched by every tuner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidGains {
    /// Proportional gain.
    pub k_p: f64,
    /// Integral time constant [s]; `INFINITY` disables integral action.
    pub t_i: f64,
    /// Derivative time constant [s]; `0` disables derivative action.
    pub t_d: f64,
}

impl PidGains {
    pub fn new(k_p: f64, t_i: f64, t_d: f64) -> Self {
        PidGains { k_p, t_i, t_d }
    }

    pub fn zero() -> Self {
        PidGains { k_p: 0.0, t_i: f64::INFINITY, t_d: 0.0 }
    }

    pub fn validate(&self) -> bool {
        self.k_p.is_finite() && self.t_i > 0.0 && self.t_d >= 0.0 && self.t_d.is_finite()
    }
}

/// Discrete PID state.
#[derive(Debug, Clone)]
pub struct Pid {
    gains: PidGains,
    /// Derivative filter ratio N: the filter pole sits at `N / T_D`.
    n_ratio: f64,
    ts: f64,
    anti_windup: bool,
    integrator: f64,
    deriv: f64,
    prev_error: f64,
    primed: bool,
}

impl Pid {
    pub fn new(gains: PidGains, n_ratio: f64, ts: f64, anti_windup: bool) -> Self {
        debug_assert!(gains.validate());
        Pid { gains, n_ratio, ts, anti_windup, integrator: 0.0, deriv: 0.0, prev_error: 0.0, primed: false }
    }

    pub fn gains(&self) -> PidGains {
        self.gains
    }

    pub fn integrator(&self) -> f64 {
        self.integrator
    }

    pub fn reset(&mut self) {
        self.integrator = 0.0;
        self.deriv = 0.0;
        self.prev_error = 0.0;
        self.primed = false;
    }

    /// One controller period: error in, saturated output out. The limits are
    /// the instantaneous output bounds (from the slip-protection saturation);
    /// with anti-windup enabled the integrator freezes whenever the
    /// unsaturated output exceeds a limit and the error keeps pushing it out.
    pub fn step(&mut self, error: f64, limits: Option<(f64, f64)>) -> f64 {
        let g = self.gains;
        let e_prev = if self.primed { self.prev_error } else { error };

        // filtered derivative path (Tustin)
        let u_d = if g.t_d > 0.0 {
            let tau = g.t_d / self.n_ratio;
            ((2.0 * tau - self.ts) * self.deriv + 2.0 * g.k_p * g.t_d * (error - e_prev))
                / (2.0 * tau + self.ts)
        } else {
            0.0
        };

        // trapezoidal integrator increment
        let di = if g.t_i.is_finite() {
            g.k_p * self.ts / (2.0 * g.t_i) * (error + e_prev)
        } else {
            0.0
        };

        let unsat = g.k_p * error + (self.integrator + di) + u_d;
        let integrate = match (self.anti_windup, limits) {
            (true, Some((lo, hi))) => !((unsat > hi && error > 0.0) || (unsat < lo && error < 0.0)),
            _ => true,
        };
        if integrate {
            self.integrator += di;
        }
        let out = g.k_p * error + self.integrator + u_d;

        self.deriv = u_d;
        self.prev_error = error;
        self.primed = true;

        match limits {
            Some((lo, hi)) => out.clamp(lo, hi),
            None => out,
        }
    }

    /// The discrete transfer function realized by [`Pid::step`] (without
    /// saturation), for frequency-domain checks.
    pub fn transfer_function(&self) -> Tf {
        let g = self.gains;
        // P path over unit denominator
        let mut num = vec![g.k_p];
        let mut den = vec![1.0];
        if g.t_i.is_finite() {
            // + (k_p Ts / 2 T_I) (1 + z^-1)/(1 - z^-1)
            let ki = g.k_p * self.ts / (2.0 * g.t_i);
            let (n2, d2) = (vec![ki, ki], vec![1.0, -1.0]);
            num = add_poly(&poly_mul(&num, &d2), &poly_mul(&n2, &den));
            den = poly_mul(&den, &d2);
        }
        if g.t_d > 0.0 {
            let tau = g.t_d / self.n_ratio;
            let k = 2.0 * g.k_p * g.t_d;
            let (n3, d3) = (
                vec![k, -k],
                vec![2.0 * tau + self.ts, self.ts - 2.0 * tau],
            );
            num = add_poly(&poly_mul(&num, &d3), &poly_mul(&n3, &den));
            den = poly_mul(&den, &d3);
        }
        Tf::new(num, den)
    }
}

fn add_poly(p: &[f64], q: &[f64]) -> Vec<f64> {
    let n = p.len().max(q.len());
    let mut out = vec![0.0; n];
    for (i, &v) in p.iter().enumerate() {
        out[i] += v;
    }
    for (i, &v) in q.iter().enumerate() {
        out[i] += v;
    }
    out
}
