//! Driver steer request to yaw-rate reference: a speed-dependent static map
//! fitted on the twin's steady-state behavior (saturated at the per-speed
//! maximum), followed by a unit-gain two-pole filter for dynamic feasibility.

use alloc::vec;
use alloc::vec::Vec;

use crate::dynamics::{steady_state, DynamicsError, VehicleParams};
use crate::filter::{lowpass2, FilterState, Tf};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// Steady-state yaw rate table over a `(speed, steer)` grid. Stored for
/// non-negative steer only; odd symmetry supplies the other half.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticYawMap {
    /// Strictly increasing speeds [m/s].
    pub speeds: Vec<f64>,
    /// Strictly increasing steer angles [rad], starting at 0.
    pub steers: Vec<f64>,
    /// `table[i][j]` = yaw rate [rad/s] at `speeds[i]`, `steers[j]`,
    /// clipped at the per-speed maximum.
    pub table: Vec<Vec<f64>>,
}

impl StaticYawMap {
    /// Build the map by solving the twin's constant-steer equilibrium on
    /// every grid node, warm-starting along the steer sweep, and saturating
    /// each speed row at its running maximum.
    pub fn build(
        params: &VehicleParams,
        speeds: &[f64],
        steers: &[f64],
    ) -> Result<Self, DynamicsError> {
        assert!(speeds.windows(2).all(|w| w[0] < w[1]), "speed grid must increase");
        assert!(steers.windows(2).all(|w| w[0] < w[1]), "steer grid must increase");
        assert!(speeds.iter().all(|&v| v > 0.0));
        assert!(steers[0] >= 0.0, "store the non-negative half; symmetry covers the rest");
        let mut table = Vec::with_capacity(speeds.len());
        for &v in speeds {
            let mut row = Vec::with_capacity(steers.len());
            let mut guess = (0.0, 0.0);
            let mut running_max = 0.0_f64;
            for &s in steers {
                let (beta, r) = steady_state(params, s, v, Some(guess))?;
                guess = (beta, r);
                running_max = running_max.max(r);
                row.push(running_max);
            }
            table.push(row);
        }
        Ok(StaticYawMap { speeds: speeds.to_vec(), steers: steers.to_vec(), table })
    }

    /// Bilinear lookup with odd symmetry in steer; speed and steer are
    /// clamped to the grid hull.
    pub fn lookup(&self, steer: f64, v_x: f64) -> f64 {
        let sign = if steer < 0.0 { -1.0 } else { 1.0 };
        let s = steer.abs();
        let (i0, i1, tv) = bracket(&self.speeds, v_x);
        let (j0, j1, ts) = bracket(&self.steers, s);
        let r00 = self.table[i0][j0];
        let r01 = self.table[i0][j1];
        let r10 = self.table[i1][j0];
        let r11 = self.table[i1][j1];
        let r0 = r00 + (r01 - r00) * ts;
        let r1 = r10 + (r11 - r10) * ts;
        sign * (r0 + (r1 - r0) * tv)
    }

    /// Largest attainable yaw rate at a speed (for saturation-related
    /// diagnostics).
    pub fn max_yaw_rate(&self, v_x: f64) -> f64 {
        let (i0, i1, tv) = bracket(&self.speeds, v_x);
        let m0 = *self.table[i0].last().unwrap();
        let m1 = *self.table[i1].last().unwrap();
        m0 + (m1 - m0) * tv
    }
}

fn bracket(grid: &[f64], x: f64) -> (usize, usize, f64) {
    if x <= grid[0] {
        return (0, 0, 0.0);
    }
    if x >= *grid.last().unwrap() {
        let n = grid.len() - 1;
        return (n, n, 0.0);
    }
    let mut i = grid.partition_point(|&g| g <= x);
    i = i.clamp(1, grid.len() - 1);
    let (a, b) = (grid[i - 1], grid[i]);
    (i - 1, i, (x - a) / (b - a))
}

/// Static map output shaped by the two-pole unit-gain reference filter.
#[derive(Debug, Clone)]
pub struct RefFilter {
    state: FilterState,
    tf: Tf,
}

impl RefFilter {
    /// `cutoff_hz` places both poles; Tustin with prewarping so the discrete
    /// magnitude at the cutoff keeps the two-coincident-pole value (-6.02 dB).
    pub fn new(cutoff_hz: f64, ts: f64) -> Self {
        let tf = lowpass2(cutoff_hz, ts, true);
        RefFilter { state: FilterState::new(tf.clone()), tf }
    }

    pub fn transfer_function(&self) -> &Tf {
        &self.tf
    }

    pub fn reset(&mut self) {
        self.state.reset();
    }

    pub fn step(&mut self, r_static: f64) -> f64 {
        self.state.step(r_static)
    }
}

/// Complete reference generator.
#[derive(Debug, Clone)]
pub struct RefGen {
    pub map: StaticYawMap,
    pub filter: RefFilter,
}

impl RefGen {
    pub fn new(map: StaticYawMap, cutoff_hz: f64, ts: f64) -> Self {
        RefGen { map, filter: RefFilter::new(cutoff_hz, ts) }
    }

    pub fn reset(&mut self) {
        self.filter.reset();
    }

    /// One control period: steer request and current speed in, dynamically
    /// feasible yaw-rate reference out.
    pub fn step(&mut self, s_ref: f64, v_x: f64) -> f64 {
        let r_static = self.map.lookup(s_ref, v_x);
        self.filter.step(r_static)
    }
}
