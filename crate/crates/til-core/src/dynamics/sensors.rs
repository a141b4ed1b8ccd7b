use rand::Rng;
use rand_distr::StandardNormal;

use super::{NoiseConfig, VehicleState};
use crate::filter::{lowpass1, FilterState};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// What the feedback controllers see at one sample instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    /// Yaw rate [rad/s], possibly noisy.
    pub r: f64,
    /// Sideslip estimate [rad], possibly noisy.
    pub beta: f64,
    /// Actuated steer angle [rad].
    pub s_act: f64,
    /// Longitudinal speed [m/s].
    pub v_x: f64,
    /// Longitudinal acceleration [m/s^2].
    pub a_x: f64,
}

impl Measurement {
    pub fn exact(state: &VehicleState) -> Self {
        Measurement {
            r: state.r,
            beta: state.beta,
            s_act: state.s_act,
            v_x: state.v_x,
            a_x: state.a_x,
        }
    }
}

/// Stateful sensor noise generator: white yaw-rate noise plus low-pass
/// filtered sideslip noise whose *post-filter* standard deviation matches the
/// configured value (the pre-filter variance is calibrated from the filter's
/// white-noise energy gain).
#[derive(Debug, Clone)]
pub struct SensorNoise<R: Rng> {
    config: NoiseConfig,
    beta_filter: FilterState,
    beta_prescale: f64,
    rng: R,
}

impl<R: Rng> SensorNoise<R> {
    pub fn new(config: NoiseConfig, sample_time: f64, rng: R) -> Self {
        let tf = lowpass1(config.sideslip_cutoff_hz, sample_time, false);
        let energy = tf.noise_energy();
        SensorNoise {
            config,
            beta_filter: FilterState::new(tf),
            beta_prescale: config.sigma_sideslip / energy.sqrt(),
            rng,
        }
    }

    /// Corrupt a state projection with the configured noise. With all sigmas
    /// zero this returns the exact projection bit-for-bit.
    pub fn measure(&mut self, state: &VehicleState) -> Measurement {
        let mut m = Measurement::exact(state);
        let wr: f64 = self.rng.sample(StandardNormal);
        let wb: f64 = self.rng.sample(StandardNormal);
        m.r += self.config.sigma_yaw_rate * wr;
        m.beta += self.beta_filter.step(self.beta_prescale * wb);
        m
    }
}

/// Free-function form of [`SensorNoise::measure`].
pub fn measure<R: Rng>(state: &VehicleState, sensors: &mut SensorNoise<R>) -> Measurement {
    sensors.measure(state)
}
