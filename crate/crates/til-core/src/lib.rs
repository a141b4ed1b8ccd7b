//! Twin-in-the-loop yaw-rate control toolkit.
//!
//! The crate collects everything that runs *inside* a control period and
//! everything a tuner needs, with no IO attached:
//!
//! - [`dynamics`]: nonlinear single-track vehicle with a simplified Pacejka
//!   tire, steer-by-wire actuator, plant perturbations and noisy sensors,
//!   plus the per-step linearization / discrete model used by the MPC;
//! - [`refgen`]: driver steer request to yaw-rate reference (static map and
//!   dynamic filter);
//! - [`qp`] and [`mpc`]: a dense primal active-set QP solver and the
//!   single-shooting yaw-rate MPC built on top of it;
//! - [`pid`] and [`til`]: the mixed yaw-rate/sideslip compensator and the
//!   twin-in-the-loop simulation it closes;
//! - [`smgo`], [`gp`]/[`cbo`], [`vrft`]: the three tuning engines
//!   (set-membership global optimization, constrained Bayesian optimization,
//!   virtual reference feedback tuning).
//!
//! Everything here is deterministic given the caller-supplied RNG streams;
//! wall clocks, threads, files and CLIs live in the companion `til-lab`
//! crate. The crate is `no_std`-compatible (`alloc` required) when built
//! without the `std` feature.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cbo;
pub mod dynamics;
pub mod filter;
pub mod gp;
pub mod linalg;
pub mod mpc;
pub mod pid;
pub mod qp;
pub mod refgen;
pub mod smgo;
pub mod til;
pub mod tuning;
pub mod vrft;

pub use dynamics::{
    ActuatorParams, LtiModel, Measurement, PlantPerturbation, TireParams, VehicleParams,
    VehicleState,
};
pub use pid::PidGains;
pub use tuning::SearchBox;
