//! Model and simulator for a two-tier downlink cellular network whose
//! small cells wirelessly recharge user batteries, pulling depleted users
//! toward their charging rims.
//!
//! The crate has two independent routes to every headline quantity:
//!
//! * [`analytic`] evaluates the closed-form association probabilities,
//!   battery-chain steady state, cell-load distributions, and rate
//!   coverage, building on the numerical kernels in [`numerics`];
//! * [`sim`] realizes the same network slot by slot (Poisson deployments,
//!   spatial attraction, Rayleigh/SIR, charging bands) and estimates each
//!   quantity empirically.
//!
//! [`optimizer`] searches the feasible charging-power range for the
//! rate-coverage maximum, subject to the safety and cell-geometry caps.

pub mod analytic;
pub mod numerics;
pub mod optimizer;
pub mod params;
pub mod sim;
