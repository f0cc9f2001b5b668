//! Passive tracer transport and bed evolution.

pub mod sediment;
pub mod tracer;

pub use sediment::{exner_step_imex, exner_step_theta, grass_flux};
pub use tracer::{interface_tracer_value, tracer_outflow, tracer_step_theta};
