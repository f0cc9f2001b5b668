//! Multilayer shallow-water solver on a 1D x–z section with a layer count
//! that may vary along x.

pub mod error;
pub mod harness;
pub mod linalg;
pub mod mesh;
pub mod operators;
pub mod physics;
pub mod state;
pub mod steppers;
pub mod transport;

pub use error::{ConfigError, Error, LayoutError, Result, SolverError};
pub use mesh::{Grid, LayerLayout, LayerRegion};
pub use physics::PhysicsParams;
pub use state::State;
pub use steppers::{Model, Scheme, StepReport};
