//! Spatial operators on the staggered grid.

pub mod advection;
pub mod boundary;
pub mod flux;
pub mod momentum;
pub mod transfer;
pub mod vertical;

pub use advection::{advection_term, advection_terms};
pub use boundary::{apply_boundary_conditions, BoundaryCondition, BoundaryConditions, Forcing};
pub use flux::{edge_depths, layer_fluxes, upwind_height};
pub use momentum::{nonstiff_terms, stiff_terms, FrozenCoefficients};
pub use transfer::{mass_transfer_center, mass_transfer_centers, mass_transfer_edge, mass_transfer_edges};
pub use vertical::{recover_vertical_velocity, ColumnVelocity};
