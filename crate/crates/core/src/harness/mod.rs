//! Paper scenarios, run loop, error diagnostics and file output.

pub mod config;
pub mod diagnostics;
pub mod output;
pub mod run;
pub mod scenario;

pub use config::{load_config, parse_config, parse_layers, parse_snapshots};
pub use diagnostics::{compute_errors, convergence_order, crest_position, ErrorReport};
pub use output::{snapshot_csv, Metrics};
pub use run::{
    reference_config, reference_snapshots, resolve_spin_up, run, simulate, simulate_with, spin_up_profile, RunOutput,
    Simulation,
};
pub use scenario::{build_scenario, Bathymetry, GridSpec, InitialCondition, ScenarioConfig, SpinUp, SCENARIOS};
