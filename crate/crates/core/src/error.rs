use thiserror::Error;

/// Invalid run configuration: bad grid extents, unknown scenario names,
/// malformed config files or CLI overrides.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("invalid boundary conditions: {0}")]
    Boundary(String),
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: String, reason: String },
    #[error("failed to parse configuration: {0}")]
    Parse(String),
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LayoutError {
    #[error("edge {edge} (x = {x}): layer fractions sum to {sum}, expected 1")]
    FractionSum { edge: usize, x: f64, sum: f64 },
    #[error("edge {edge} (x = {x}): layer fraction {value} is not positive")]
    NonPositiveFraction { edge: usize, x: f64, value: f64 },
    #[error("edge {edge} (x = {x}): not covered by any layer region")]
    Uncovered { edge: usize, x: f64 },
    #[error("cell {cell}: coarse layers at edge {coarse_edge} are not unions of fine layers at edge {fine_edge}")]
    Incompatible {
        cell: usize,
        coarse_edge: usize,
        fine_edge: usize,
    },
    #[error("cell {cell}: layer count changes across the cell but edge {edge} does not repeat its neighbour's count")]
    Adjacency { cell: usize, edge: usize },
    #[error("layout has {layout} edges but the grid has {grid}")]
    Shape { layout: usize, grid: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClosureError {
    #[error("reference height {dz_r} must lie strictly between roughness length {dz0} and depth {h}")]
    ReferenceHeight { dz_r: f64, dz0: f64, h: f64 },
    #[error("partial height {height} does not exceed roughness length {dz0}")]
    PartialHeight { height: f64, dz0: f64 },
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("water depth {depth} below minimum at cell {cell}")]
    Drying { cell: usize, depth: f64 },
    #[error("singular tridiagonal system: pivot {pivot} at row {row}")]
    Singular { row: usize, pivot: f64 },
    #[error("closure failed at edge {edge}: {source}")]
    Closure {
        edge: usize,
        #[source]
        source: ClosureError,
    },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Top-level error returned by runs and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("solver aborted at step {step} (t = {time} s): {source}")]
    Solver {
        step: usize,
        time: f64,
        #[source]
        source: SolverError,
    },
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl From<LayoutError> for Error {
    fn from(e: LayoutError) -> Self {
        Error::Config(ConfigError::Layout(e))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
