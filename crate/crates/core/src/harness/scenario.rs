use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::mesh::{Grid, LayerLayout, LayerRegion};
use crate::operators::boundary::{BoundaryCondition, BoundaryConditions, Forcing};
use crate::physics::PhysicsParams;
use crate::state::State;
use crate::steppers::{Model, Scheme};

pub const SCENARIOS: [&str; 4] = ["free_oscillations", "subcritical_peak", "tidal_forcing", "sediment_dune"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_start: f64,
    pub x_end: f64,
    pub cells: usize,
}

/// Bed elevation profiles used by the scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Bathymetry {
    Flat {
        level: f64,
    },
    /// `amplitude * exp(-(x - center)^2 / sigma^2)`
    Gaussian {
        amplitude: f64,
        center: f64,
        sigma: f64,
    },
    /// `base + slope x`, plus `amplitude cos^2(pi x / (2 half_width))` for
    /// `|x| < half_width`.
    CosinePeak {
        base: f64,
        slope: f64,
        amplitude: f64,
        half_width: f64,
    },
    /// `z0 - z1 tanh(lambda (x - x0)) + amplitude exp(-(x - x1)^2 / sigma^2)`
    TanhGaussian {
        z0: f64,
        z1: f64,
        lambda: f64,
        x0: f64,
        amplitude: f64,
        x1: f64,
        sigma: f64,
    },
    /// `base + amplitude sin^2(pi (x - x_lo) / (x_hi - x_lo))` on
    /// `[x_lo, x_hi]`, `base` elsewhere.
    Dune {
        base: f64,
        amplitude: f64,
        x_lo: f64,
        x_hi: f64,
    },
}

impl Bathymetry {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Bathymetry::Flat { level } => level,
            Bathymetry::Gaussian {
                amplitude,
                center,
                sigma,
            } => amplitude * (-((x - center) / sigma).powi(2)).exp(),
            Bathymetry::CosinePeak {
                base,
                slope,
                amplitude,
                half_width,
            } => {
                let bump = if x.abs() < half_width {
                    amplitude * (PI * x / (2.0 * half_width)).cos().powi(2)
                } else {
                    0.0
                };
                base + slope * x + bump
            }
            Bathymetry::TanhGaussian {
                z0,
                z1,
                lambda,
                x0,
                amplitude,
                x1,
                sigma,
            } => z0 - z1 * (lambda * (x - x0)).tanh() + amplitude * (-((x - x1) / sigma).powi(2)).exp(),
            Bathymetry::Dune {
                base,
                amplitude,
                x_lo,
                x_hi,
            } => {
                if (x_lo..=x_hi).contains(&x) {
                    base + amplitude * (PI * (x - x_lo) / (x_hi - x_lo)).sin().powi(2)
                } else {
                    base
                }
            }
        }
    }
}

/// Initial condition: free surface
/// `eta0 + eta_slope x + eta_cosine cos(pi x / L)` (x from the domain start,
/// `L` the domain length), discharge `q0`
/// distributed over the layers like the left boundary discharge, uniform
/// tracer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialCondition {
    pub eta0: f64,
    pub eta_slope: f64,
    pub eta_cosine: f64,
    pub q0: f64,
    pub tracer: f64,
}

impl Default for InitialCondition {
    fn default() -> Self {
        Self {
            eta0: 0.0,
            eta_slope: 0.0,
            eta_cosine: 0.0,
            q0: 0.0,
            tracer: 1.0,
        }
    }
}

/// Precursor run that produces the per-layer inflow profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpinUp {
    /// Total inflow discharge, m²/s.
    pub q: f64,
    pub dt: f64,
    /// Relative change of the outlet profile counted as converged.
    pub tolerance: f64,
    /// Steps over which the change is measured.
    pub window: usize,
    pub max_time: f64,
    /// Reads the profile from this file instead of running the precursor.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile_file: Option<String>,
}

impl Default for SpinUp {
    fn default() -> Self {
        Self {
            q: 15.0,
            dt: 2.0,
            tolerance: 1e-8,
            window: 100,
            max_time: 200_000.0,
            profile_file: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub grid: GridSpec,
    pub layers: Vec<LayerRegion>,
    pub bathymetry: Bathymetry,
    pub initial: InitialCondition,
    pub boundary: BoundaryConditions,
    pub physics: PhysicsParams,
    pub scheme: Scheme,
    pub dt: f64,
    pub theta: f64,
    pub courant: f64,
    pub t_final: f64,
    #[serde(default)]
    pub snapshots: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin_up: Option<SpinUp>,
}

fn uniform_layers(x_start: f64, x_end: f64, n: usize) -> Vec<LayerRegion> {
    vec![LayerRegion::uniform(x_start, x_end, n)]
}

/// Default configuration of a named scenario.
pub fn build_scenario(name: &str) -> Result<ScenarioConfig, ConfigError> {
    let base = |grid: GridSpec| ScenarioConfig {
        name: name.to_string(),
        layers: uniform_layers(grid.x_start, grid.x_end, 10),
        grid,
        bathymetry: Bathymetry::Flat { level: 0.0 },
        initial: InitialCondition::default(),
        boundary: BoundaryConditions::closed(),
        physics: PhysicsParams::default(),
        scheme: Scheme::Theta,
        dt: 25.0,
        theta: 0.55,
        courant: 0.1,
        t_final: 10_000.0,
        snapshots: Vec::new(),
        spin_up: None,
    };
    let cfg = match name {
        "free_oscillations" => {
            let mut c = base(GridSpec {
                x_start: 0.0,
                x_end: 10_000.0,
                cells: 200,
            });
            c.bathymetry = Bathymetry::Gaussian {
                amplitude: 4.0,
                center: 5000.0,
                sigma: 1000.0,
            };
            c.initial.eta0 = 10.0;
            c.initial.eta_slope = 1.0e-4;
            c
        }
        "subcritical_peak" => {
            let mut c = base(GridSpec {
                x_start: -25.0,
                x_end: 25.0,
                cells: 200,
            });
            c.bathymetry = Bathymetry::CosinePeak {
                base: 0.05,
                slope: -0.001,
                amplitude: 2.0,
                half_width: 5.0,
            };
            c.initial.eta0 = 5.0;
            c.initial.q0 = 4.42;
            c.boundary = BoundaryConditions {
                left: BoundaryCondition::Discharge {
                    q: Forcing::Constant { value: 4.42 },
                    profile: None,
                },
                right: BoundaryCondition::SurfaceElevation {
                    eta: Forcing::Constant { value: 5.0 },
                },
            };
            c.physics.cw = 0.0;
            c.dt = 0.11;
            c.t_final = 1000.0;
            c
        }
        "tidal_forcing" => {
            let mut c = base(GridSpec {
                x_start: -5000.0,
                x_end: 20_000.0,
                cells: 500,
            });
            c.bathymetry = Bathymetry::TanhGaussian {
                z0: 44.0,
                z1: -44.0,
                lambda: -1.0 / 3000.0,
                x0: 7500.0,
                amplitude: 70.0,
                x1: 16_000.0,
                sigma: 2000.0,
            };
            c.initial.eta0 = 100.0;
            c.boundary = BoundaryConditions {
                left: BoundaryCondition::Discharge {
                    q: Forcing::Constant { value: 1.0 },
                    profile: None,
                },
                right: BoundaryCondition::SurfaceElevation {
                    eta: Forcing::Sinusoid {
                        mean: 100.0,
                        amplitude: 3.0,
                        omega: 2.0 * PI / 43_200.0,
                        phase: 0.0,
                    },
                },
            };
            c.physics.dz0 = 3.3e-3;
            c.physics.u_wind = 1.0;
            c.dt = 55.0;
            c.t_final = 129_600.0;
            c
        }
        "sediment_dune" => {
            let mut c = base(GridSpec {
                x_start: 0.0,
                x_end: 1000.0,
                cells: 150,
            });
            c.bathymetry = Bathymetry::Dune {
                base: 0.1,
                amplitude: 1.0,
                x_lo: 300.0,
                x_hi: 500.0,
            };
            c.initial.eta0 = 15.0;
            c.initial.q0 = 15.0;
            c.boundary = BoundaryConditions {
                left: BoundaryCondition::Discharge {
                    q: Forcing::Constant { value: 15.0 },
                    profile: None,
                },
                right: BoundaryCondition::SurfaceElevation {
                    eta: Forcing::Constant { value: 15.0 },
                },
            };
            c.physics.cw = 0.0;
            c.physics.ag = 0.001;
            c.physics.porosity = 0.4;
            c.dt = 2.0;
            c.t_final = 691_200.0;
            c.spin_up = Some(SpinUp::default());
            c
        }
        other => return Err(ConfigError::UnknownScenario(other.to_string())),
    };
    Ok(cfg)
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let param = |name: &str, reason: &str| ConfigError::Parameter {
            name: name.to_string(),
            reason: reason.to_string(),
        };
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(param("dt", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(param("theta", "must lie in [0, 1]"));
        }
        if !(self.courant > 0.0 && self.courant <= 1.0) {
            return Err(param("courant", "must lie in (0, 1]"));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(param("t_final", "must be nonnegative"));
        }
        if let Some(t) = self.snapshots.iter().find(|&&t| !(0.0..=self.t_final).contains(&t)) {
            return Err(param("snapshots", &format!("time {t} outside [0, t_final]")));
        }
        if self.snapshots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(param("snapshots", "must be strictly increasing"));
        }
        if let Some(s) = &self.spin_up {
            if !(s.q.is_finite() && s.dt > 0.0 && s.tolerance > 0.0 && s.window > 0 && s.max_time > 0.0) {
                return Err(param("spin_up", "needs finite q and positive dt, tolerance, window, max_time"));
            }
            if !matches!(self.boundary.left, BoundaryCondition::Discharge { .. }) {
                return Err(ConfigError::Boundary("spin-up needs a discharge on the left".into()));
            }
        }
        self.build_model()?;
        Ok(())
    }

    /// Output times; the final time when none were requested.
    pub fn output_times(&self) -> Vec<f64> {
        if self.snapshots.is_empty() {
            vec![self.t_final]
        } else {
            self.snapshots.clone()
        }
    }

    pub fn build_grid(&self) -> Result<Grid, ConfigError> {
        Grid::uniform(self.grid.x_start, self.grid.x_end, self.grid.cells)
    }

    pub fn build_model(&self) -> Result<Model, ConfigError> {
        let grid = self.build_grid()?;
        let layout = LayerLayout::from_regions(&grid, &self.layers)?;
        Model::new(grid, layout, self.physics.clone(), self.boundary.clone())
    }

    /// Initial state with boundary conditions imposed at `t = 0`.
    pub fn initial_state(&self, model: &Model) -> State {
        let grid = &model.grid;
        let b: Vec<f64> = grid.centers.iter().map(|&x| self.bathymetry.eval(x)).collect();
        let eta: Vec<f64> = grid
            .centers
            .iter()
            .map(|&x| {
                let xr = x - grid.x_start;
                let len = grid.x_end - grid.x_start;
                self.initial.eta0 + self.initial.eta_slope * xr + self.initial.eta_cosine * (PI * xr / len).cos()
            })
            .collect();
        let mut s = State::at_rest(&model.layout, eta, b);
        s.rho.iter_mut().for_each(|r| *r = self.initial.tracer);
        if self.initial.q0 != 0.0 {
            let profile = match &model.bc.left {
                BoundaryCondition::Discharge { profile, .. } => profile.clone(),
                _ => None,
            };
            let h = s.depths();
            let m = grid.n_cells();
            for e in 0..=m {
                let he = if e == 0 {
                    h[0]
                } else if e == m {
                    h[m - 1]
                } else {
                    0.5 * (h[e - 1] + h[e])
                };
                let l = model.layout.edge_fractions(e);
                let shares: Vec<f64> = match &profile {
                    Some(p) if p.len() == l.len() => p.clone(),
                    _ => l.to_vec(),
                };
                let range = model.layout.edge_range(e);
                for (k, idx) in range.enumerate() {
                    s.u[idx] = self.initial.q0 * shares[k] / (l[k] * he);
                }
            }
        }
        model.prepare(&mut s);
        s
    }
}
