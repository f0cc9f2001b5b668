//! Turbulence and boundary-stress closures.
//!
//! All stresses are kinematic (divided by the reference density).

use serde::{Deserialize, Serialize};

use crate::error::{ClosureError, ConfigError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsParams {
    /// Gravitational acceleration, m/s².
    pub g: f64,
    /// von Karman constant.
    pub kappa: f64,
    /// Roughness length, m.
    pub dz0: f64,
    /// Wind drag coefficient.
    pub cw: f64,
    /// Wind velocity, m/s.
    pub u_wind: f64,
    /// Reference fluid density, kg/m³. Not used by the kinematic closures.
    pub rho0: f64,
    /// Grass bedload constant; zero keeps the bed fixed.
    pub ag: f64,
    /// Sediment bed porosity.
    pub porosity: f64,
    /// Depth below which a step aborts, m.
    pub h_min: f64,
}

impl Default for PhysicsParams {
    fn default() -> Self {
        Self {
            g: 9.81,
            kappa: 0.41,
            dz0: 3.3e-5,
            cw: 1.2e-6,
            u_wind: -1.0,
            rho0: 1000.0,
            ag: 0.0,
            porosity: 0.0,
            h_min: 1e-6,
        }
    }
}

impl PhysicsParams {
    /// Bed volume factor 1 / (1 - porosity).
    pub fn xi(&self) -> f64 {
        1.0 / (1.0 - self.porosity)
    }

    pub fn movable_bed(&self) -> bool {
        self.ag > 0.0
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let check = |name: &str, ok: bool, reason: &str| {
            if ok {
                Ok(())
            } else {
                Err(ConfigError::Parameter {
                    name: name.to_string(),
                    reason: reason.to_string(),
                })
            }
        };
        check("g", self.g > 0.0 && self.g.is_finite(), "must be positive")?;
        check("kappa", self.kappa > 0.0, "must be positive")?;
        check("dz0", self.dz0 > 0.0, "must be positive")?;
        check("cw", self.cw >= 0.0, "must be nonnegative")?;
        check("u_wind", self.u_wind.is_finite(), "must be finite")?;
        check("ag", self.ag >= 0.0, "must be nonnegative")?;
        check(
            "porosity",
            (0.0..1.0).contains(&self.porosity),
            "must lie in [0, 1)",
        )?;
        check("h_min", self.h_min > 0.0, "must be positive")
    }
}

/// Log-law bottom friction coefficient for depth `h` and reference height
/// `dz_r` above the bed.
pub fn friction_coefficient(h: f64, dz_r: f64, params: &PhysicsParams) -> Result<f64, ClosureError> {
    if !(dz_r < h && dz_r > params.dz0) {
        return Err(ClosureError::ReferenceHeight {
            dz_r,
            dz0: params.dz0,
            h,
        });
    }
    let log = (dz_r / params.dz0).ln();
    Ok(params.kappa * params.kappa * (1.0 - dz_r / h) / (log * log))
}

/// Friction coefficient of a column whose bottom layer has fraction
/// `bottom_fraction`. A single-layer column has `dz_r = h`, where the law
/// degenerates to zero.
pub fn column_friction_coefficient(
    h: f64,
    bottom_fraction: f64,
    params: &PhysicsParams,
) -> Result<f64, ClosureError> {
    if bottom_fraction >= 1.0 {
        return Ok(0.0);
    }
    friction_coefficient(h, bottom_fraction * h, params)
}

/// Friction velocity used at an interior interface whose height above the
/// bed is `partial_height`.
pub fn friction_velocity_interface(
    u1: f64,
    partial_height: f64,
    params: &PhysicsParams,
) -> Result<f64, ClosureError> {
    if !(partial_height > params.dz0) {
        return Err(ClosureError::PartialHeight {
            height: partial_height,
            dz0: params.dz0,
        });
    }
    Ok(u1.abs() * params.kappa / (partial_height / params.dz0).ln())
}

/// Parabolic eddy viscosity at interface `alpha + 1/2` (`1 <= alpha < N`,
/// one-based) of a column with depth `h` and layer `fractions`.
pub fn interface_viscosity(
    alpha: usize,
    h: f64,
    fractions: &[f64],
    ustar: f64,
    params: &PhysicsParams,
) -> f64 {
    assert!(
        alpha >= 1 && alpha < fractions.len(),
        "interface index {alpha} outside 1..{}",
        fractions.len()
    );
    let below: f64 = fractions[..alpha].iter().sum();
    let above: f64 = fractions[alpha..].iter().sum();
    params.kappa * ustar * below * h * above
}

pub fn bottom_stress(u1: f64, cf: f64) -> f64 {
    -cf * u1.abs() * u1
}

/// Quadratic wind stress and its linearised coefficient `Cw |u_wind - u_top|`.
pub fn wind_stress(u_top: f64, params: &PhysicsParams) -> (f64, f64) {
    let rel = params.u_wind - u_top;
    let coeff = params.cw * rel.abs();
    (coeff * rel, coeff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> PhysicsParams {
        PhysicsParams::default()
    }

    #[test]
    fn friction_coefficient_values() {
        let p = params();
        assert_relative_eq!(
            friction_coefficient(10.0, 1.0, &p).unwrap(),
            1.4208e-3,
            max_relative = 1e-4
        );
        // deep-water limit
        let deep = friction_coefficient(1e9, 1.0, &p).unwrap();
        let log = (1.0f64 / p.dz0).ln();
        assert_relative_eq!(deep, p.kappa * p.kappa / (log * log), max_relative = 1e-8);
        // unit logarithm
        let p_e = PhysicsParams {
            dz0: 1.0 / std::f64::consts::E,
            ..params()
        };
        assert_relative_eq!(
            friction_coefficient(4.0, 1.0, &p_e).unwrap(),
            p.kappa * p.kappa * 0.75,
            max_relative = 1e-12
        );
    }

    #[test]
    fn friction_coefficient_errors() {
        let p = params();
        assert!(friction_coefficient(1.0, 1.0, &p).is_err());
        assert!(friction_coefficient(1.0, 2.0, &p).is_err());
        assert!(friction_coefficient(1.0, 1e-6, &p).is_err());
        assert_eq!(column_friction_coefficient(5.0, 1.0, &p).unwrap(), 0.0);
    }

    #[test]
    fn friction_velocity_values() {
        let p = params();
        assert_eq!(friction_velocity_interface(0.0, 1.0, &p).unwrap(), 0.0);
        assert_relative_eq!(
            friction_velocity_interface(1.0, 1.0, &p).unwrap(),
            0.03973,
            max_relative = 1e-3
        );
        let a = friction_velocity_interface(0.7, 2.0, &p).unwrap();
        let b = friction_velocity_interface(-1.4, 2.0, &p).unwrap();
        assert_relative_eq!(b, 2.0 * a, max_relative = 1e-14);
        assert!(friction_velocity_interface(1.0, 1e-5, &p).is_err());
    }

    #[test]
    fn viscosity_values_and_shape() {
        let p = params();
        let l = vec![0.1; 10];
        assert_relative_eq!(
            interface_viscosity(5, 10.0, &l, 0.1, &p),
            0.1025,
            max_relative = 1e-12
        );
        assert_eq!(interface_viscosity(3, 10.0, &l, 0.0, &p), 0.0);
        let nu: Vec<f64> = (1..10).map(|a| interface_viscosity(a, 10.0, &l, 0.1, &p)).collect();
        let peak = nu.iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(peak, nu[4]);
        for k in 0..4 {
            assert_relative_eq!(nu[k], nu[8 - k], max_relative = 1e-12);
        }
        let thin_top = [0.5, 0.5 - 1e-9, 1e-9];
        assert!(interface_viscosity(2, 10.0, &thin_top, 0.1, &p) < 1e-8);
    }

    #[test]
    fn stress_laws() {
        assert_eq!(bottom_stress(0.0, 1e-3), 0.0);
        assert_relative_eq!(bottom_stress(2.0, 1e-3), -0.004, max_relative = 1e-14);
        assert_relative_eq!(bottom_stress(-2.0, 1e-3), 0.004, max_relative = 1e-14);

        let p = params();
        assert_eq!(wind_stress(p.u_wind, &p), (0.0, 0.0));
        let (s, c) = wind_stress(0.0, &p);
        assert_relative_eq!(s, -1.2e-6, max_relative = 1e-12);
        assert_relative_eq!(c, 1.2e-6, max_relative = 1e-12);
        let (s2, _) = wind_stress(1.0, &p);
        assert_relative_eq!(s2, 4.0 * s, max_relative = 1e-12);
    }

    #[test]
    fn params_validation() {
        assert!(params().validate().is_ok());
        let bad = PhysicsParams {
            porosity: 1.0,
            ..params()
        };
        assert!(bad.validate().is_err());
        let sed = PhysicsParams {
            porosity: 0.4,
            ..params()
        };
        assert_relative_eq!(sed.xi(), 1.0 / 0.6, max_relative = 1e-15);
    }
}
