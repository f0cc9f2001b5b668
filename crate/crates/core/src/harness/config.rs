//! Run configuration files and command-line overrides.
//!
//! A configuration file is TOML. `scenario = "NAME"` starts from that
//! scenario's defaults and every other key overrides them; without it the
//! file must spell out the full configuration.

use std::path::Path;

use toml::{Table, Value};

use crate::error::ConfigError;
use crate::harness::scenario::{build_scenario, ScenarioConfig};
use crate::mesh::LayerRegion;

fn parse_err(msg: impl Into<String>) -> ConfigError {
    ConfigError::Parse(msg.into())
}

/// Recursively overlays `over` onto `base`; arrays and scalars are replaced.
fn merge(base: &mut Table, over: Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(o)) => {
                // a different variant of a tagged enum replaces the table
                if o.get("kind").is_some() && o.get("kind") != b.get("kind") {
                    *b = o;
                } else {
                    merge(b, o);
                }
            }
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut table: Table = toml::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let merged = match table.remove("scenario") {
        Some(Value::String(name)) => {
            let base = build_scenario(&name)?;
            let mut base = Table::try_from(&base).map_err(|e| parse_err(e.to_string()))?;
            merge(&mut base, table);
            base
        }
        Some(_) => return Err(parse_err("`scenario` must be a string")),
        None => table,
    };
    let cfg: ScenarioConfig = merged.try_into().map_err(|e: toml::de::Error| parse_err(e.to_string()))?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| parse_err(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        ConfigError::Parse(msg) => parse_err(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Layer regions from a compact specification or a TOML file holding
/// `[[layers]]` tables.
///
/// The compact form is `N` for a uniform layering, or regions separated by
/// `;` written `x_lo:x_hi:N` or `x_lo:x_hi:l1,l2,...`. Later regions win on
/// shared edges.
pub fn parse_layers(arg: &str, x_start: f64, x_end: f64) -> Result<Vec<LayerRegion>, ConfigError> {
    let path = Path::new(arg);
    if path.is_file() {
        #[derive(serde::Deserialize)]
        struct File {
            layers: Vec<LayerRegion>,
        }
        let text = std::fs::read_to_string(path).map_err(|e| parse_err(format!("{}: {e}", path.display())))?;
        let f: File = toml::from_str(&text).map_err(|e| parse_err(format!("{}: {e}", path.display())))?;
        return Ok(f.layers);
    }
    let bad = || parse_err(format!("bad layer specification `{arg}`"));
    if let Ok(n) = arg.trim().parse::<usize>() {
        if n == 0 {
            return Err(bad());
        }
        return Ok(vec![LayerRegion::uniform(x_start, x_end, n)]);
    }
    arg.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|region| {
            let parts: Vec<&str> = region.split(':').map(str::trim).collect();
            let [lo, hi, layers] = parts[..] else {
                return Err(bad());
            };
            let lo: f64 = lo.parse().map_err(|_| bad())?;
            let hi: f64 = hi.parse().map_err(|_| bad())?;
            if layers.contains(',') {
                let fr = layers
                    .split(',')
                    .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(LayerRegion::with_fractions(lo, hi, fr))
            } else {
                let n: usize = layers.parse().map_err(|_| bad())?;
                if n == 0 {
                    return Err(bad());
                }
                Ok(LayerRegion::uniform(lo, hi, n))
            }
        })
        .collect()
}

pub fn parse_snapshots(arg: &str) -> Result<Vec<f64>, ConfigError> {
    arg.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| parse_err(format!("bad snapshot time `{s}`")))
        })
        .collect()
}
