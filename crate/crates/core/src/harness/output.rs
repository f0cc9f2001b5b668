use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{ConfigError, Error};
use crate::mesh::{Expand, Grid, LayerLayout};
use crate::operators::vertical::recover_vertical_velocity;
use crate::state::State;

/// Float format with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Snapshot table: one row per cell, velocities averaged to the cell centre
/// on the cell layering, `w` at the layer interfaces from the bed up.
pub fn snapshot_csv(grid: &Grid, layout: &LayerLayout, state: &State) -> String {
    let nmax = layout.max_layers();
    let mut out = String::from("x,eta,b,h");
    for a in 1..=nmax {
        write!(out, ",u_{a}").unwrap();
    }
    for a in 1..=nmax + 1 {
        write!(out, ",w_{a}").unwrap();
    }
    out.push('\n');
    let w = recover_vertical_velocity(grid, layout, state, 0.0);
    let mut ul = vec![0.0; nmax];
    let mut ur = vec![0.0; nmax];
    for i in 0..grid.n_cells() {
        let n = layout.cell_layers(i);
        layout.edge_to_cell(i, i, state.edge_u(layout, i), &mut ul, Expand::Replicate);
        layout.edge_to_cell(i, i + 1, state.edge_u(layout, i + 1), &mut ur, Expand::Replicate);
        let mut row = vec![grid.centers[i], state.eta[i], state.b[i], state.depth(i)];
        row.extend((0..nmax).map(|a| if a < n { 0.5 * (ul[a] + ur[a]) } else { f64::NAN }));
        let wi = w[i].averaged();
        row.extend((0..=nmax).map(|a| if a <= n { wi[a] } else { f64::NAN }));
        let line: Vec<String> = row.into_iter().map(fmt_f64).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn write_snapshot(path: &Path, grid: &Grid, layout: &LayerLayout, state: &State) -> Result<(), Error> {
    fs::write(path, snapshot_csv(grid, layout, state)).map_err(|e| io_err(path, e))
}

/// Ordered `key=value` metrics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metrics {
    entries: Vec<(String, String)>,
}

impl Metrics {
    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn push_f64(&mut self, key: impl Into<String>, value: f64) {
        self.push(key, fmt_f64(value));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn write(&self, path: &Path) -> Result<(), Error> {
        fs::write(path, self.render()).map_err(|e| io_err(path, e))
    }
}

/// Parses a metrics file back into key/value pairs.
pub fn parse_metrics(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

pub fn write_profile(path: &Path, profile: &[f64]) -> Result<(), Error> {
    let text: String = profile.iter().map(|v| format!("{}\n", fmt_f64(*v))).collect();
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn read_profile(path: &Path) -> Result<Vec<f64>, Error> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.parse::<f64>().map_err(|_| {
                Error::Config(ConfigError::Parse(format!("{}: bad profile value `{l}`", path.display())))
            })
        })
        .collect()
}

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::LayerRegion;

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 12345.678901234567] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(f64::NAN), "nan");
    }

    #[test]
    fn csv_pads_missing_layers() {
        let grid = Grid::uniform(0.0, 4.0, 4).unwrap();
        let layout = LayerLayout::from_regions(
            &grid,
            &[LayerRegion::uniform(0.0, 4.0, 1), LayerRegion::uniform(3.0, 4.0, 2)],
        )
        .unwrap();
        let s = State::at_rest(&layout, vec![1.0; 4], vec![0.0; 4]);
        let csv = snapshot_csv(&grid, &layout, &s);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,eta,b,h,u_1,u_2,w_1,w_2,w_3");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].ends_with(",nan,0.0000000000000000e0,0.0000000000000000e0,nan"));
        assert!(!lines[4].contains("nan"));
    }

    #[test]
    fn metrics_render_and_parse() {
        let mut m = Metrics::default();
        m.push("steps", 12);
        m.push_f64("c_cel", 0.5);
        let parsed = parse_metrics(&m.render());
        assert_eq!(parsed[0], ("steps".to_string(), "12".to_string()));
        assert_eq!(m.get("c_cel"), Some("5.0000000000000000e-1"));
    }

    #[test]
    fn profile_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.txt");
        let p = vec![0.05, 0.07, 0.123456789012345678];
        write_profile(&path, &p).unwrap();
        assert_eq!(read_profile(&path).unwrap(), p);
    }

    #[test]
    fn fnv_known_values() {
        assert_eq!(fnv1a(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a(b"a"), 0xaf63dc4c8601ec8c);
    }
}
