//! Report, table and raster files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::CliError;
use crate::grid::ScalarField;

/// Output directory and the names written into it, in order.
#[derive(Debug)]
pub struct Artifacts {
    dir: PathBuf,
    rasters: bool,
    written: Vec<String>,
}

impl Artifacts {
    pub fn create(dir: &Path, rasters: bool) -> Result<Artifacts, CliError> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
        Ok(Artifacts { dir: dir.to_path_buf(), rasters, written: Vec::new() })
    }

    pub fn rasters(&self) -> bool {
        self.rasters
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|source| CliError::Io { path, source })?;
        if !self.written.iter().any(|w| w == name) && name != "report.json" {
            self.written.push(name.to_string());
        }
        Ok(())
    }

    /// Pretty JSON with a trailing newline.
    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| self.io_error(name, e))?;
        text.push('\n');
        self.put(name, text.as_bytes())
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let bytes = csv_bytes(header, rows).map_err(|e| self.io_error(name, e))?;
        self.put(name, &bytes)
    }

    /// Anything that writes itself to a `Write`, such as the cube and jet dumps.
    pub fn with_writer<E: std::error::Error + Send + Sync + 'static>(
        &mut self,
        name: &str,
        write: impl FnOnce(&mut Vec<u8>) -> Result<(), E>,
    ) -> Result<(), CliError> {
        let mut buf = Vec::new();
        write(&mut buf).map_err(|e| self.io_error(name, e))?;
        self.put(name, &buf)
    }

    /// Writes a raster when rasters are enabled.
    pub fn pgm(&mut self, name: &str, field: &ScalarField) -> Result<(), CliError> {
        if !self.rasters {
            return Ok(());
        }
        let bytes = pgm_bytes(field);
        self.put(name, &bytes)
    }

    fn io_error<E: std::error::Error + Send + Sync + 'static>(&self, name: &str, e: E) -> CliError {
        CliError::Io { path: self.dir.join(name), source: std::io::Error::other(e) }
    }
}

pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> csv::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    w.into_inner().map_err(|e| csv::Error::from(e.into_error()))
}

/// Plain PGM (P2), 255 grey levels scaled from the field's range, top row
/// first. A constant field maps to 0.
pub fn pgm_bytes(field: &ScalarField) -> Vec<u8> {
    let g = field.grid;
    let (lo, hi) = field.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = hi - lo;
    let mut out = Vec::new();
    let _ = writeln!(out, "P2\n{} {}\n255", g.nx(), g.ny());
    for j in (0..g.ny()).rev() {
        let row: Vec<String> = (0..g.nx())
            .map(|i| {
                let v = field.get(i, j);
                let level = if span > 0.0 { ((v - lo) / span * 255.0).round() } else { 0.0 };
                (level as u8).to_string()
            })
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// Shortest round-trip formatting, so tables are stable across runs.
pub fn num(v: f64) -> String {
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn pgm_layout() {
        let g = Grid::new([0.0, 0.0], 1.0, [2, 2]).unwrap();
        let f = ScalarField::from_fn(g, |p| p[1]);
        let text = String::from_utf8(pgm_bytes(&f)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(&lines[..3], &["P2", "3 3", "255"]);
        // Top row is the largest y.
        assert_eq!(lines[3], "255 255 255");
        assert_eq!(lines[5], "0 0 0");
        let flat = String::from_utf8(pgm_bytes(&ScalarField::constant(g, 4.0))).unwrap();
        assert!(flat.lines().skip(3).all(|l| l == "0 0 0"));
    }

    #[test]
    fn csv_with_header() {
        let b = csv_bytes(&["eps", "k"], &[vec![num(0.5), "0".into()]]).unwrap();
        assert_eq!(String::from_utf8(b).unwrap(), "eps,k\n0.5,0\n");
    }

    #[test]
    fn artifacts_record_names_once() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = Artifacts::create(dir.path(), false).unwrap();
        a.csv("t.csv", &["a"], &[]).unwrap();
        a.csv("t.csv", &["a"], &[]).unwrap();
        a.pgm("skip.pgm", &ScalarField::zeros(Grid::square(0.0, 1.0, 2).unwrap())).unwrap();
        assert_eq!(a.written(), &["t.csv".to_string()]);
        assert!(!dir.path().join("skip.pgm").exists());
    }
}
