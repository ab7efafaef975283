//! CSV tables with a provenance preamble.
//!
//! ```text
//! # su12 figure 4
//! # generated at unix time 1760000000      (omitted with --no-timestamp)
//! #= beta1 = 3
//! ...
//! t_over_s,r_over_s,dphi1
//! -3.0000000000000000e0,...
//! ```
//!
//! Numbers carry 17 significant digits so every `f64` round-trips.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub command: String,
    pub provenance: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(command: impl Into<String>, header: &[&str], provenance: Vec<(&'static str, String)>) -> Self {
        Self {
            command: command.into(),
            provenance: provenance.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn render(&self, timestamp: Option<u64>) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# su12 {}", self.command);
        if let Some(t) = timestamp {
            let _ = writeln!(s, "# generated at unix time {t}");
        }
        for (k, v) in &self.provenance {
            let _ = writeln!(s, "#= {k} = {v}");
        }
        let _ = writeln!(s, "{}", self.header.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn write(&self, path: &Path, timestamp: Option<u64>) -> Result<()> {
        std::fs::write(path, self.render(timestamp)).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut command = String::new();
        let mut provenance = Vec::new();
        let mut header: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix("#=") {
                let (k, v) = crate::params::split_assignment(rest)
                    .ok_or_else(|| CliError::usage(format!("bad provenance line `{line}`")))?;
                provenance.push((k, v));
            } else if let Some(rest) = line.strip_prefix("# su12 ") {
                command = rest.to_string();
            } else if line.starts_with('#') || line.is_empty() {
                continue;
            } else if header.is_none() {
                header = Some(line.split(',').map(str::to_string).collect());
            } else {
                let row = line
                    .split(',')
                    .map(|c| c.parse::<f64>().map_err(|_| CliError::usage(format!("bad number `{c}`"))))
                    .collect::<Result<Vec<f64>>>()?;
                if row.len() != header.as_ref().map_or(0, Vec::len) {
                    return Err(CliError::usage("ragged CSV row"));
                }
                rows.push(row);
            }
        }
        let header = header.ok_or_else(|| CliError::usage("CSV has no header"))?;
        Ok(Self { command, provenance, header, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let mut t = CsvTable::new("figure 4", &["a", "b"], vec![("beta1", "3".into())]);
        t.push(vec![0.1 + 0.2, -1e-300]);
        t.push(vec![f64::INFINITY, f64::NAN]);
        let back = CsvTable::parse(&t.render(Some(5))).unwrap();
        assert_eq!(back.command, "figure 4");
        assert_eq!(back.provenance, vec![("beta1".to_string(), "3".to_string())]);
        assert_eq!(back.rows[0], vec![0.1 + 0.2, -1e-300]);
        assert!(back.rows[1][0].is_infinite() && back.rows[1][1].is_nan());
    }

    #[test]
    fn timestamp_is_the_only_difference() {
        let t = CsvTable::new("figure 3", &["x"], vec![]);
        let (a, b) = (t.render(Some(1)), t.render(Some(2)));
        assert_ne!(a, b);
        assert_eq!(t.render(None), t.render(None));
    }
}
