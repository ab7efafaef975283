//! Flat `key = value` parameter files.
//!
//! One assignment per line, `#` starts a comment line. Lines of the form
//! `#= key = value` are assignments too, which lets a CSV written by this
//! tool serve as its own config: when a file holds any `#=` line, every
//! other line is ignored.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{CliError, Result};

/// A recognised key with its default (empty means "derived from another key").
#[derive(Clone, Copy, Debug)]
pub struct Key {
    pub name: &'static str,
    pub default: &'static str,
}

pub const fn key(name: &'static str, default: &'static str) -> Key {
    Key { name, default }
}

/// Parsed assignments in file order.
pub fn parse_text(text: &str) -> Result<Vec<(String, String)>> {
    let embedded = text.lines().any(|l| l.trim_start().starts_with("#="));
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let body = if let Some(rest) = line.strip_prefix("#=") {
            rest
        } else if embedded || line.is_empty() || line.starts_with('#') {
            continue;
        } else {
            line
        };
        let (k, v) = split_assignment(body).ok_or_else(|| {
            CliError::usage(format!("line {}: expected `key = value`, got `{}`", n + 1, raw.trim()))
        })?;
        out.push((k, v));
    }
    Ok(out)
}

/// `key=value` or `key = value`.
pub fn split_assignment(s: &str) -> Option<(String, String)> {
    let (k, v) = s.split_once('=')?;
    let k = k.trim();
    if k.is_empty() || k.contains(char::is_whitespace) {
        return None;
    }
    Some((k.to_string(), v.trim().to_string()))
}

/// Resolved parameters for one command, echoed verbatim into outputs.
#[derive(Clone, Debug)]
pub struct Params {
    schema: Vec<Key>,
    values: BTreeMap<&'static str, String>,
}

impl Params {
    pub fn new(schema: &[Key]) -> Self {
        let values = schema.iter().map(|k| (k.name, k.default.to_string())).collect();
        Self { schema: schema.to_vec(), values }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let known = self.schema.iter().find(|k| k.name == key).ok_or_else(|| {
            let names: Vec<&str> = self.schema.iter().map(|k| k.name).collect();
            CliError::usage(format!("unknown key `{key}` (known: {})", names.join(", ")))
        })?;
        self.values.insert(known.name, value.to_string());
        Ok(())
    }

    pub fn load_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
        for (k, v) in parse_text(&text)? {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    /// Applies `--set key=value` overrides in order.
    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<()> {
        for o in overrides {
            let (k, v) = split_assignment(o).ok_or_else(|| CliError::usage(format!("--set expects KEY=VALUE, got `{o}`")))?;
            self.set(&k, &v)?;
        }
        Ok(())
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or_else(|| panic!("key `{key}` missing from schema"))
    }

    /// Fills an empty value from another key.
    pub fn default_from(&mut self, key: &'static str, source: &str) {
        if self.raw(key).is_empty() {
            let v = self.raw(source).to_string();
            self.values.insert(key, v);
        }
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        let raw = self.raw(key);
        let v: f64 = raw.parse().map_err(|_| CliError::usage(format!("`{key}` must be a number, got `{raw}`")))?;
        if !v.is_finite() {
            return Err(CliError::usage(format!("`{key}` must be finite, got `{raw}`")));
        }
        Ok(v)
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        let raw = self.raw(key);
        raw.parse().map_err(|_| CliError::usage(format!("`{key}` must be a non-negative integer, got `{raw}`")))
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        let raw = self.raw(key);
        raw.parse().map_err(|_| CliError::usage(format!("`{key}` must be a non-negative integer, got `{raw}`")))
    }

    pub fn choice<'a>(&self, key: &str, options: &[&'a str]) -> Result<&'a str> {
        let raw = self.raw(key);
        options
            .iter()
            .find(|o| **o == raw)
            .copied()
            .ok_or_else(|| CliError::usage(format!("`{key}` must be one of {}, got `{raw}`", options.join("|"))))
    }

    /// Assignments in schema order.
    pub fn resolved(&self) -> Vec<(&'static str, String)> {
        self.schema.iter().map(|k| (k.name, self.values[k.name].clone())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_spacing() {
        let got = parse_text("# header\n\nbeta1 = 3\nphi1=0.5  \n").unwrap();
        assert_eq!(got, vec![("beta1".into(), "3".into()), ("phi1".into(), "0.5".into())]);
    }

    #[test]
    fn embedded_assignments_win() {
        let csv = "# su12 figure 4\n#= beta1 = 2\nt_over_s,r_over_s,dphi1\n1,2,3\n";
        assert_eq!(parse_text(csv).unwrap(), vec![("beta1".into(), "2".into())]);
    }

    #[test]
    fn bad_line_is_rejected() {
        assert!(parse_text("beta1 3\n").is_err());
    }

    #[test]
    fn unknown_key_is_rejected() {
        let mut p = Params::new(&[key("beta1", "3")]);
        assert!(p.set("beta9", "1").is_err());
        p.apply_overrides(&["beta1=4".into()]).unwrap();
        assert_eq!(p.f64("beta1").unwrap(), 4.0);
    }
}
