pub mod figure;
pub mod lie_verify;
pub mod optimize;
pub mod oracle;
pub mod sensitivity;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use su12_core::interferometer::{InputState, InterferometerConfig, PhaseShifts};
use su12_core::optimizer::{Axis, OptimizerError, WeightSearchSpec};
use su12_core::sensitivity::SensitivityError;
use su12_core::C64;

use crate::error::{CliError, Result};
use crate::params::{key, Key, Params};

/// `π` spelled so that parsing it back gives `std::f64::consts::PI`.
pub const PI_STR: &str = "3.141592653589793";

/// Gains, mixer phases, phase shifts and coherent amplitudes. Empty `beta3`
/// and `beta4` follow `beta2` and `beta1`, giving the balanced device.
pub const DEVICE_KEYS: [Key; 17] = [
    key("beta1", "3"),
    key("beta2", "3"),
    key("beta3", ""),
    key("beta4", ""),
    key("theta1", "0"),
    key("theta2", "0"),
    key("theta3", PI_STR),
    key("theta4", PI_STR),
    key("phi1", "0"),
    key("phi2", "0"),
    key("phi3", "0"),
    key("alpha1_re", "0"),
    key("alpha1_im", "0"),
    key("alpha2_re", "0"),
    key("alpha2_im", "0"),
    key("alpha3_re", "0"),
    key("alpha3_im", "0"),
];

/// Weight-search keys shared by `optimize` and the ratio figures.
pub const SEARCH_KEYS: [Key; 5] = [
    key("ratio_lo", "-3"),
    key("ratio_hi", "3"),
    key("ratio_points", "61"),
    key("rounds", "4"),
    key("epsilon", "1e-3"),
];

pub fn schema(parts: &[&[Key]]) -> Vec<Key> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

pub fn device(p: &mut Params) -> Result<(InterferometerConfig, InputState)> {
    p.default_from("beta3", "beta2");
    p.default_from("beta4", "beta1");
    let betas = [p.f64("beta1")?, p.f64("beta2")?, p.f64("beta3")?, p.f64("beta4")?];
    let thetas = [p.f64("theta1")?, p.f64("theta2")?, p.f64("theta3")?, p.f64("theta4")?];
    // figures that sweep a phase leave its key out of the schema
    let phase = |k: &str| if p.has(k) { p.f64(k) } else { Ok(0.0) };
    let phases = PhaseShifts::new(phase("phi1")?, phase("phi2")?, phase("phi3")?);
    let cfg = InterferometerConfig::new(betas, thetas, phases);
    cfg.validate().map_err(|e| CliError::usage(e.to_string()))?;
    let alpha = [
        C64::new(p.f64("alpha1_re")?, p.f64("alpha1_im")?),
        C64::new(p.f64("alpha2_re")?, p.f64("alpha2_im")?),
        C64::new(p.f64("alpha3_re")?, p.f64("alpha3_im")?),
    ];
    Ok((cfg, InputState { alpha }))
}

pub fn search_spec(p: &Params, fixed_zero: Option<usize>) -> Result<WeightSearchSpec> {
    let spec = WeightSearchSpec {
        fixed_zero,
        ratio_axis: Axis::new(p.f64("ratio_lo")?, p.f64("ratio_hi")?, p.usize("ratio_points")?),
        refinement_rounds: p.usize("rounds")?,
        epsilon: p.f64("epsilon")?,
    };
    spec.validate().map_err(|e| CliError::usage(e.to_string()))?;
    Ok(spec)
}

pub fn axis(p: &Params, prefix: &str) -> Result<Axis> {
    let a = Axis::new(p.f64(&format!("{prefix}_lo"))?, p.f64(&format!("{prefix}_hi"))?, p.usize(&format!("{prefix}_points"))?);
    if a.points == 0 || (a.points > 1 && a.hi <= a.lo) {
        return Err(CliError::usage(format!("`{prefix}` axis needs {prefix}_lo < {prefix}_hi and at least one point")));
    }
    Ok(a)
}

pub fn phase_index(p: &Params) -> Result<usize> {
    let j = p.usize("j")?;
    if !(1..=3).contains(&j) {
        return Err(CliError::usage(format!("`j` must be 1, 2 or 3, got {j}")));
    }
    Ok(j)
}

pub fn optimizer_error(e: OptimizerError) -> CliError {
    match e {
        OptimizerError::InvalidSpec(why) => CliError::usage(why),
        OptimizerError::Sensitivity(SensitivityError::InvalidConfig(c)) => CliError::usage(c.to_string()),
        OptimizerError::Sensitivity(s @ SensitivityError::NonConvergent { .. }) => CliError::Guard(s.to_string()),
        other => CliError::usage(other.to_string()),
    }
}

/// What a command hands back for printing and for `summary.txt`.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub lines: Vec<String>,
    pub summary: Vec<(String, String)>,
    /// Set when the command's own check failed (exit 1 after writing output).
    pub failure: Option<String>,
}

impl Outcome {
    pub fn record(&mut self, k: impl Into<String>, v: impl ToString) {
        self.summary.push((k.into(), v.to_string()));
    }

    pub fn say(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }
}

/// Exact float text for summaries.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_summary(dir: &Path, command: &str, params: &Params, outcome: &Outcome, timestamp: Option<u64>) -> Result<PathBuf> {
    let mut s = String::new();
    let _ = writeln!(s, "# su12 {command}");
    if let Some(t) = timestamp {
        let _ = writeln!(s, "# generated at unix time {t}");
    }
    for (k, v) in params.resolved() {
        let _ = writeln!(s, "#= {k} = {v}");
    }
    for (k, v) in &outcome.summary {
        let _ = writeln!(s, "{k} = {v}");
    }
    let path = dir.join("summary.txt");
    std::fs::write(&path, s).map_err(|source| CliError::Write { path: path.clone(), source })?;
    Ok(path)
}
