use std::f64::consts::PI;

use su12_core::interferometer::{InputState, InterferometerConfig};
use su12_core::sensitivity::{
    heisenberg_asymptote, phase_sensitivity, su11_sensitivity, sum_estimator_sensitivity, sum_estimator_zero_phase_limit,
    zero_phase_limit, DetectorWeights, SensitivityError, SensitivityReport,
};

use super::{device, num, phase_index, schema, Outcome, DEVICE_KEYS};
use crate::error::{CliError, Result};
use crate::params::{key, Key, Params};

pub const OWN_KEYS: [Key; 5] = [key("j", "1"), key("s", "1"), key("t", "0"), key("r", "1"), key("method", "auto")];

pub fn keys() -> Vec<Key> {
    schema(&[&DEVICE_KEYS, &OWN_KEYS])
}

/// Below this estimator spread (per unit weight) a zero derivative is read
/// as 0/0 rather than as a genuine divergence.
const SILENT_SD: f64 = 1e-6;

pub fn weights(p: &Params) -> Result<DetectorWeights> {
    let w = DetectorWeights::new(p.f64("s")?, p.f64("t")?, p.f64("r")?);
    if w.is_zero() {
        return Err(CliError::usage("detector weights s, t, r are all zero"));
    }
    Ok(w)
}

/// `auto`: evaluate at the configured phases; when the estimator is both
/// silent and motionless there (0/0, as for vacuum at zero phase), take the
/// zero-phase limit instead.
pub fn evaluate(
    method: &str,
    j: usize,
    cfg: &InterferometerConfig,
    input: &InputState,
    w: &DetectorWeights,
) -> std::result::Result<SensitivityReport, SensitivityError> {
    match method {
        "point" => phase_sensitivity(j, cfg, input, w),
        "limit" => zero_phase_limit(j, cfg, input, w),
        _ => match phase_sensitivity(j, cfg, input, w) {
            Err(SensitivityError::Divergent { estimator_sd }) if estimator_sd <= SILENT_SD * w.as_array().iter().map(|x| x.abs()).sum::<f64>() => {
                zero_phase_limit(j, cfg, input, w)
            }
            other => other,
        },
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

fn same_angle(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(2.0 * PI);
    d < 1e-12 || 2.0 * PI - d < 1e-12
}

/// Closed forms whose assumptions the configuration meets.
pub fn references(j: usize, cfg: &InterferometerConfig, input: &InputState, w: &DetectorWeights) -> Vec<(&'static str, f64)> {
    let mut out = Vec::new();
    let b = cfg.betas();
    let th = cfg.thetas();
    let ph = cfg.phases.phi;
    if !input.is_vacuum() || j != 1 || !close(b[2], b[1]) || !close(b[3], b[0]) || ph[1] != 0.0 || ph[2] != 0.0 {
        return out;
    }
    let [s, t, r] = w.as_array();
    let sum_estimator = r == 0.0 && close(s, t);
    let balanced = th[0] == 0.0 && th[1] == 0.0 && same_angle(th[2], PI) && same_angle(th[3], PI);
    if balanced {
        out.push(("ref_high_gain_optimum", heisenberg_asymptote(b[0], b[1])));
        if close(b[0], b[1]) {
            if let Ok(v) = su11_sensitivity(b[0]) {
                out.push(("ref_su11", v));
            }
        }
        if sum_estimator && ph[0] == 0.0 {
            if let Ok(v) = sum_estimator_zero_phase_limit(b[0], b[1]) {
                out.push(("ref_sum_estimator_limit", v));
            }
        }
    }
    if sum_estimator && th[0] == 0.0 && th[1] == 0.0 && ph[0] != 0.0 && same_angle(th[2] + ph[0], PI) {
        if let Ok(v) = sum_estimator_sensitivity(b[0], b[1], ph[0] + th[3]) {
            out.push(("ref_sum_estimator_detuned", v));
        }
    }
    out
}

pub fn run(p: &mut Params) -> Result<Outcome> {
    let (cfg, input) = device(p)?;
    let j = phase_index(p)?;
    let w = weights(p)?;
    let method = p.choice("method", &["auto", "point", "limit"])?;
    let mut out = Outcome::default();
    out.record("j", j);
    match evaluate(method, j, &cfg, &input, &w) {
        Ok(r) => {
            out.record("status", "OK");
            out.record("delta_phi", num(r.delta_phi));
            out.record("n_total", num(r.n_total));
            out.record("method", r.method);
            out.record("mean_derivative", num(r.mean_derivative));
            out.record("estimator_sd", num(r.estimator_sd));
            out.record("phase", num(r.phase));
            out.record("residual", num(r.residual));
            for (name, v) in references(j, &cfg, &input, &w) {
                out.record(name, num(v));
            }
        }
        Err(SensitivityError::Divergent { estimator_sd }) => {
            out.record("status", "DIVERGENT");
            out.record("estimator_sd", num(estimator_sd));
            out.record("n_total", num(su12_core::interferometer::total_photon_number(&cfg, &input)));
        }
        Err(e @ SensitivityError::NonConvergent { .. }) => return Err(CliError::Guard(e.to_string())),
        Err(e) => return Err(CliError::usage(e.to_string())),
    }
    for (k, v) in &out.summary {
        out.lines.push(format!("{k} = {v}"));
    }
    Ok(out)
}
