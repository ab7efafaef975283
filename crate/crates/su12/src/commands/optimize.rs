use su12_core::optimizer::optimize_weights;

use super::{device, num, optimizer_error, phase_index, schema, search_spec, Outcome, DEVICE_KEYS, SEARCH_KEYS};
use crate::error::{CliError, Result};
use crate::params::{key, Key, Params};

/// `fixed_zero = 0` leaves all three weights free; 1, 2 or 3 pins s, t or r.
pub const OWN_KEYS: [Key; 2] = [key("j", "1"), key("fixed_zero", "0")];

pub fn keys() -> Vec<Key> {
    schema(&[&DEVICE_KEYS, &OWN_KEYS, &SEARCH_KEYS])
}

const NAMES: [&str; 3] = ["s", "t", "r"];

pub fn run(p: &mut Params) -> Result<Outcome> {
    let (cfg, input) = device(p)?;
    let j = phase_index(p)?;
    let fixed = match p.usize("fixed_zero")? {
        0 => None,
        k @ 1..=3 => Some(k),
        k => return Err(CliError::usage(format!("`fixed_zero` must be 0, 1, 2 or 3, got {k}"))),
    };
    let spec = search_spec(p, fixed)?;
    let mut out = Outcome::default();
    match optimize_weights(j, &cfg, &input, &spec) {
        Ok(o) => {
            let (reference, free) = spec.layout();
            let w = o.weights.as_array();
            out.record("status", "OK");
            out.record("s", num(w[0]));
            out.record("t", num(w[1]));
            out.record("r", num(w[2]));
            for (k, ratio) in free.iter().zip(&o.ratios) {
                out.record(format!("{}_over_{}", NAMES[*k], NAMES[reference]), num(*ratio));
            }
            out.record("delta_phi", num(o.report.delta_phi));
            out.record("method", o.report.method);
            out.record("n_total", num(o.report.n_total));
            out.record("final_step", num(o.final_step));
            let rounds: Vec<String> = o.round_best.iter().map(|x| num(*x)).collect();
            out.record("round_best", rounds.join(","));
        }
        Err(su12_core::optimizer::OptimizerError::AllDivergent) => out.record("status", "ALL_DIVERGENT"),
        Err(e) => return Err(optimizer_error(e)),
    }
    for (k, v) in &out.summary {
        out.lines.push(format!("{k} = {v}"));
    }
    Ok(out)
}
