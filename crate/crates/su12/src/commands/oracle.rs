use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use su12_core::fock::{compare_with_gaussian, OracleCase};
use su12_core::interferometer::{InputState, InterferometerConfig, PhaseShifts};
use su12_core::sensitivity::DetectorWeights;
use su12_core::C64;

use super::{num, Outcome};
use crate::error::{CliError, Result};
use crate::params::{key, Key, Params};

/// A non-empty `beta` pins all four gains instead of drawing them.
pub const KEYS: [Key; 7] = [
    key("cases", "50"),
    key("seed", "7"),
    key("cutoff", "14"),
    key("max_beta", "0.5"),
    key("max_alpha", "0.7"),
    key("beta", ""),
    key("tolerance", "1e-6"),
];

/// Random circuits: independent gains in `[0, max_beta]`, uniform mixer
/// and phase angles, one coherent beam of modulus `≤ max_alpha` on a random
/// port, random weights in `[−1, 1]` and a random phase index.
pub fn random_cases(n: usize, seed: u64, max_beta: f64, max_alpha: f64, fixed_beta: Option<f64>) -> Vec<OracleCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let betas: [f64; 4] = std::array::from_fn(|_| fixed_beta.unwrap_or_else(|| rng.gen_range(0.0..=max_beta)));
            let thetas: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-PI..PI));
            let phases = PhaseShifts::new(rng.gen_range(-PI..PI), rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
            let port = rng.gen_range(1..=3);
            let amp = C64::from_polar(rng.gen_range(0.0..=max_alpha), rng.gen_range(-PI..PI));
            let weights = DetectorWeights::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            OracleCase {
                cfg: InterferometerConfig::new(betas, thetas, phases),
                input: InputState::coherent(port, amp),
                weights,
                phase_index: rng.gen_range(1..=3),
            }
        })
        .collect()
}

pub fn run(p: &mut Params) -> Result<Outcome> {
    let n = p.usize("cases")?;
    let cutoff = p.usize("cutoff")?;
    let (max_beta, max_alpha, tol) = (p.f64("max_beta")?, p.f64("max_alpha")?, p.f64("tolerance")?);
    if max_beta < 0.0 || max_alpha < 0.0 {
        return Err(CliError::usage("`max_beta` and `max_alpha` must be non-negative"));
    }
    let fixed = if p.raw("beta").is_empty() { None } else { Some(p.f64("beta")?) };
    if fixed.is_some_and(|b| b < 0.0) {
        return Err(CliError::usage("`beta` must be non-negative"));
    }
    let cases = random_cases(n, p.u64("seed")?, max_beta, max_alpha, fixed);
    let dev = compare_with_gaussian(&cases, cutoff).map_err(|e| CliError::Guard(e.to_string()))?;
    let mut out = Outcome::default();
    out.say(format!("{} cases, cutoff {cutoff}, tolerance {tol:e}", dev.cases));
    for (name, v) in dev.rows() {
        out.say(format!("{} {name}: max deviation {v:.3e}", if v <= tol { "PASS" } else { "FAIL" }));
        out.record(format!("max_dev_{name}"), num(v));
    }
    out.record("max_leakage", num(dev.max_leakage));
    let failed: Vec<&str> = dev.rows().iter().filter(|r| r.1 > tol).map(|r| r.0).collect();
    out.record("status", if failed.is_empty() { "PASS" } else { "FAIL" });
    if !failed.is_empty() {
        out.failure = Some(format!("deviation above {tol:e} in {}", failed.join(", ")));
    }
    Ok(out)
}
