use su12_core::lie::{commutator_table, verify, BracketTerm, GeneratorIndex};

use super::Outcome;
use crate::error::{CliError, Result};
use crate::params::{key, Key, Params};

/// `flip_bracket = i,j` negates table entry (i, j) before checking; it exists
/// so the suite's ability to catch a sign error can itself be tested.
pub const KEYS: [Key; 1] = [key("flip_bracket", "")];

fn parse_flip(raw: &str) -> Result<Option<(GeneratorIndex, GeneratorIndex)>> {
    if raw.is_empty() {
        return Ok(None);
    }
    let bad = || CliError::usage(format!("`flip_bracket` expects `i,j` with i, j in 1..=8, got `{raw}`"));
    let (a, b) = raw.split_once(',').ok_or_else(bad)?;
    let idx = |s: &str| s.trim().parse::<usize>().ok().and_then(GeneratorIndex::new).ok_or_else(bad);
    Ok(Some((idx(a)?, idx(b)?)))
}

pub fn run(p: &mut Params) -> Result<Outcome> {
    let mut table = commutator_table();
    if let Some((i, j)) = parse_flip(p.raw("flip_bracket"))? {
        let flipped = table.get(i, j).iter().map(|t| BracketTerm { coeff: -t.coeff, k: t.k }).collect();
        table.set(i, j, flipped);
    }
    let checks = verify(&table);
    let mut out = Outcome::default();
    let mut failed = 0;
    for c in &checks {
        failed += usize::from(!c.passed);
        out.say(format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
    }
    let brackets = checks.iter().filter(|c| c.name.starts_with("bracket")).count();
    out.say(format!("{} of {} checks passed ({brackets} bracket checks)", checks.len() - failed, checks.len()));
    out.record("checks", checks.len());
    out.record("bracket_checks", brackets);
    out.record("failed", failed);
    out.record("status", if failed == 0 { "PASS" } else { "FAIL" });
    if failed > 0 {
        out.failure = Some(format!("{failed} algebra checks failed"));
    }
    Ok(out)
}
