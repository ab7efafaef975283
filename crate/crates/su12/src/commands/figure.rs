//! Tables behind the phase, weight, scaling and ratio figures.
//!
//! | n | columns | content |
//! |---|---------|---------|
//! | 3 | phi2, phi3, dphi1 | Δφ₁ over the other two phase shifts |
//! | 4 | t_over_s, r_over_s, dphi1 | Δφ₁ over detection-weight ratios |
//! | 5 | beta, n_total, dphi1, dphi3, heisenberg | optimal vacuum sensitivity along a gain sweep |
//! | 6, 7 | beta2, alpha_abs, opt_ratio | optimal ratio for coherent light on port 1 (r/t) or 3 (t/s) |
//! | 8 | sweep_param, n_total, dphi1, heisenberg | fixed-combination sensitivity with coherent light |

use su12_core::interferometer::InterferometerConfig;
use su12_core::optimizer::{
    intensity_curve, optimal_ratio_surface, phase_surface, scaling_curve, weight_surface, InputKind, ScalingCurve, Surface,
    Sweep,
};
use su12_core::sensitivity::DetectorWeights;

use super::{axis, device, num, optimizer_error, schema, search_spec, Outcome, DEVICE_KEYS, SEARCH_KEYS};
use crate::error::{CliError, Result};
use crate::params::{key, Key, Params};
use crate::table::CsvTable;

fn device_without(names: &[&str]) -> Vec<Key> {
    DEVICE_KEYS.iter().copied().filter(|k| !names.contains(&k.name)).collect()
}

pub fn keys(n: u8) -> Result<Vec<Key>> {
    Ok(match n {
        3 => schema(&[
            &device_without(&["phi1", "phi2", "phi3"]),
            &[key("s", "1"), key("t", "0"), key("r", "1"), key("phi_lo", "-1"), key("phi_hi", "1"), key("phi_points", "41"), key("epsilon", "1e-3")],
        ]),
        4 => schema(&[&device_without(&["phi1"]), &[key("ratio_lo", "-3"), key("ratio_hi", "3"), key("ratio_points", "61"), key("epsilon", "1e-3")]]),
        5 => schema(&[
            &[key("panel", "a"), key("partner", "3"), key("sweep_lo", "0.5"), key("sweep_hi", "5"), key("sweep_points", "10")],
            &SEARCH_KEYS,
        ]),
        6 | 7 => schema(&[
            &[
                key("beta1", "3"),
                key("beta2_lo", "0.5"),
                key("beta2_hi", "5"),
                key("beta2_points", "10"),
                key("alpha_lo", "0"),
                key("alpha_hi", "10"),
                key("alpha_points", "11"),
            ],
            &SEARCH_KEYS,
        ]),
        8 => schema(&[
            &[key("panel", "a"), key("amplitude", "5"), key("gain", "3"), key("sweep_lo", ""), key("sweep_hi", ""), key("sweep_points", "")],
            &SEARCH_KEYS,
        ]),
        _ => return Err(CliError::usage(format!("figure must be one of 3, 4, 5, 6, 7, 8; got {n}"))),
    })
}

fn require_gain(cfg: &InterferometerConfig) -> Result<()> {
    if cfg.betas().iter().all(|b| *b == 0.0) {
        return Err(CliError::usage("all gains are zero: the sensitivity diverges everywhere on this figure"));
    }
    Ok(())
}

fn surface_table(n: u8, s: &Surface, provenance: Vec<(&'static str, String)>) -> CsvTable {
    let mut t = CsvTable::new(format!("figure {n}"), &[s.x_name, s.y_name, s.value_name], provenance);
    for (x, y, v) in s.rows() {
        t.push(vec![x, y, v]);
    }
    t
}

fn upper_half_slope(curve: &ScalingCurve, lo: f64, hi: f64) -> Option<f64> {
    curve.slope_dphi1(0.5 * (lo + hi), hi)
}

pub fn run(n: u8, p: &mut Params) -> Result<(CsvTable, Outcome)> {
    let mut out = Outcome::default();
    let table = match n {
        3 => {
            let (cfg, input) = device(p)?;
            require_gain(&cfg)?;
            let w = DetectorWeights::new(p.f64("s")?, p.f64("t")?, p.f64("r")?);
            if w.is_zero() {
                return Err(CliError::usage("detector weights s, t, r are all zero"));
            }
            let a = axis(p, "phi")?;
            let s = phase_surface(&cfg, &input, &w, &a, &a, p.f64("epsilon")?).map_err(optimizer_error)?;
            if let Some((ix, iy, v)) = s.argmin() {
                out.record("argmin_phi2", num(s.xs[ix]));
                out.record("argmin_phi3", num(s.ys[iy]));
                out.record("min_dphi1", num(v));
            }
            surface_table(n, &s, p.resolved())
        }
        4 => {
            let (cfg, input) = device(p)?;
            require_gain(&cfg)?;
            let a = axis(p, "ratio")?;
            let s = weight_surface(&cfg, &input, &a, &a, p.f64("epsilon")?).map_err(optimizer_error)?;
            if let Some((ix, iy, v)) = s.argmin() {
                out.record("argmin_t_over_s", num(s.xs[ix]));
                out.record("argmin_r_over_s", num(s.ys[iy]));
                out.record("min_dphi1", num(v));
            }
            surface_table(n, &s, p.resolved())
        }
        5 => {
            let partner = p.f64("partner")?;
            let sweep = match p.choice("panel", &["a", "b"])? {
                "a" => Sweep::FixBeta1(partner),
                _ => Sweep::FixBeta2(partner),
            };
            let gains = axis(p, "sweep")?;
            let spec = search_spec(p, None)?;
            let curve = scaling_curve(InputKind::Vacuum, sweep, &gains, &spec).map_err(optimizer_error)?;
            let mut t = CsvTable::new("figure 5", &["beta", "n_total", "dphi1", "dphi3", "heisenberg"], p.resolved());
            for q in &curve.points {
                t.push(vec![q.param, q.n_total, q.dphi1, q.dphi3, q.heisenberg]);
            }
            if let Some(slope) = upper_half_slope(&curve, gains.lo, gains.hi) {
                out.record("slope_dphi1_upper_half", num(slope));
            }
            t
        }
        6 | 7 => {
            let port = if n == 6 { 1 } else { 3 };
            let spec = search_spec(p, Some(port))?;
            let s = optimal_ratio_surface(port, p.f64("beta1")?, &axis(p, "beta2")?, &axis(p, "alpha")?, &spec)
                .map_err(optimizer_error)?;
            out.record("ratio", if port == 1 { "r_over_t" } else { "t_over_s" });
            out.record("undefined_cells", s.values.iter().filter(|v| v.is_nan()).count());
            surface_table(n, &s, p.resolved())
        }
        8 => {
            let panel = p.choice("panel", &["a", "b", "c", "d"])?;
            let port = if matches!(panel, "a" | "b") { 1 } else { 3 };
            let gain_sweep = matches!(panel, "a" | "c");
            let (lo, hi, pts) = if gain_sweep { ("1", "5", "9") } else { ("1", "10", "10") };
            for (k, v) in [("sweep_lo", lo), ("sweep_hi", hi), ("sweep_points", pts)] {
                if p.raw(k).is_empty() {
                    p.set(k, v)?;
                }
            }
            let sweep = axis(p, "sweep")?;
            let spec = search_spec(p, None)?;
            let curve = if gain_sweep {
                let kind = InputKind::Coherent { port, amplitude: p.f64("amplitude")? };
                scaling_curve(kind, Sweep::Diagonal, &sweep, &spec)
            } else {
                let g = p.f64("gain")?;
                intensity_curve(port, g, g, &sweep, &spec)
            }
            .map_err(optimizer_error)?;
            let mut t = CsvTable::new("figure 8", &["sweep_param", "n_total", "dphi1", "heisenberg"], p.resolved());
            for q in &curve.points {
                t.push(vec![q.param, q.n_total, q.dphi1, q.heisenberg]);
            }
            out.record("port", port);
            if let Some(slope) = upper_half_slope(&curve, sweep.lo, sweep.hi) {
                out.record("slope_dphi1_upper_half", num(slope));
            }
            t
        }
        _ => return Err(CliError::usage(format!("figure must be one of 3, 4, 5, 6, 7, 8; got {n}"))),
    };
    out.record("rows", table.rows.len());
    Ok((table, out))
}
