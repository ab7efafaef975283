//! Detection-weight search and the parameter sweeps behind the phase,
//! weight, gain and intensity studies.
//!
//! Everything here is a deterministic grid evaluation: no random restarts,
//! so identical inputs give bitwise-identical tables. Cells whose
//! sensitivity diverges are carried as `+∞` and never win a search.

use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::interferometer::{total_photon_number, InputState, InterferometerConfig};
use crate::matrix::C64;
use crate::sensitivity::{
    offset_scale, sensitivity_at_offset, zero_phase_limit, DetectorWeights, SensitivityError, SensitivityReport,
};

/// Evenly spaced samples `lo..=hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Axis {
    pub const fn new(lo: f64, hi: f64, points: usize) -> Self {
        Self { lo, hi, points }
    }

    pub fn step(&self) -> f64 {
        if self.points < 2 {
            0.0
        } else {
            (self.hi - self.lo) / (self.points - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return alloc::vec![self.lo];
        }
        let span = self.hi - self.lo;
        let last = (self.points - 1) as f64;
        (0..self.points).map(|i| self.lo + span * i as f64 / last).collect()
    }

    fn validate(&self) -> Result<(), OptimizerError> {
        if self.points == 0 || !self.lo.is_finite() || !self.hi.is_finite() || (self.points > 1 && self.hi <= self.lo) {
            return Err(OptimizerError::InvalidSpec("axis needs finite lo < hi and at least one point"));
        }
        Ok(())
    }
}

/// Grid search over detection-weight ratios.
///
/// One component is pinned to 1 (the reference), at most one is pinned to 0
/// (`fixed_zero`, one-based: 1 = s, 2 = t, 3 = r) and the rest are scanned
/// as ratios to the reference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightSearchSpec {
    pub fixed_zero: Option<usize>,
    pub ratio_axis: Axis,
    /// Each round halves the step and re-scans a 5-point stencil per free
    /// ratio around the incumbent.
    pub refinement_rounds: usize,
    /// Phase offset at which cells are scored, in units of
    /// [`offset_scale`] (so radians times `max(1, N_total)`).
    pub epsilon: f64,
}

impl Default for WeightSearchSpec {
    fn default() -> Self {
        Self { fixed_zero: None, ratio_axis: Axis::new(-3.0, 3.0, 61), refinement_rounds: 4, epsilon: 1e-3 }
    }
}

impl WeightSearchSpec {
    pub fn with_fixed_zero(mut self, component: usize) -> Self {
        self.fixed_zero = Some(component);
        self
    }

    /// `(reference, free)` as zero-based component indices.
    pub fn layout(&self) -> (usize, Vec<usize>) {
        let open: Vec<usize> = (0..3).filter(|&k| Some(k + 1) != self.fixed_zero).collect();
        (open[0], open[1..].to_vec())
    }

    /// Grid step after the last refinement round.
    pub fn final_step(&self) -> f64 {
        self.ratio_axis.step() / (1u64 << self.refinement_rounds) as f64
    }

    pub fn validate(&self) -> Result<(), OptimizerError> {
        if let Some(k) = self.fixed_zero {
            if !(1..=3).contains(&k) {
                return Err(OptimizerError::InvalidSpec("fixed_zero must name component 1, 2 or 3"));
            }
        }
        self.ratio_axis.validate()?;
        if self.ratio_axis.points < 2 {
            return Err(OptimizerError::InvalidSpec("ratio axis needs at least two points"));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(OptimizerError::InvalidSpec("epsilon must be positive"));
        }
        if self.refinement_rounds > 40 {
            return Err(OptimizerError::InvalidSpec("too many refinement rounds"));
        }
        Ok(())
    }

    fn weights(&self, ratios: &[f64]) -> DetectorWeights {
        let (reference, free) = self.layout();
        let mut w = [0.0; 3];
        w[reference] = 1.0;
        for (k, r) in free.iter().zip(ratios) {
            w[*k] = *r;
        }
        DetectorWeights::from_array(w)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OptimizerError {
    AllDivergent,
    InvalidSpec(&'static str),
    Sensitivity(SensitivityError),
}

impl fmt::Display for OptimizerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptimizerError::AllDivergent => f.write_str("every weight choice on the grid diverges"),
            OptimizerError::InvalidSpec(why) => write!(f, "invalid search: {why}"),
            OptimizerError::Sensitivity(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for OptimizerError {}

impl From<SensitivityError> for OptimizerError {
    fn from(e: SensitivityError) -> Self {
        OptimizerError::Sensitivity(e)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightOptimum {
    /// Normalized so the largest-magnitude component is 1.
    pub weights: DetectorWeights,
    /// Free ratios to the reference component, in [`WeightSearchSpec::layout`] order.
    pub ratios: Vec<f64>,
    /// Sensitivity of the winning weights: the zero-phase limit when it
    /// converges, otherwise the score at the offset.
    pub report: SensitivityReport,
    /// Best score after the coarse scan and after each refinement round.
    pub round_best: Vec<f64>,
    pub final_step: f64,
}

fn score(
    j: usize,
    cfg: &InterferometerConfig,
    input: &InputState,
    w: &DetectorWeights,
    epsilon: f64,
) -> f64 {
    match sensitivity_at_offset(j, epsilon, cfg, input, w) {
        Ok(r) if r.delta_phi.is_finite() => r.delta_phi,
        _ => f64::INFINITY,
    }
}

/// Relative gap under which two scores count as tied.
const TIE: f64 = 1e-9;

/// Lowest score; near-ties go to the candidate closest to the origin, then
/// to the earlier candidate. The tie rule picks a canonical member of the
/// flat valleys produced by conserved combinations.
fn pick(cands: &[(Vec<f64>, f64)]) -> Option<usize> {
    let best = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return None;
    }
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    let mut choice: Option<usize> = None;
    for (i, c) in cands.iter().enumerate() {
        if c.1 <= best * (1.0 + TIE) {
            match choice {
                Some(k) if norm(&cands[k].0) <= norm(&c.0) => {}
                _ => choice = Some(i),
            }
        }
    }
    choice
}

fn stencil(center: &[f64], step: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = alloc::vec![Vec::new()];
    for &c in center {
        let mut next = Vec::with_capacity(out.len() * 5);
        for prefix in &out {
            for k in -2i32..=2 {
                let mut p = prefix.clone();
                p.push(c + k as f64 * step);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn full_grid(axis: &Axis, dims: usize) -> Vec<Vec<f64>> {
    let vals = axis.values();
    let mut out: Vec<Vec<f64>> = alloc::vec![Vec::new()];
    for _ in 0..dims {
        let mut next = Vec::with_capacity(out.len() * vals.len());
        for prefix in &out {
            for &v in &vals {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Best detection weights for Δφⱼ: coarse grid, then step-halving
/// refinement around the incumbent.
pub fn optimize_weights(
    j: usize,
    cfg: &InterferometerConfig,
    input: &InputState,
    spec: &WeightSearchSpec,
) -> Result<WeightOptimum, OptimizerError> {
    spec.validate()?;
    cfg.validate().map_err(SensitivityError::from)?;
    if !(1..=3).contains(&j) {
        return Err(SensitivityError::BadPhaseIndex(j).into());
    }
    let (_, free) = spec.layout();
    let eps = spec.epsilon * offset_scale(cfg, input);
    let eval = |points: Vec<Vec<f64>>| -> Vec<(Vec<f64>, f64)> {
        points
            .into_iter()
            .map(|p| {
                let s = score(j, cfg, input, &spec.weights(&p), eps);
                (p, s)
            })
            .collect()
    };
    let coarse = eval(full_grid(&spec.ratio_axis, free.len()));
    let i = pick(&coarse).ok_or(OptimizerError::AllDivergent)?;
    let (mut center, mut best) = coarse[i].clone();
    let mut round_best = alloc::vec![best];
    let mut step = spec.ratio_axis.step();
    for _ in 0..spec.refinement_rounds {
        step /= 2.0;
        let cands = eval(stencil(&center, step));
        // the stencil contains the incumbent, so a winner always exists
        let k = pick(&cands).expect("incumbent is finite");
        if cands[k].1 <= best {
            center = cands[k].0.clone();
            best = cands[k].1;
        }
        round_best.push(best);
    }
    let w = spec.weights(&center);
    let report = match zero_phase_limit(j, cfg, input, &w) {
        Ok(r) => r,
        Err(_) => sensitivity_at_offset(j, eps, cfg, input, &w)?,
    };
    Ok(WeightOptimum { weights: w.normalized(), ratios: center, report, round_best, final_step: step })
}

/// A scalar field sampled on a rectangular grid, stored with `x` outer.
#[derive(Clone, Debug, PartialEq)]
pub struct Surface {
    pub x_name: &'static str,
    pub y_name: &'static str,
    pub value_name: &'static str,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// `+∞` marks divergent cells, NaN cells with no answer at all.
    pub values: Vec<f64>,
}

impl Surface {
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[ix * self.ys.len() + iy]
    }

    /// Smallest finite cell as `(ix, iy, value)`; near-ties go to the cell
    /// closest to the origin, as in the weight search.
    pub fn argmin(&self) -> Option<(usize, usize, f64)> {
        let mut cands = Vec::with_capacity(self.values.len());
        let mut index = Vec::with_capacity(self.values.len());
        for ix in 0..self.xs.len() {
            for iy in 0..self.ys.len() {
                cands.push((alloc::vec![self.xs[ix], self.ys[iy]], self.get(ix, iy)));
                index.push((ix, iy));
            }
        }
        pick(&cands).map(|k| (index[k].0, index[k].1, cands[k].1))
    }

    /// Rows `(x, y, value)` in storage order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.xs
            .iter()
            .enumerate()
            .flat_map(move |(ix, &x)| self.ys.iter().enumerate().map(move |(iy, &y)| (x, y, self.get(ix, iy))))
    }
}

fn surface(
    names: (&'static str, &'static str, &'static str),
    xa: &Axis,
    ya: &Axis,
    mut f: impl FnMut(f64, f64) -> f64,
) -> Result<Surface, OptimizerError> {
    xa.validate()?;
    ya.validate()?;
    let (xs, ys) = (xa.values(), ya.values());
    let mut values = Vec::with_capacity(xs.len() * ys.len());
    for &x in &xs {
        for &y in &ys {
            values.push(f(x, y));
        }
    }
    Ok(Surface { x_name: names.0, y_name: names.1, value_name: names.2, xs, ys, values })
}

/// Δφ₁ over a grid of φ₂, φ₃, scored at φ₁ = ε·[`offset_scale`].
pub fn phase_surface(
    cfg: &InterferometerConfig,
    input: &InputState,
    w: &DetectorWeights,
    phi2: &Axis,
    phi3: &Axis,
    epsilon: f64,
) -> Result<Surface, OptimizerError> {
    cfg.validate().map_err(SensitivityError::from)?;
    let eps = epsilon * offset_scale(cfg, input);
    surface(("phi2", "phi3", "dphi1"), phi2, phi3, |p2, p3| {
        let c = cfg.with_phase(2, p2).with_phase(3, p3);
        score(1, &c, input, w, eps)
    })
}

/// Δφ₁ for weights `(1, t/s, r/s)`, scored at φ₁ = ε·[`offset_scale`].
pub fn weight_surface(
    cfg: &InterferometerConfig,
    input: &InputState,
    t_over_s: &Axis,
    r_over_s: &Axis,
    epsilon: f64,
) -> Result<Surface, OptimizerError> {
    cfg.validate().map_err(SensitivityError::from)?;
    let eps = epsilon * offset_scale(cfg, input);
    surface(("t_over_s", "r_over_s", "dphi1"), t_over_s, r_over_s, |t, r| {
        score(1, cfg, input, &DetectorWeights::new(1.0, t, r), eps)
    })
}

/// What enters the interferometer in a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InputKind {
    Vacuum,
    /// Real amplitude `|α|` on one port (one-based).
    Coherent { port: usize, amplitude: f64 },
}

impl InputKind {
    pub fn state(&self) -> InputState {
        match *self {
            InputKind::Vacuum => InputState::vacuum(),
            InputKind::Coherent { port, amplitude } => InputState::coherent(port, C64::new(amplitude, 0.0)),
        }
    }
}

/// Fixed detection combination for a coherent beam on `port`: with light on
/// port 1 the probe count must be dropped (`n̂₁₃ + n̂₁₄`); port 2 uses
/// `n̂₁₂ + n̂₁₄` and port 3 uses `n̂₁₂ + n̂₁₃`.
pub fn coherent_detection(port: usize) -> DetectorWeights {
    match port {
        1 => DetectorWeights::new(0.0, 1.0, 1.0),
        2 => DetectorWeights::new(1.0, 0.0, 1.0),
        _ => DetectorWeights::new(1.0, 1.0, 0.0),
    }
}

/// Which gain is swept.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sweep {
    /// β₁ held at the value, β₂ swept.
    FixBeta1(f64),
    /// β₂ held at the value, β₁ swept.
    FixBeta2(f64),
    /// β₁ = β₂ swept together.
    Diagonal,
}

impl Sweep {
    pub fn gains(&self, g: f64) -> (f64, f64) {
        match *self {
            Sweep::FixBeta1(b1) => (b1, g),
            Sweep::FixBeta2(b2) => (g, b2),
            Sweep::Diagonal => (g, g),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingPoint {
    /// The swept quantity (a gain or `|α|`).
    pub param: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub n_total: f64,
    pub dphi1: f64,
    pub dphi3: f64,
    /// `1/N_total`.
    pub heisenberg: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScalingCurve {
    pub points: Vec<ScalingPoint>,
}

impl ScalingCurve {
    /// Least-squares slope of `ln Δφ₁` against `ln N_total` over points with
    /// `param ∈ [lo, hi]`.
    pub fn slope_dphi1(&self, lo: f64, hi: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .points
            .iter()
            .filter(|p| p.param >= lo && p.param <= hi)
            .map(|p| (p.n_total, p.dphi1))
            .collect();
        loglog_slope(&pts)
    }
}

/// Least-squares slope of `ln y` against `ln x`; needs two positive points.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Zero-phase limit, falling back to the offset score when the
/// extrapolation does not settle.
fn limit_or_offset(j: usize, cfg: &InterferometerConfig, input: &InputState, w: &DetectorWeights, eps: f64) -> f64 {
    match zero_phase_limit(j, cfg, input, w) {
        Ok(r) => r.delta_phi,
        Err(SensitivityError::NonConvergent { .. }) => score(j, cfg, input, w, eps * offset_scale(cfg, input)),
        Err(_) => f64::INFINITY,
    }
}

fn scaling_point(
    kind: &InputKind,
    param: f64,
    beta1: f64,
    beta2: f64,
    spec: &WeightSearchSpec,
) -> Result<ScalingPoint, OptimizerError> {
    let cfg = InterferometerConfig::balanced(beta1, beta2);
    let input = kind.state();
    let (dphi1, dphi3) = match kind {
        InputKind::Vacuum => {
            let best = |j| match optimize_weights(j, &cfg, &input, spec) {
                Ok(o) => Ok(o.report.delta_phi),
                Err(OptimizerError::AllDivergent) => Ok(f64::INFINITY),
                Err(e) => Err(e),
            };
            (best(1)?, best(3)?)
        }
        InputKind::Coherent { port, .. } => {
            let w = coherent_detection(*port);
            (limit_or_offset(1, &cfg, &input, &w, spec.epsilon), limit_or_offset(3, &cfg, &input, &w, spec.epsilon))
        }
    };
    let n_total = total_photon_number(&cfg, &input);
    Ok(ScalingPoint { param, beta1, beta2, n_total, dphi1, dphi3, heisenberg: 1.0 / n_total })
}

/// Sensitivity against internal photon number along a gain sweep. Vacuum
/// inputs use optimized weights; coherent inputs use [`coherent_detection`].
pub fn scaling_curve(
    kind: InputKind,
    sweep: Sweep,
    gains: &Axis,
    spec: &WeightSearchSpec,
) -> Result<ScalingCurve, OptimizerError> {
    gains.validate()?;
    let points = gains
        .values()
        .into_iter()
        .map(|g| {
            let (b1, b2) = sweep.gains(g);
            scaling_point(&kind, g, b1, b2, spec)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ScalingCurve { points })
}

/// Sensitivity against internal photon number as the coherent amplitude on
/// `port` grows at fixed gains.
pub fn intensity_curve(
    port: usize,
    beta1: f64,
    beta2: f64,
    amplitudes: &Axis,
    spec: &WeightSearchSpec,
) -> Result<ScalingCurve, OptimizerError> {
    amplitudes.validate()?;
    let points = amplitudes
        .values()
        .into_iter()
        .map(|a| scaling_point(&InputKind::Coherent { port, amplitude: a }, a, beta1, beta2, spec))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ScalingCurve { points })
}

/// Optimal free ratio for a coherent beam on `port`, with that port's
/// weight pinned to zero: r/t for port 1, r/s for port 2, t/s for port 3.
/// Cells where every choice diverges hold NaN.
pub fn optimal_ratio_surface(
    port: usize,
    beta1: f64,
    beta2: &Axis,
    amplitude: &Axis,
    spec: &WeightSearchSpec,
) -> Result<Surface, OptimizerError> {
    if !(1..=3).contains(&port) {
        return Err(OptimizerError::InvalidSpec("port must be 1, 2 or 3"));
    }
    let spec = spec.with_fixed_zero(port);
    spec.validate()?;
    let mut failure = None;
    let s = surface(("beta2", "alpha_abs", "opt_ratio"), beta2, amplitude, |b2, a| {
        let cfg = InterferometerConfig::balanced(beta1, b2);
        let input = InputState::coherent(port, C64::new(a, 0.0));
        match optimize_weights(1, &cfg, &input, &spec) {
            Ok(o) => o.ratios[0],
            Err(OptimizerError::AllDivergent) => f64::NAN,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_values_hit_endpoints() {
        let a = Axis::new(-3.0, 3.0, 61);
        let v = a.values();
        assert_eq!(v[0], -3.0);
        assert_eq!(v[30], 0.0);
        assert_eq!(v[60], 3.0);
        assert!((a.step() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn default_refinement_reaches_hundredth() {
        assert!(WeightSearchSpec::default().final_step() <= 0.01);
    }

    #[test]
    fn layout_respects_fixed_zero() {
        let s = WeightSearchSpec::default();
        assert_eq!(s.layout(), (0, alloc::vec![1, 2]));
        assert_eq!(s.with_fixed_zero(1).layout(), (1, alloc::vec![2]));
        assert_eq!(s.with_fixed_zero(3).layout(), (0, alloc::vec![1]));
        assert_eq!(s.with_fixed_zero(1).weights(&[0.5]), DetectorWeights::new(0.0, 1.0, 0.5));
    }

    #[test]
    fn no_gain_is_all_divergent() {
        let cfg = InterferometerConfig::balanced(0.0, 0.0);
        let r = optimize_weights(1, &cfg, &InputState::vacuum(), &WeightSearchSpec::default());
        assert_eq!(r, Err(OptimizerError::AllDivergent));
    }

    #[test]
    fn refinement_never_gets_worse() {
        let cfg = InterferometerConfig::balanced(2.0, 2.5);
        let o = optimize_weights(1, &cfg, &InputState::vacuum(), &WeightSearchSpec::default()).unwrap();
        assert!(o.round_best.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(o.round_best.len(), 5);
    }

    #[test]
    fn tie_break_prefers_origin() {
        let c = alloc::vec![(alloc::vec![1.0, 1.0], 2.0), (alloc::vec![0.0, 0.0], 2.0 * (1.0 + 1e-12)), (alloc::vec![3.0, 0.0], 5.0)];
        assert_eq!(pick(&c), Some(1));
        let c = alloc::vec![(alloc::vec![1.0], f64::INFINITY)];
        assert_eq!(pick(&c), None);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..6).map(|k| (k as f64, 3.0 / k as f64)).collect();
        assert!((loglog_slope(&pts).unwrap() + 1.0).abs() < 1e-12);
        assert!(loglog_slope(&pts[..1]).is_none());
    }

    #[test]
    fn surface_argmin_and_rows() {
        let s = surface(("x", "y", "v"), &Axis::new(0.0, 1.0, 3), &Axis::new(0.0, 1.0, 2), |x, y| (x - 0.5).powi(2) + y).unwrap();
        assert_eq!(s.argmin(), Some((1, 0, 0.0)));
        assert_eq!(s.rows().count(), 6);
    }
}
