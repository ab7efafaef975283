//! Phase sensitivity of weighted photon-number estimators
//! `Ê = s·n̂₁₂ + t·n̂₁₃ + r·n̂₁₄`:
//! `Δφⱼ = √Var(Ê) / |∂⟨Ê⟩/∂φⱼ|`.
//!
//! At the balanced zero-phase point both numerator and denominator vanish,
//! so the useful number there is the limit φⱼ → 0, extracted by evaluating
//! at small offsets and Richardson-extrapolating.
//!
//! The module also carries the closed-form reference expressions and an
//! independent route through the adjoint representation (vacuum input only)
//! that propagates K₇ and K₈ instead of mode operators.

use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;


use crate::gaussian::{estimator_stats, moments_through, photon_statistics, split_blocks};
use crate::interferometer::{
    back_transform, phase_matrix, phase_matrix_derivative, stage_transform, total_photon_number,
    ConfigError, InputState, InterferometerConfig, ModePair, Stage,
};
use crate::lie::{adjoint_rep, conjugation_action, GeneratorIndex};
use crate::matrix::{Matrix8, C64, I};

/// Coefficients (s, t, r) of the estimator `s·n̂₁₂ + t·n̂₁₃ + r·n̂₁₄`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorWeights {
    pub s: f64,
    pub t: f64,
    pub r: f64,
}

impl DetectorWeights {
    pub const fn new(s: f64, t: f64, r: f64) -> Self {
        Self { s, t, r }
    }

    pub fn from_array(w: [f64; 3]) -> Self {
        Self::new(w[0], w[1], w[2])
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.s, self.t, self.r]
    }

    pub fn is_zero(&self) -> bool {
        self.s == 0.0 && self.t == 0.0 && self.r == 0.0
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::new(c * self.s, c * self.t, c * self.r)
    }

    /// Rescaled so the largest-magnitude component is +1.
    pub fn normalized(&self) -> Self {
        let w = self.as_array();
        let mut lead = w[0];
        for &x in &w[1..] {
            if x.abs() > lead.abs() {
                lead = x;
            }
        }
        if lead == 0.0 {
            *self
        } else {
            self.scaled(1.0 / lead)
        }
    }

    fn l1(&self) -> f64 {
        self.s.abs() + self.t.abs() + self.r.abs()
    }
}

/// How a [`SensitivityReport`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    AtPoint,
    ZeroPhaseLimit,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::AtPoint => "at-point",
            Method::ZeroPhaseLimit => "zero-phase-limit",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DerivativeMode {
    Analytic,
    /// Central differences with step `h` (radians).
    Numeric(f64),
}

/// Default central-difference step.
pub const DEFAULT_NUMERIC_STEP: f64 = 1e-5;

/// Phase offsets used by [`zero_phase_limit`] before scaling by
/// [`offset_scale`], largest first.
pub const LIMIT_OFFSETS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// `1/max(1, N_total)`.
///
/// Away from zero phase, Δφ deviates from its limit by a relative amount
/// of order `(φN)²`, so offsets probing the limit must shrink with the
/// photon number. Unscaled offsets overshoot the limit by 2x already near
/// `N ≈ 5000`.
pub fn offset_scale(cfg: &InterferometerConfig, input: &InputState) -> f64 {
    1.0 / total_photon_number(cfg, input).max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensitivityReport {
    /// Which φ (1, 2 or 3).
    pub phase_index: usize,
    pub delta_phi: f64,
    /// ∂⟨Ê⟩/∂φⱼ in photons per radian.
    pub mean_derivative: f64,
    /// √Var(Ê) in photons.
    pub estimator_sd: f64,
    pub n_total: f64,
    pub method: Method,
    /// Value of φⱼ at which `mean_derivative` and `estimator_sd` were taken.
    /// For [`Method::AtPoint`], `delta_phi = estimator_sd / |mean_derivative|`;
    /// for the limit these are the smallest-offset evaluation.
    pub phase: f64,
    /// |extrapolated − smallest-offset value|; zero for `AtPoint`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SensitivityError {
    ZeroWeights,
    BadPhaseIndex(usize),
    InvalidConfig(ConfigError),
    /// The estimator mean does not move with the phase; the sensitivity is
    /// unbounded (or 0/0 when `estimator_sd` is also zero).
    Divergent { estimator_sd: f64 },
    /// The offset evaluations do not converge monotonically.
    NonConvergent { values: [f64; 3] },
}

impl fmt::Display for SensitivityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SensitivityError::ZeroWeights => f.write_str("detector weights are all zero"),
            SensitivityError::BadPhaseIndex(j) => write!(f, "phase index must be 1, 2 or 3, got {j}"),
            SensitivityError::InvalidConfig(e) => write!(f, "invalid configuration: {e}"),
            SensitivityError::Divergent { estimator_sd } => {
                write!(f, "sensitivity diverges (zero mean derivative, estimator sd {estimator_sd:.6e})")
            }
            SensitivityError::NonConvergent { values } => write!(
                f,
                "zero-phase limit does not converge: {:.6e}, {:.6e}, {:.6e}",
                values[0], values[1], values[2]
            ),
        }
    }
}

impl core::error::Error for SensitivityError {}

impl From<ConfigError> for SensitivityError {
    fn from(e: ConfigError) -> Self {
        SensitivityError::InvalidConfig(e)
    }
}

fn check_phase_index(j: usize) -> Result<(), SensitivityError> {
    if (1..=3).contains(&j) {
        Ok(())
    } else {
        Err(SensitivityError::BadPhaseIndex(j))
    }
}

fn estimator_mean(cfg: &InterferometerConfig, input: &InputState, w: &DetectorWeights) -> f64 {
    let ps = photon_statistics(&moments_through(&stage_transform(cfg, Stage::Final), input));
    estimator_stats(&ps, w).mean
}

/// `∂⟨s·n̂₁₂ + t·n̂₁₃ + r·n̂₁₄⟩/∂φⱼ`.
///
/// The analytic route differentiates only the phase factor,
/// `dS = S₄S₃·dP·S₂S₁`, and pushes `dS` through
/// `⟨n̂ₖ⟩ = Σₗ|Bₖₗ|² + |μₖ|²` by the product rule.
pub fn mean_derivative(
    j: usize,
    cfg: &InterferometerConfig,
    input: &InputState,
    w: &DetectorWeights,
    mode: DerivativeMode,
) -> f64 {
    match mode {
        DerivativeMode::Analytic => {
            let front = stage_transform(cfg, Stage::AfterFwm2);
            let back = back_transform(cfg);
            let s = back * phase_matrix(&cfg.phases) * front;
            let ds = back.0 * phase_matrix_derivative(&cfg.phases, j) * front.0;
            let (a, b) = split_blocks(&s.0);
            let (da, db) = split_blocks(&ds);
            let alpha = input.alpha;
            let alpha_bar: [C64; 3] = core::array::from_fn(|k| alpha[k].conj());
            let (mu_a, mu_b) = (a * alpha, b * alpha_bar);
            let (dmu_a, dmu_b) = (da * alpha, db * alpha_bar);
            let w = w.as_array();
            let mut total = 0.0;
            for k in 0..3 {
                let mu = mu_a[k] + mu_b[k];
                let dmu = dmu_a[k] + dmu_b[k];
                let mut d = 2.0 * (mu.conj() * dmu).re;
                for l in 0..3 {
                    d += 2.0 * (b[(k, l)].conj() * db[(k, l)]).re;
                }
                total += w[k] * d;
            }
            total
        }
        DerivativeMode::Numeric(h) => {
            let phi = cfg.phases.phi[j - 1];
            let plus = estimator_mean(&cfg.with_phase(j, phi + h), input, w);
            let minus = estimator_mean(&cfg.with_phase(j, phi - h), input, w);
            (plus - minus) / (2.0 * h)
        }
    }
}

/// Below this a derivative is rounding noise: the estimator mean is a
/// quartic form in entries of size up to `κ = max|S₂S₁|`, scaled by the
/// input intensity and the weights.
fn zero_derivative_threshold(cfg: &InterferometerConfig, input: &InputState, w: &DetectorWeights) -> f64 {
    let kappa = stage_transform(cfg, Stage::AfterFwm2).0.max_abs().max(1.0);
    let intensity: f64 = input.intensities().iter().sum();
    1e-13 * (1.0 + intensity) * kappa.powi(4) * w.l1()
}

/// Δφⱼ evaluated at the phases in `cfg`.
pub fn phase_sensitivity(
    j: usize,
    cfg: &InterferometerConfig,
    input: &InputState,
    w: &DetectorWeights,
) -> Result<SensitivityReport, SensitivityError> {
    check_phase_index(j)?;
    if w.is_zero() {
        return Err(SensitivityError::ZeroWeights);
    }
    cfg.validate()?;
    let ps = photon_statistics(&moments_through(&stage_transform(cfg, Stage::Final), input));
    let sd = estimator_stats(&ps, w).variance.sqrt();
    let d = mean_derivative(j, cfg, input, w, DerivativeMode::Analytic);
    if !(d.abs() > zero_derivative_threshold(cfg, input, w)) {
        return Err(SensitivityError::Divergent { estimator_sd: sd });
    }
    Ok(SensitivityReport {
        phase_index: j,
        delta_phi: sd / d.abs(),
        mean_derivative: d,
        estimator_sd: sd,
        n_total: total_photon_number(cfg, input),
        method: Method::AtPoint,
        phase: cfg.phases.phi[j - 1],
        residual: 0.0,
    })
}

/// Δφⱼ with φⱼ replaced by `offset`, other phases as in `cfg`.
pub fn sensitivity_at_offset(
    j: usize,
    offset: f64,
    cfg: &InterferometerConfig,
    input: &InputState,
    w: &DetectorWeights,
) -> Result<SensitivityReport, SensitivityError> {
    check_phase_index(j)?;
    phase_sensitivity(j, &cfg.with_phase(j, offset), input, w)
}

/// Richardson extrapolation of three samples taken at offsets shrinking by a
/// constant factor of ten, with the convergence order estimated from the
/// samples. Returns `(limit, residual)`.
pub fn richardson_limit(values: [f64; 3]) -> Result<(f64, f64), SensitivityError> {
    let [f1, f2, f3] = values;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(SensitivityError::NonConvergent { values });
    }
    let d1 = f1 - f2;
    let d2 = f2 - f3;
    let flat = 1e-12 * f3.abs();
    if d1.abs() <= flat && d2.abs() <= flat {
        return Ok((f3, d2.abs()));
    }
    if d1 * d2 <= 0.0 || d2.abs() >= d1.abs() {
        return Err(SensitivityError::NonConvergent { values });
    }
    // d1/d2 = 10^p, and the tail of the geometric series is d2/(10^p − 1)
    let correction = d2 * d2 / (d1 - d2);
    let limit = f3 - correction;
    Ok((limit, correction.abs()))
}

/// `lim_{φⱼ→0} Δφⱼ`, from evaluations at [`LIMIT_OFFSETS`] times
/// [`offset_scale`].
pub fn zero_phase_limit(
    j: usize,
    cfg: &InterferometerConfig,
    input: &InputState,
    w: &DetectorWeights,
) -> Result<SensitivityReport, SensitivityError> {
    check_phase_index(j)?;
    cfg.validate()?;
    let scale = offset_scale(cfg, input);
    let mut reports = [None; 3];
    for (slot, &eps) in reports.iter_mut().zip(LIMIT_OFFSETS.iter()) {
        *slot = Some(sensitivity_at_offset(j, eps * scale, cfg, input, w)?);
    }
    let reports = reports.map(|r| r.expect("filled above"));
    let (limit, residual) = richardson_limit(reports.map(|r| r.delta_phi))?;
    let last = reports[2];
    Ok(SensitivityReport { delta_phi: limit, method: Method::ZeroPhaseLimit, residual, ..last })
}

// ---------------------------------------------------------------------------
// Closed forms

/// High-gain optimal vacuum sensitivity `2 / (cosh β₁ cosh β₂)`.
pub fn heisenberg_asymptote(beta1: f64, beta2: f64) -> f64 {
    2.0 / (beta1.cosh() * beta2.cosh())
}

/// Sensitivity of a single SU(1,1) interferometer with gain β, `1/sinh β`.
pub fn su11_sensitivity(beta: f64) -> Result<f64, SensitivityError> {
    if beta > 0.0 {
        Ok(1.0 / beta.sinh())
    } else {
        Err(SensitivityError::Divergent { estimator_sd: 0.0 })
    }
}

/// Δφ₁ of `n̂₁₂ + n̂₁₃` when `φ₁ + θ₃ = π`, as a function of `x = φ₁ + θ₄`:
///
/// `sinh β₁ |cos(x/2)| √(2sinh²β₁ cos x + cosh 2β₁ + 3) / (cosh²(β₂/2) sinh²β₁ |sin x|)`.
pub fn sum_estimator_sensitivity(beta1: f64, beta2: f64, x: f64) -> Result<f64, SensitivityError> {
    let sin_x = x.sin().abs();
    let sh1 = beta1.sinh();
    let denom = (beta2 / 2.0).cosh().powi(2) * sh1 * sh1 * sin_x;
    if !(denom > 0.0) || sin_x < 1e-15 {
        return Err(SensitivityError::Divergent { estimator_sd: 0.0 });
    }
    let radicand = 2.0 * sh1 * sh1 * x.cos() + (2.0 * beta1).cosh() + 3.0;
    Ok(sh1 * (x / 2.0).cos().abs() * radicand.max(0.0).sqrt() / denom)
}

/// Large-β₁ form of [`sum_estimator_sensitivity`]:
/// `√(2cos x + 2) |cos(x/2)| / (cosh²(β₂/2) |sin x|)`.
pub fn sum_estimator_sensitivity_high_gain(beta2: f64, x: f64) -> Result<f64, SensitivityError> {
    let sin_x = x.sin().abs();
    if sin_x < 1e-15 {
        return Err(SensitivityError::Divergent { estimator_sd: 0.0 });
    }
    let num = (2.0 * x.cos() + 2.0).max(0.0).sqrt() * (x / 2.0).cos().abs();
    Ok(num / ((beta2 / 2.0).cosh().powi(2) * sin_x))
}

/// `lim_{φ₁→0}` Δφ₁ of `n̂₁₂ + n̂₁₃` at `θ₃ = θ₄ = π`:
///
/// `2√(4cosh⁴(β₂/2)sinh²β₁ + cosh²(β₁/2)sinh²β₂)
///  / (4cosh²(β₂/2)sinh²β₁ + sinh²β₂ cosh β₁ (1 + cosh β₁))`.
pub fn sum_estimator_zero_phase_limit(beta1: f64, beta2: f64) -> Result<f64, SensitivityError> {
    let (sh1, sh2) = (beta1.sinh(), beta2.sinh());
    let (c1h, c2h) = ((beta1 / 2.0).cosh(), (beta2 / 2.0).cosh());
    let num = 2.0 * (4.0 * c2h.powi(4) * sh1 * sh1 + c1h * c1h * sh2 * sh2).sqrt();
    let den = 4.0 * c2h * c2h * sh1 * sh1 + sh2 * sh2 * beta1.cosh() * (1.0 + beta1.cosh());
    if !(den > 0.0) {
        return Err(SensitivityError::Divergent { estimator_sd: 0.0 });
    }
    Ok(num / den)
}

// ---------------------------------------------------------------------------
// Adjoint-representation route

/// Observables of the form `½(n̂₁₂+n̂₁₃+1)` and `(n̂₁₂−n̂₁₃+2n̂₁₄+1)/(2√3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KObservable {
    K7,
    K8,
}

impl KObservable {
    /// Detector weights with the same sensitivity; additive constants and
    /// overall scale cancel in the ratio.
    pub fn weights(self) -> DetectorWeights {
        match self {
            KObservable::K7 => DetectorWeights::new(1.0, 1.0, 0.0),
            KObservable::K8 => DetectorWeights::new(1.0, -1.0, 2.0),
        }
    }

    fn index(self) -> usize {
        match self {
            KObservable::K7 => 6,
            KObservable::K8 => 7,
        }
    }
}

/// Mean, variance and phase derivative of an output K observable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KRouteResult {
    pub mean: f64,
    pub variance: f64,
    pub derivative: f64,
    pub delta_phi: f64,
}

/// Vacuum first moments of K₁..K₈.
pub fn vacuum_k_means() -> [f64; 8] {
    let mut m = [0.0; 8];
    m[6] = 0.5;
    m[7] = 0.5 / 3.0f64.sqrt();
    m
}

/// Symmetrized vacuum covariances of K₁..K₈: ¼ on K₁..K₄, zero elsewhere.
pub fn vacuum_k_covariance() -> [[f64; 8]; 8] {
    let mut c = [[0.0; 8]; 8];
    for (i, row) in c.iter_mut().enumerate().take(4) {
        row[i] = 0.25;
    }
    c
}

/// Coefficients of the mixer Hamiltonian `β(sin θ K_a − cos θ K_b)`; the
/// gate is its `exp(−i·)`.
fn fwm_hamiltonian(beta: f64, theta: f64, pair: ModePair) -> [f64; 8] {
    let (a, b) = match pair {
        ModePair::Modes12 => (0, 1),
        ModePair::Modes13 => (2, 3),
    };
    let mut c = [0.0; 8];
    c[a] = beta * theta.sin();
    c[b] = -beta * theta.cos();
    c
}

/// `Σφₖn̂ₖ = (φ₁+φ₂)K₇ + (φ₁−φ₂+2φ₃)/√3·K₈` up to the conserved
/// combination and a constant; the phase gate is `exp(+iΣφₖn̂ₖ)`.
fn phase_k_coefficients(phi: [f64; 3]) -> (f64, f64) {
    (phi[0] + phi[1], (phi[0] - phi[1] + 2.0 * phi[2]) / 3.0f64.sqrt())
}

/// Δφⱼ of K₇ or K₈ for vacuum input, computed by conjugating the algebra
/// through the device: `K_out = M₄M₃M_PM₂M₁·K` with `M = exp(i·ad G)` for
/// each gate `exp(−iG)`.
pub fn k_route_sensitivity(
    j: usize,
    cfg: &InterferometerConfig,
    obs: KObservable,
) -> Result<KRouteResult, SensitivityError> {
    check_phase_index(j)?;
    cfg.validate()?;
    let gate = |k: usize| {
        let p = cfg.fwm[k];
        conjugation_action(&fwm_hamiltonian(p.beta, p.theta, p.pair))
    };
    let (x, y) = phase_k_coefficients(cfg.phases.phi);
    let mut phase_coeffs = [0.0; 8];
    phase_coeffs[6] = -x;
    phase_coeffs[7] = -y;
    let mp = conjugation_action(&phase_coeffs);
    // d/dφⱼ of exp(−i(x·ad K₇ + y·ad K₈)); the two commute
    let mut unit = [0.0; 3];
    unit[j - 1] = 1.0;
    let (dx, dy) = phase_k_coefficients(unit);
    let ad7 = adjoint_rep(GeneratorIndex::new(7).expect("valid")).0;
    let ad8 = adjoint_rep(GeneratorIndex::new(8).expect("valid")).0;
    let dmp = (ad7.scale(C64::new(dx, 0.0)) + ad8.scale(C64::new(dy, 0.0))).scale(-I) * mp;

    let back = gate(3) * gate(2);
    let front = gate(1) * gate(0);
    let m: Matrix8 = back * mp * front;
    let dm: Matrix8 = back * dmp * front;

    let row = obs.index();
    let coeff: [f64; 8] = core::array::from_fn(|k| m[(row, k)].re);
    let dcoeff: [f64; 8] = core::array::from_fn(|k| dm[(row, k)].re);
    let means = vacuum_k_means();
    let cov = vacuum_k_covariance();
    let mean = (0..8).map(|k| coeff[k] * means[k]).sum();
    let derivative: f64 = (0..8).map(|k| dcoeff[k] * means[k]).sum();
    let mut variance = 0.0;
    for a in 0..8 {
        for b in 0..8 {
            variance += coeff[a] * cov[a][b] * coeff[b];
        }
    }
    let sd = variance.max(0.0).sqrt();
    let scale = m.max_abs().max(1.0);
    if !(derivative.abs() > 1e-13 * scale) {
        return Err(SensitivityError::Divergent { estimator_sd: sd });
    }
    Ok(KRouteResult { mean, variance, derivative, delta_phi: sd / derivative.abs() })
}
