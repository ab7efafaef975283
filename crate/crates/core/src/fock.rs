//! Brute-force simulation on a truncated three-mode Fock space.
//!
//! Amplitudes live on `n₁, n₂, n₃ < D`. Each mixer conserves the photon
//! difference between the probe and its idler and leaves the third mode
//! alone, so its generator splits into independent tridiagonal chains.
//! A diagonal phase gauge makes every chain real symmetric; the gate is then
//! exact through the chain's eigendecomposition. Chains are extended past the
//! cutoff so the weight that would escape the truncated space is measured
//! rather than silently reflected, and any gate losing more than
//! [`LEAKAGE_LIMIT`] is refused.
//!
//! Gate calibration: the mixer acts as `U = exp(−iG)` with
//! `G = β(sin θ K_a − cos θ K_b)`, i.e. `U = exp(½β(e^{−iθ}â₁†âₖ† − e^{iθ}â₁âₖ))`,
//! so that `U†â₁U = cosh(β/2)â₁ + e^{−iθ}sinh(β/2)âₖ†` matches the mode
//! matrix. The phase gate is `exp(iΣφₖn̂ₖ)`, giving `âₖ → e^{iφₖ}âₖ`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
#[allow(unused_imports)]
use num_traits::Float;

use crate::gaussian::{EstimatorStats, PhotonStatistics};
use crate::interferometer::{FwmParams, InputState, InterferometerConfig, ModePair, PhaseShifts};
use crate::lie::GeneratorIndex;
use crate::matrix::{C64, I, ZERO};
use crate::sensitivity::DetectorWeights;

/// Default per-mode cutoff (photon numbers 0..=13).
pub const DEFAULT_CUTOFF: usize = 14;
/// Largest probability a single gate or state preparation may lose.
pub const LEAKAGE_LIMIT: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub enum OracleError {
    CutoffTooSmall(usize),
    LeakageExceeded { stage: &'static str, leakage: f64 },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::CutoffTooSmall(d) => write!(f, "cutoff must be at least 2, got {d}"),
            OracleError::LeakageExceeded { stage, leakage } => write!(
                f,
                "{stage} loses {leakage:.3e} of the norm past the cutoff (limit {LEAKAGE_LIMIT:e})"
            ),
        }
    }
}

impl core::error::Error for OracleError {}

fn check_cutoff(d: usize) -> Result<(), OracleError> {
    if d >= 2 {
        Ok(())
    } else {
        Err(OracleError::CutoffTooSmall(d))
    }
}

/// Amplitudes of a pure three-mode state on the truncated space.
#[derive(Clone, Debug, PartialEq)]
pub struct FockStateVector {
    pub cutoff: usize,
    /// Indexed by `n₁·D² + n₂·D + n₃`.
    pub amplitudes: Vec<C64>,
    /// Probability lost past the cutoff so far, summed over gates.
    pub leakage: f64,
}

impl FockStateVector {
    pub fn vacuum(cutoff: usize) -> Self {
        Self::basis(cutoff, [0, 0, 0])
    }

    pub fn basis(cutoff: usize, n: [usize; 3]) -> Self {
        let mut amplitudes = vec![ZERO; cutoff.pow(3)];
        amplitudes[index(cutoff, n)] = C64::new(1.0, 0.0);
        Self { cutoff, amplitudes, leakage: 0.0 }
    }

    /// Product of coherent states from the normalized, truncated Taylor
    /// series; the renormalization is booked as leakage.
    pub fn coherent(cutoff: usize, input: &InputState) -> Result<Self, OracleError> {
        check_cutoff(cutoff)?;
        let factors: Vec<Vec<C64>> = input
            .alpha
            .iter()
            .map(|&a| {
                let mut c = Vec::with_capacity(cutoff);
                let mut term = C64::new((-0.5 * a.norm_sqr()).exp(), 0.0);
                for n in 0..cutoff {
                    c.push(term);
                    term = term * a / ((n + 1) as f64).sqrt();
                }
                c
            })
            .collect();
        let mut amplitudes = vec![ZERO; cutoff.pow(3)];
        for n1 in 0..cutoff {
            for n2 in 0..cutoff {
                for n3 in 0..cutoff {
                    amplitudes[index(cutoff, [n1, n2, n3])] = factors[0][n1] * factors[1][n2] * factors[2][n3];
                }
            }
        }
        let norm2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        let leakage = 1.0 - norm2;
        if leakage > LEAKAGE_LIMIT {
            return Err(OracleError::LeakageExceeded { stage: "coherent preparation", leakage });
        }
        let scale = 1.0 / norm2.sqrt();
        for z in &mut amplitudes {
            *z *= scale;
        }
        Ok(Self { cutoff, amplitudes, leakage: leakage.max(0.0) })
    }

    pub fn amplitude(&self, n: [usize; 3]) -> C64 {
        self.amplitudes[index(self.cutoff, n)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &[C64]) -> C64 {
        self.amplitudes.iter().zip(other).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn fidelity(&self, other: &FockStateVector) -> f64 {
        self.inner(&other.amplitudes).norm_sqr()
    }
}

pub fn index(cutoff: usize, n: [usize; 3]) -> usize {
    (n[0] * cutoff + n[1]) * cutoff + n[2]
}

fn occupation(cutoff: usize, idx: usize) -> [usize; 3] {
    [idx / (cutoff * cutoff), (idx / cutoff) % cutoff, idx % cutoff]
}

/// Sparse operator on the truncated space, stored as `(row, col, value)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedOperator {
    pub cutoff: usize,
    pub entries: Vec<(usize, usize, C64)>,
}

impl TruncatedOperator {
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; x.len()];
        for &(r, c, v) in &self.entries {
            out[r] += v * x[c];
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let entries = self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())).collect();
        Self { cutoff: self.cutoff, entries }
    }

    pub fn scale(&self, c: C64) -> Self {
        let entries = self.entries.iter().map(|&(r, col, v)| (r, col, v * c)).collect();
        Self { cutoff: self.cutoff, entries }
    }

    /// `⟨ψ|O|ψ⟩ / ⟨ψ|ψ⟩`.
    pub fn expectation(&self, psi: &FockStateVector) -> C64 {
        psi.inner(&self.apply(&psi.amplitudes)) / psi.norm_sqr()
    }

    pub fn element(&self, row: [usize; 3], col: [usize; 3]) -> C64 {
        let (r, c) = (index(self.cutoff, row), index(self.cutoff, col));
        self.entries.iter().filter(|e| e.0 == r && e.1 == c).map(|e| e.2).sum()
    }

    /// Largest deviation from Hermiticity over the stored entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let adj = self.adjoint();
        let n = self.cutoff.pow(3);
        let mut worst = 0.0f64;
        for col in 0..n {
            let mut e = vec![ZERO; n];
            e[col] = C64::new(1.0, 0.0);
            let a = self.apply(&e);
            let b = adj.apply(&e);
            for (x, y) in a.iter().zip(&b) {
                worst = worst.max((x - y).norm());
            }
        }
        worst
    }
}

/// Builder for operators whose matrix elements follow the ladder rules.
fn from_rule(cutoff: usize, rule: impl Fn([usize; 3]) -> Vec<([i64; 3], C64)>) -> TruncatedOperator {
    let mut entries = Vec::new();
    for col in 0..cutoff.pow(3) {
        let n = occupation(cutoff, col);
        for (shift, v) in rule(n) {
            if v == ZERO {
                continue;
            }
            let target: Option<Vec<usize>> = (0..3)
                .map(|k| {
                    let m = n[k] as i64 + shift[k];
                    (0..cutoff as i64).contains(&m).then_some(m as usize)
                })
                .collect();
            if let Some(t) = target {
                entries.push((index(cutoff, [t[0], t[1], t[2]]), col, v));
            }
        }
    }
    TruncatedOperator { cutoff, entries }
}

/// `âₘ` for mode `m` (one-based).
pub fn annihilation(mode: usize, cutoff: usize) -> TruncatedOperator {
    from_rule(cutoff, |n| {
        let mut shift = [0i64; 3];
        shift[mode - 1] = -1;
        vec![(shift, C64::new((n[mode - 1] as f64).sqrt(), 0.0))]
    })
}

/// `âₘ†` for mode `m` (one-based).
pub fn creation(mode: usize, cutoff: usize) -> TruncatedOperator {
    from_rule(cutoff, |n| {
        let mut shift = [0i64; 3];
        shift[mode - 1] = 1;
        vec![(shift, C64::new(((n[mode - 1] + 1) as f64).sqrt(), 0.0))]
    })
}

/// The Hermitian generator Kᵢ realized on the truncated space.
pub fn k_operator(i: GeneratorIndex, cutoff: usize) -> TruncatedOperator {
    let sq = |x: usize| (x as f64).sqrt();
    let re = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    let r3 = 3f64.sqrt();
    from_rule(cutoff, move |n| {
        let [n1, n2, n3] = n;
        // pair creation/annihilation amplitudes and hopping amplitudes
        let up12 = sq((n1 + 1) * (n2 + 1));
        let dn12 = sq(n1 * n2);
        let up13 = sq((n1 + 1) * (n3 + 1));
        let dn13 = sq(n1 * n3);
        let hop23 = sq((n2 + 1) * n3); // â₂†â₃
        let hop32 = sq(n2 * (n3 + 1)); // â₃†â₂
        match i.get() {
            1 => vec![([1, 1, 0], re(0.5 * up12)), ([-1, -1, 0], re(0.5 * dn12))],
            2 => vec![([1, 1, 0], im(-0.5 * up12)), ([-1, -1, 0], im(0.5 * dn12))],
            3 => vec![([1, 0, 1], re(0.5 * up13)), ([-1, 0, -1], re(0.5 * dn13))],
            4 => vec![([1, 0, 1], im(-0.5 * up13)), ([-1, 0, -1], im(0.5 * dn13))],
            5 => vec![([0, 1, -1], re(-0.5 * hop23)), ([0, -1, 1], re(-0.5 * hop32))],
            6 => vec![([0, 1, -1], im(-0.5 * hop23)), ([0, -1, 1], im(0.5 * hop32))],
            7 => vec![([0, 0, 0], re(0.5 * (n1 + n2 + 1) as f64))],
            _ => vec![([0, 0, 0], re((n1 as f64 - (n2 + 1) as f64 + 2.0 * (n3 + 1) as f64) / (2.0 * r3)))],
        }
    })
}

/// Extra chain length simulated beyond the cutoff to capture leakage.
fn margin(cutoff: usize) -> usize {
    cutoff.max(8)
}

/// Exact mixer gate restricted to the truncated space, plus the probability
/// the vacuum would lose past the cutoff (a cheap guard on β).
fn mixer_gate(p: &FwmParams, cutoff: usize) -> (TruncatedOperator, f64) {
    let idler = p.pair.idler();
    let spectator = 3 - idler;
    // gauge phase per chain step
    let u = I * (-I * p.theta).exp();
    let d = cutoff as i64;
    let mut entries = Vec::new();
    let mut vacuum_leak = 0.0;
    for diff in -(d - 1)..d {
        let n1_0 = diff.max(0) as usize;
        let ni_0 = (-diff).max(0) as usize;
        let len = cutoff - diff.unsigned_abs() as usize;
        let ext = len + margin(cutoff);
        let mut t = DMatrix::<f64>::zeros(ext, ext);
        for k in 0..ext - 1 {
            let c = (((n1_0 + k + 1) * (ni_0 + k + 1)) as f64).sqrt();
            t[(k, k + 1)] = c;
            t[(k + 1, k)] = c;
        }
        let eig = SymmetricEigen::new(t);
        let phases: Vec<C64> = eig.eigenvalues.iter().map(|&l| (-I * (0.5 * p.beta * l)).exp()).collect();
        let v = &eig.eigenvectors;
        let gauge: Vec<C64> = (0..ext).map(|k| u.powi(k as i32)).collect();
        for col in 0..len {
            for row in 0..ext {
                let mut acc = ZERO;
                for (m, ph) in phases.iter().enumerate() {
                    acc += *ph * (v[(row, m)] * v[(col, m)]);
                }
                let val = gauge[row] * acc / gauge[col];
                if row >= len {
                    if diff == 0 && col == 0 {
                        vacuum_leak += val.norm_sqr();
                    }
                    continue;
                }
                if val == ZERO {
                    continue;
                }
                for s in 0..cutoff {
                    let at = |k: usize| {
                        let mut n = [0usize; 3];
                        n[0] = n1_0 + k;
                        n[idler] = ni_0 + k;
                        n[spectator] = s;
                        index(cutoff, n)
                    };
                    entries.push((at(row), at(col), val));
                }
            }
        }
    }
    (TruncatedOperator { cutoff, entries }, vacuum_leak)
}

/// Mixer gate `exp(−iβ(sin θ K_a − cos θ K_b))` on the truncated space,
/// with (K_a, K_b) = (K₁, K₂) or (K₃, K₄).
pub fn fwm_unitary(beta: f64, theta: f64, pair: ModePair, cutoff: usize) -> Result<TruncatedOperator, OracleError> {
    check_cutoff(cutoff)?;
    let (op, leak) = mixer_gate(&FwmParams { beta, theta, pair }, cutoff);
    if leak > LEAKAGE_LIMIT {
        return Err(OracleError::LeakageExceeded { stage: "mixer", leakage: leak });
    }
    Ok(op)
}

/// Diagonal gate `exp(iΣφₖn̂ₖ)`.
pub fn phase_unitary(ph: &PhaseShifts, cutoff: usize) -> TruncatedOperator {
    from_rule(cutoff, |n| {
        let angle: f64 = (0..3).map(|k| ph.phi[k] * n[k] as f64).sum();
        vec![([0, 0, 0], (I * angle).exp())]
    })
}

const STAGE_NAMES: [&str; 4] = ["FWM1", "FWM2", "FWM3", "FWM4"];

fn apply_guarded(
    op: &TruncatedOperator,
    state: &mut FockStateVector,
    stage: &'static str,
) -> Result<(), OracleError> {
    let before = state.norm_sqr();
    state.amplitudes = op.apply(&state.amplitudes);
    let lost = (before - state.norm_sqr()).max(0.0);
    if lost > LEAKAGE_LIMIT {
        return Err(OracleError::LeakageExceeded { stage, leakage: lost });
    }
    state.leakage += lost;
    Ok(())
}

/// Input state sent through FWM1, FWM2, the phases, FWM3, FWM4.
pub fn run_circuit(cfg: &InterferometerConfig, input: &InputState, cutoff: usize) -> Result<FockStateVector, OracleError> {
    run(cfg, input, cutoff, None).map(|(s, _)| s)
}

/// Like [`run_circuit`], also returning `∂|ψ_out⟩/∂φⱼ`.
pub fn run_circuit_with_tangent(
    cfg: &InterferometerConfig,
    input: &InputState,
    cutoff: usize,
    j: usize,
) -> Result<(FockStateVector, Vec<C64>), OracleError> {
    run(cfg, input, cutoff, Some(j)).map(|(s, t)| (s, t.expect("tangent requested")))
}

fn run(
    cfg: &InterferometerConfig,
    input: &InputState,
    cutoff: usize,
    tangent_of: Option<usize>,
) -> Result<(FockStateVector, Option<Vec<C64>>), OracleError> {
    let mut state = FockStateVector::coherent(cutoff, input)?;
    let gate = |k: usize| {
        let p = cfg.fwm[k];
        fwm_unitary(p.beta, p.theta, p.pair, cutoff)
    };
    for k in 0..2 {
        apply_guarded(&gate(k)?, &mut state, STAGE_NAMES[k])?;
    }
    let phase = phase_unitary(&cfg.phases, cutoff);
    let mut tangent = tangent_of.map(|j| {
        // d/dφⱼ exp(iΣφn) = i·n̂ⱼ·exp(iΣφn)
        let shifted = phase.apply(&state.amplitudes);
        shifted
            .iter()
            .enumerate()
            .map(|(idx, z)| I * occupation(cutoff, idx)[j - 1] as f64 * z)
            .collect::<Vec<_>>()
    });
    apply_guarded(&phase, &mut state, "phase shifts")?;
    for k in 2..4 {
        let g = gate(k)?;
        if let Some(t) = tangent.as_mut() {
            *t = g.apply(t);
        }
        apply_guarded(&g, &mut state, STAGE_NAMES[k])?;
    }
    Ok((state, tangent))
}

/// Symmetrized first and second moments of K₁..K₈.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KMoments {
    pub mean: [f64; 8],
    /// `½⟨{ΔKᵢ, ΔKⱼ}⟩`.
    pub cov: [[f64; 8]; 8],
}

pub fn photon_statistics(state: &FockStateVector) -> PhotonStatistics {
    let norm = state.norm_sqr();
    let mut first = [0.0; 3];
    let mut second = [[0.0; 3]; 3];
    for (idx, z) in state.amplitudes.iter().enumerate() {
        let p = z.norm_sqr() / norm;
        if p == 0.0 {
            continue;
        }
        let n = occupation(state.cutoff, idx).map(|x| x as f64);
        for i in 0..3 {
            first[i] += p * n[i];
            for j in 0..3 {
                second[i][j] += p * n[i] * n[j];
            }
        }
    }
    let cov = core::array::from_fn(|i| core::array::from_fn(|j| second[i][j] - first[i] * first[j]));
    PhotonStatistics { mean: first, cov }
}

pub fn k_moments(state: &FockStateVector) -> KMoments {
    let norm = state.norm_sqr();
    let images: Vec<Vec<C64>> = GeneratorIndex::all()
        .map(|i| k_operator(i, state.cutoff).apply(&state.amplitudes))
        .collect();
    let mean: [f64; 8] = core::array::from_fn(|i| state.inner(&images[i]).re / norm);
    let cov = core::array::from_fn(|i| {
        core::array::from_fn(|j| {
            let ki_kj: C64 = images[i].iter().zip(&images[j]).map(|(a, b)| a.conj() * b).sum();
            ki_kj.re / norm - mean[i] * mean[j]
        })
    });
    KMoments { mean, cov }
}

pub fn estimator_stats(state: &FockStateVector, w: &DetectorWeights) -> EstimatorStats {
    crate::gaussian::estimator_stats(&photon_statistics(state), w)
}

/// `∂⟨Σwₖn̂ₖ⟩/∂φ = 2Re⟨ψ|Σwₖn̂ₖ|∂ψ⟩`.
pub fn mean_derivative(state: &FockStateVector, tangent: &[C64], w: &DetectorWeights) -> f64 {
    let w = w.as_array();
    let mut acc = ZERO;
    for (idx, (a, b)) in state.amplitudes.iter().zip(tangent).enumerate() {
        let n = occupation(state.cutoff, idx);
        let weight: f64 = (0..3).map(|k| w[k] * n[k] as f64).sum();
        acc += a.conj() * b * weight;
    }
    2.0 * acc.re / state.norm_sqr()
}

/// What [`measure`] should compute.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Quantity {
    PhotonStats,
    KMoments,
    EstimatorStats(DetectorWeights),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Measurement {
    PhotonStats(PhotonStatistics),
    KMoments(KMoments),
    EstimatorStats(EstimatorStats),
}

pub fn measure(state: &FockStateVector, what: Quantity) -> Measurement {
    match what {
        Quantity::PhotonStats => Measurement::PhotonStats(photon_statistics(state)),
        Quantity::KMoments => Measurement::KMoments(k_moments(state)),
        Quantity::EstimatorStats(w) => Measurement::EstimatorStats(estimator_stats(state, &w)),
    }
}

/// One Gaussian-versus-oracle comparison: a circuit, its input, the
/// estimator weights and the phase to differentiate by.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleCase {
    pub cfg: InterferometerConfig,
    pub input: InputState,
    pub weights: DetectorWeights,
    pub phase_index: usize,
}

/// Largest absolute disagreement per quantity over a comparison run.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OracleDeviations {
    pub cases: usize,
    pub mean: f64,
    pub covariance: f64,
    pub estimator_variance: f64,
    pub derivative: f64,
    /// Largest `|⟨ΔKᵢ²⟩ − ¼|`, i = 1..4, on the oracle's vacuum.
    pub vacuum_k_variance: f64,
    pub max_leakage: f64,
}

impl OracleDeviations {
    /// `(name, value)` rows in a fixed order.
    pub fn rows(&self) -> [(&'static str, f64); 5] {
        [
            ("mean", self.mean),
            ("covariance", self.covariance),
            ("estimator_variance", self.estimator_variance),
            ("derivative", self.derivative),
            ("vacuum_k_variance", self.vacuum_k_variance),
        ]
    }

    pub fn worst(&self) -> f64 {
        self.rows().iter().map(|r| r.1).fold(0.0, f64::max)
    }
}

/// Runs every case through both the Gaussian pipeline and the truncated
/// oracle and records the worst disagreement per quantity.
pub fn compare_with_gaussian(cases: &[OracleCase], cutoff: usize) -> Result<OracleDeviations, OracleError> {
    use crate::gaussian;
    use crate::interferometer::total_transform;
    use crate::sensitivity::{mean_derivative as gaussian_derivative, DerivativeMode};

    let mut dev = OracleDeviations { cases: cases.len(), ..Default::default() };
    let vac = k_moments(&FockStateVector::vacuum(cutoff));
    for i in 0..4 {
        dev.vacuum_k_variance = dev.vacuum_k_variance.max((vac.cov[i][i] - 0.25).abs());
    }
    for case in cases {
        let (state, tangent) = run_circuit_with_tangent(&case.cfg, &case.input, cutoff, case.phase_index)?;
        dev.max_leakage = dev.max_leakage.max(state.leakage);
        let g = gaussian::photon_statistics(&gaussian::moments_through(&total_transform(&case.cfg), &case.input));
        let f = photon_statistics(&state);
        for i in 0..3 {
            dev.mean = dev.mean.max((g.mean[i] - f.mean[i]).abs());
            for j in 0..3 {
                dev.covariance = dev.covariance.max((g.cov[i][j] - f.cov[i][j]).abs());
            }
        }
        let gv = gaussian::estimator_stats(&g, &case.weights).variance;
        let fv = gaussian::estimator_stats(&f, &case.weights).variance;
        dev.estimator_variance = dev.estimator_variance.max((gv - fv).abs());
        let gd = gaussian_derivative(case.phase_index, &case.cfg, &case.input, &case.weights, DerivativeMode::Analytic);
        let fd = mean_derivative(&state, &tangent, &case.weights);
        dev.derivative = dev.derivative.max((gd - fd).abs());
    }
    Ok(dev)
}
