//! Four-wave-mixer and phase-shift stages and their composition into the
//! full SU(1,2) interferometer.
//!
//! Topology: FWM1 mixes the probe (mode 1) with idler mode 2, FWM2 mixes the
//! probe with mode 3, the three beams pick up phases φ₁..φ₃, then FWM3 (modes
//! 1,3) and FWM4 (modes 1,2) undo the first pair when balanced. Output beam
//! 12 is mode 1, beam 13 is mode 2 and beam 14 is mode 3.

use core::f64::consts::PI;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;


use crate::gaussian::{photon_statistics, propagate, BogoliubovTransform};
use crate::lie::ModeMatrix;
use crate::matrix::{Matrix3, C64, I, ZERO};

/// Which idler mode the probe (mode 1) is mixed with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModePair {
    Modes12,
    Modes13,
}

impl ModePair {
    /// Zero-based index of the idler mode.
    pub fn idler(self) -> usize {
        match self {
            ModePair::Modes12 => 1,
            ModePair::Modes13 => 2,
        }
    }
}

/// Gain and phase parameter of one four-wave mixer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FwmParams {
    pub beta: f64,
    pub theta: f64,
    pub pair: ModePair,
}

/// Phase shifts φ₁, φ₂, φ₃ (radians) on the three internal beams.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhaseShifts {
    pub phi: [f64; 3],
}

impl PhaseShifts {
    pub fn new(phi1: f64, phi2: f64, phi3: f64) -> Self {
        Self { phi: [phi1, phi2, phi3] }
    }
}

/// The full device: four mixers and the internal phase shifts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterferometerConfig {
    pub fwm: [FwmParams; 4],
    pub phases: PhaseShifts,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConfigError {
    NegativeGain { stage: usize, beta: f64 },
    NonFinite(&'static str),
    WrongTopology { stage: usize },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::NegativeGain { stage, beta } => {
                write!(f, "gain of FWM{stage} must be non-negative, got {beta}")
            }
            ConfigError::NonFinite(what) => write!(f, "{what} must be finite"),
            ConfigError::WrongTopology { stage } => {
                write!(f, "FWM{stage} mixes the wrong pair of modes")
            }
        }
    }
}

impl core::error::Error for ConfigError {}

/// Phase parameters θ₁..θ₄ = (0, 0, π, π).
pub const DEFAULT_THETAS: [f64; 4] = [0.0, 0.0, PI, PI];

const TOPOLOGY: [ModePair; 4] = [ModePair::Modes12, ModePair::Modes13, ModePair::Modes13, ModePair::Modes12];

impl InterferometerConfig {
    /// Builds a config from the four gains and phase parameters.
    pub fn new(betas: [f64; 4], thetas: [f64; 4], phases: PhaseShifts) -> Self {
        let fwm = core::array::from_fn(|k| FwmParams { beta: betas[k], theta: thetas[k], pair: TOPOLOGY[k] });
        Self { fwm, phases }
    }

    /// Balanced device: β₃ = β₂, β₄ = β₁, θ = (0, 0, π, π), zero phases.
    pub fn balanced(beta1: f64, beta2: f64) -> Self {
        Self::new([beta1, beta2, beta2, beta1], DEFAULT_THETAS, PhaseShifts::default())
    }

    pub fn betas(&self) -> [f64; 4] {
        core::array::from_fn(|k| self.fwm[k].beta)
    }

    pub fn thetas(&self) -> [f64; 4] {
        core::array::from_fn(|k| self.fwm[k].theta)
    }

    /// Copy with φⱼ (one-based) replaced.
    pub fn with_phase(mut self, j: usize, value: f64) -> Self {
        self.phases.phi[j - 1] = value;
        self
    }

    pub fn with_phases(mut self, phases: PhaseShifts) -> Self {
        self.phases = phases;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (k, p) in self.fwm.iter().enumerate() {
            if !p.beta.is_finite() {
                return Err(ConfigError::NonFinite("gain"));
            }
            if !p.theta.is_finite() {
                return Err(ConfigError::NonFinite("FWM phase parameter"));
            }
            if p.beta < 0.0 {
                return Err(ConfigError::NegativeGain { stage: k + 1, beta: p.beta });
            }
            if p.pair != TOPOLOGY[k] {
                return Err(ConfigError::WrongTopology { stage: k + 1 });
            }
        }
        if self.phases.phi.iter().any(|p| !p.is_finite()) {
            return Err(ConfigError::NonFinite("phase shift"));
        }
        Ok(())
    }
}

/// Coherent amplitudes on the three input ports; zero means vacuum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct InputState {
    pub alpha: [C64; 3],
}

impl InputState {
    pub fn vacuum() -> Self {
        Self::default()
    }

    /// Coherent state `amplitude` on `port` (one-based), vacuum elsewhere.
    pub fn coherent(port: usize, amplitude: C64) -> Self {
        let mut s = Self::default();
        s.alpha[port - 1] = amplitude;
        s
    }

    pub fn is_vacuum(&self) -> bool {
        self.alpha.iter().all(|a| *a == ZERO)
    }

    /// Mean photon number per input port.
    pub fn intensities(&self) -> [f64; 3] {
        core::array::from_fn(|k| self.alpha[k].norm_sqr())
    }
}

/// Mode matrix of one mixer:
/// `â₁ → cosh(β/2)â₁ + e^{−iθ}sinh(β/2)âₖ†`, `âₖ† → e^{iθ}sinh(β/2)â₁ + cosh(β/2)âₖ†`.
pub fn fwm_matrix(p: &FwmParams) -> ModeMatrix {
    let (c, s) = ((p.beta / 2.0).cosh(), (p.beta / 2.0).sinh());
    let k = p.pair.idler();
    let mut m = Matrix3::identity();
    m[(0, 0)] = C64::new(c, 0.0);
    m[(k, k)] = C64::new(c, 0.0);
    m[(0, k)] = (-I * p.theta).exp() * s;
    m[(k, 0)] = (I * p.theta).exp() * s;
    ModeMatrix(m)
}

/// Each annihilation operator âₖ acquires `e^{iφₖ}`, so the matrix on
/// `(â₁, â₂†, â₃†)` is `diag(e^{iφ₁}, e^{−iφ₂}, e^{−iφ₃})`.
pub fn phase_matrix(ph: &PhaseShifts) -> ModeMatrix {
    let [p1, p2, p3] = ph.phi;
    ModeMatrix(Matrix3::from_diagonal(&[(I * p1).exp(), (-I * p2).exp(), (-I * p3).exp()]))
}

/// Derivative of [`phase_matrix`] with respect to φⱼ (one-based).
pub fn phase_matrix_derivative(ph: &PhaseShifts, j: usize) -> Matrix3 {
    let p = phase_matrix(ph).0;
    let mut d = Matrix3::zero();
    let factor = if j == 1 { I } else { -I };
    d[(j - 1, j - 1)] = p[(j - 1, j - 1)] * factor;
    d
}

/// Which prefix of the device to return.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    /// `S₂·S₁`: beams 5, 6, 7 inside the interferometer.
    AfterFwm2,
    /// The full `S₄·S₃·P·S₂·S₁`.
    Final,
}

pub fn stage_transform(cfg: &InterferometerConfig, stage: Stage) -> ModeMatrix {
    let front = fwm_matrix(&cfg.fwm[1]) * fwm_matrix(&cfg.fwm[0]);
    match stage {
        Stage::AfterFwm2 => front,
        Stage::Final => back_transform(cfg) * phase_matrix(&cfg.phases) * front,
    }
}

/// `S₄·S₃`.
pub(crate) fn back_transform(cfg: &InterferometerConfig) -> ModeMatrix {
    fwm_matrix(&cfg.fwm[3]) * fwm_matrix(&cfg.fwm[2])
}

/// `S_total = S₄·S₃·P·S₂·S₁`.
pub fn total_transform(cfg: &InterferometerConfig) -> ModeMatrix {
    stage_transform(cfg, Stage::Final)
}

/// Mean photon number summed over the internal beams 5, 6, 7, including
/// any coherent contribution.
pub fn total_photon_number(cfg: &InterferometerConfig, input: &InputState) -> f64 {
    let inner = stage_transform(cfg, Stage::AfterFwm2);
    let t = BogoliubovTransform::from_mode_matrix_unchecked(&inner);
    photon_statistics(&propagate(input, &t)).mean.iter().sum()
}

/// Vacuum-input internal photon number in closed form,
/// `sinh²(β₁/2)(cosh²(β₂/2)+1) + sinh²(β₂/2)(cosh²(β₁/2)+1)`.
pub fn vacuum_photon_number(beta1: f64, beta2: f64) -> f64 {
    let (s1, c1) = ((beta1 / 2.0).sinh(), (beta1 / 2.0).cosh());
    let (s2, c2) = ((beta2 / 2.0).sinh(), (beta2 / 2.0).cosh());
    s1 * s1 * (c2 * c2 + 1.0) + s2 * s2 * (c1 * c1 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::is_pseudo_unitary;

    #[test]
    fn zero_gain_mixer_is_identity() {
        for theta in [0.0, 1.0, PI] {
            let p = FwmParams { beta: 0.0, theta, pair: ModePair::Modes12 };
            assert!(fwm_matrix(&p).0.max_abs_diff(&Matrix3::identity()) < 1e-15);
        }
    }

    #[test]
    fn mixer_entries_at_theta_zero() {
        let m = fwm_matrix(&FwmParams { beta: 3.0, theta: 0.0, pair: ModePair::Modes12 }).0;
        let (c, s) = (1.5f64.cosh(), 1.5f64.sinh());
        assert!((m[(0, 0)] - c).norm() < 1e-15 && (m[(1, 1)] - c).norm() < 1e-15);
        assert!((m[(0, 1)] - s).norm() < 1e-15 && (m[(1, 0)] - s).norm() < 1e-15);
        assert_eq!(m[(2, 2)], C64::new(1.0, 0.0));
    }

    #[test]
    fn mixer_is_group_member() {
        let p = FwmParams { beta: 1.0, theta: PI / 3.0, pair: ModePair::Modes13 };
        assert!(is_pseudo_unitary(&fwm_matrix(&p), 1e-12));
    }

    #[test]
    fn phase_matrix_examples() {
        assert_eq!(phase_matrix(&PhaseShifts::default()), ModeMatrix::identity());
        let half = phase_matrix(&PhaseShifts::new(PI, 0.0, 0.0)).0;
        let want = Matrix3::from_diagonal(&[C64::new(-1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(half.max_abs_diff(&want) < 1e-15);
        assert!(is_pseudo_unitary(&phase_matrix(&PhaseShifts::new(0.3, -2.0, 5.0)), 1e-14));
    }

    #[test]
    fn balanced_device_is_identity() {
        for (b1, b2) in [(3.0, 3.0), (0.5, 2.0), (4.0, 1.0)] {
            let s = total_transform(&InterferometerConfig::balanced(b1, b2));
            assert!(s.0.max_abs_diff(&Matrix3::identity()) < 1e-10, "{b1} {b2}");
        }
    }

    #[test]
    fn zero_gain_device_is_phase_matrix() {
        let cfg = InterferometerConfig::new([0.0; 4], [0.3, 1.0, 2.0, -1.0], PhaseShifts::new(0.1, 0.2, 0.3));
        assert!(total_transform(&cfg).0.max_abs_diff(&phase_matrix(&cfg.phases).0) < 1e-15);
    }

    #[test]
    fn inner_probe_row_matches_expansion() {
        let (b1, b2) = (1.2, 2.1);
        let s = stage_transform(&InterferometerConfig::balanced(b1, b2), Stage::AfterFwm2).0;
        let want = [
            (b1 / 2.0).cosh() * (b2 / 2.0).cosh(),
            (b1 / 2.0).sinh() * (b2 / 2.0).cosh(),
            (b2 / 2.0).sinh(),
        ];
        for k in 0..3 {
            assert!((s[(0, k)] - want[k]).norm() < 1e-14);
        }
        let zero = stage_transform(&InterferometerConfig::balanced(0.0, 0.0), Stage::AfterFwm2);
        assert_eq!(zero, ModeMatrix::identity());
    }

    #[test]
    fn vacuum_photon_number_examples() {
        assert_eq!(total_photon_number(&InterferometerConfig::balanced(0.0, 0.0), &InputState::vacuum()), 0.0);
        let n = total_photon_number(&InterferometerConfig::balanced(3.0, 3.0), &InputState::vacuum());
        let s = 1.5f64.sinh().powi(2);
        let c = 1.5f64.cosh().powi(2);
        assert!((n - 2.0 * s * (c + 1.0)).abs() < 1e-10);
        assert!((n - 59.24).abs() < 0.01);
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut cfg = InterferometerConfig::balanced(1.0, 1.0);
        assert!(cfg.validate().is_ok());
        cfg.fwm[2].beta = -0.1;
        assert_eq!(cfg.validate(), Err(ConfigError::NegativeGain { stage: 3, beta: -0.1 }));
        let mut cfg = InterferometerConfig::balanced(1.0, 1.0);
        cfg.fwm[0].pair = ModePair::Modes13;
        assert_eq!(cfg.validate(), Err(ConfigError::WrongTopology { stage: 1 }));
        let cfg = InterferometerConfig::balanced(1.0, 1.0).with_phase(2, f64::NAN);
        assert!(cfg.validate().is_err());
    }
}
