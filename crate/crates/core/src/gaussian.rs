//! Heisenberg-picture propagation of coherent/vacuum inputs and Gaussian
//! photon-number statistics.
//!
//! A mode matrix acting on `(â₁, â₂†, â₃†)` is rewritten as a Bogoliubov map
//! `â_out = A·â + B·â†`. Coherent inputs carry vacuum fluctuations, so the
//! output is Gaussian with
//!
//! * `μ = A·α + B·ᾱ`
//! * `N_ij = ⟨δâᵢ†δâⱼ⟩ = Σₖ B̄ᵢₖ Bⱼₖ`
//! * `M_ij = ⟨δâᵢδâⱼ⟩ = Σₖ Aᵢₖ Bⱼₖ`
//!
//! and Wick's theorem gives the photon-number moments.

use core::fmt;

use crate::interferometer::InputState;
use crate::lie::ModeMatrix;
use crate::matrix::{Matrix3, C64};
use crate::sensitivity::DetectorWeights;

/// `â_out,i = Σⱼ A_ij âⱼ + B_ij âⱼ†`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BogoliubovTransform {
    pub a: Matrix3,
    pub b: Matrix3,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NotPseudoUnitary {
    pub defect: f64,
}

impl fmt::Display for NotPseudoUnitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mode matrix is not in SU(1,2) (defect {:.3e})", self.defect)
    }
}

impl core::error::Error for NotPseudoUnitary {}

/// Splits a matrix on `(â₁, â₂†, â₃†)` into annihilation/creation blocks.
/// The map is real-linear, so it also applies to derivatives of mode matrices.
pub fn split_blocks(s: &Matrix3) -> (Matrix3, Matrix3) {
    let mut a = Matrix3::zero();
    let mut b = Matrix3::zero();
    a[(0, 0)] = s[(0, 0)];
    b[(0, 1)] = s[(0, 1)];
    b[(0, 2)] = s[(0, 2)];
    for row in 1..3 {
        b[(row, 0)] = s[(row, 0)].conj();
        a[(row, 1)] = s[(row, 1)].conj();
        a[(row, 2)] = s[(row, 2)].conj();
    }
    (a, b)
}

impl BogoliubovTransform {
    /// Converts a group element. Membership is checked relative to the
    /// squared entry scale, since high-gain products lose absolute digits.
    pub fn from_mode_matrix(s: &ModeMatrix) -> Result<Self, NotPseudoUnitary> {
        let defect = s.membership_defect();
        let scale = s.0.max_abs().max(1.0);
        if !(defect <= 1e-9 * scale * scale) {
            return Err(NotPseudoUnitary { defect });
        }
        Ok(Self::from_mode_matrix_unchecked(s))
    }

    pub fn from_mode_matrix_unchecked(s: &ModeMatrix) -> Self {
        let (a, b) = split_blocks(&s.0);
        Self { a, b }
    }

    /// Largest violation of `A·A† − B·B† = I` and `A·Bᵀ = B·Aᵀ`.
    pub fn commutation_defect(&self) -> f64 {
        let c1 = (self.a * self.a.adjoint() - self.b * self.b.adjoint()).max_abs_diff(&Matrix3::identity());
        let c2 = (self.a * self.b.transpose()).max_abs_diff(&(self.b * self.a.transpose()));
        c1.max(c2)
    }
}

/// Mean vector and normal/anomalous fluctuation correlations of a
/// three-mode Gaussian state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutputMoments {
    pub mu: [C64; 3],
    pub n: Matrix3,
    pub m: Matrix3,
}

impl OutputMoments {
    /// Checks Hermiticity of N, symmetry of M and `N ⪰ −tol`, the latter via
    /// the leading principal minors of `N + tol·I`.
    pub fn is_physical(&self, tol: f64) -> bool {
        if self.n.max_abs_diff(&self.n.adjoint()) > tol || self.m.max_abs_diff(&self.m.transpose()) > tol {
            return false;
        }
        let shifted = self.n + Matrix3::identity().scale(C64::new(tol, 0.0));
        let d1 = shifted[(0, 0)].re;
        let d2 = (shifted[(0, 0)] * shifted[(1, 1)] - shifted[(0, 1)] * shifted[(1, 0)]).re;
        let d3 = shifted.det().re;
        d1 >= 0.0 && d2 >= -tol && d3 >= -tol
    }
}

pub fn propagate(input: &InputState, t: &BogoliubovTransform) -> OutputMoments {
    let alpha = input.alpha;
    let alpha_bar: [C64; 3] = core::array::from_fn(|k| alpha[k].conj());
    let a_part = t.a * alpha;
    let b_part = t.b * alpha_bar;
    let mu = core::array::from_fn(|i| a_part[i] + b_part[i]);
    let n = Matrix3::from_fn(|i, j| (0..3).map(|k| t.b[(i, k)].conj() * t.b[(j, k)]).sum());
    let m = Matrix3::from_fn(|i, j| (0..3).map(|k| t.a[(i, k)] * t.b[(j, k)]).sum());
    OutputMoments { mu, n, m }
}

/// Photon-number means and covariance matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhotonStatistics {
    pub mean: [f64; 3],
    pub cov: [[f64; 3]; 3],
}

/// Wick expansion for `n̂ᵢ = (μᵢ + δâᵢ)†(μᵢ + δâᵢ)`:
///
/// `Cov(n̂ᵢ, n̂ⱼ) = |N_ij|² + |M_ij|² + δᵢⱼ(N_ii + |μᵢ|²)
///                + 2Re(μ̄ᵢ μⱼ N_ji) + 2Re(μ̄ᵢ μ̄ⱼ M_ij)`.
pub fn photon_statistics(m: &OutputMoments) -> PhotonStatistics {
    let mu = m.mu;
    let mean = core::array::from_fn(|i| m.n[(i, i)].re + mu[i].norm_sqr());
    let mut cov = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut c = m.n[(i, j)].norm_sqr() + m.m[(i, j)].norm_sqr();
            if i == j {
                c += m.n[(i, i)].re + mu[i].norm_sqr();
            }
            c += 2.0 * (mu[i].conj() * mu[j] * m.n[(j, i)]).re;
            c += 2.0 * (mu[i].conj() * mu[j].conj() * m.m[(i, j)]).re;
            cov[i][j] = c;
        }
    }
    // exact symmetry, independent of rounding in the two triangles
    for i in 0..3 {
        for j in i + 1..3 {
            let avg = 0.5 * (cov[i][j] + cov[j][i]);
            cov[i][j] = avg;
            cov[j][i] = avg;
        }
    }
    PhotonStatistics { mean, cov }
}

/// Mean and variance of `s·n̂₁ + t·n̂₂ + r·n̂₃`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorStats {
    pub mean: f64,
    pub variance: f64,
}

pub fn estimator_stats(ps: &PhotonStatistics, w: &DetectorWeights) -> EstimatorStats {
    let w = w.as_array();
    let mean = (0..3).map(|i| w[i] * ps.mean[i]).sum();
    let mut variance = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            variance += w[i] * ps.cov[i][j] * w[j];
        }
    }
    // a quadratic form of a PSD matrix; negative values are rounding
    EstimatorStats { mean, variance: variance.max(0.0) }
}

/// Output moments of `input` sent through the mode matrix `s`.
pub fn moments_through(s: &ModeMatrix, input: &InputState) -> OutputMoments {
    propagate(input, &BogoliubovTransform::from_mode_matrix_unchecked(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interferometer::{fwm_matrix, total_transform, FwmParams, InterferometerConfig, ModePair, PhaseShifts};
    use crate::lie::{group_element, ModeMatrix};
    use crate::matrix::ZERO;

    fn zero_moments() -> OutputMoments {
        OutputMoments { mu: [ZERO; 3], n: Matrix3::zero(), m: Matrix3::zero() }
    }

    #[test]
    fn identity_gives_trivial_blocks() {
        let t = BogoliubovTransform::from_mode_matrix(&ModeMatrix::identity()).unwrap();
        assert_eq!(t.a, Matrix3::identity());
        assert_eq!(t.b, Matrix3::zero());
        let m = propagate(&InputState::vacuum(), &t);
        assert_eq!(m, zero_moments());
    }

    #[test]
    fn mixer_blocks() {
        let beta = 1.4f64;
        let s = fwm_matrix(&FwmParams { beta, theta: 0.0, pair: ModePair::Modes12 });
        let t = BogoliubovTransform::from_mode_matrix(&s).unwrap();
        let (c, sh) = ((beta / 2.0).cosh(), (beta / 2.0).sinh());
        let want_a = Matrix3::from_diagonal(&[C64::new(c, 0.0), C64::new(c, 0.0), C64::new(1.0, 0.0)]);
        assert!(t.a.max_abs_diff(&want_a) < 1e-15);
        let mut want_b = Matrix3::zero();
        want_b[(0, 1)] = C64::new(sh, 0.0);
        want_b[(1, 0)] = C64::new(sh, 0.0);
        assert!(t.b.max_abs_diff(&want_b) < 1e-15);
    }

    #[test]
    fn non_member_is_rejected() {
        let mut bad = Matrix3::identity();
        bad[(1, 1)] = C64::new(3.0, 0.0);
        assert!(BogoliubovTransform::from_mode_matrix(&ModeMatrix(bad)).is_err());
    }

    #[test]
    fn random_elements_preserve_commutators() {
        for k in 0..20 {
            let a: [f64; 8] = core::array::from_fn(|m| ((k * 8 + m) as f64 * 0.7548776662).fract() * 2.0 - 1.0);
            let t = BogoliubovTransform::from_mode_matrix(&group_element(&a)).unwrap();
            assert!(t.commutation_defect() < 1e-10);
        }
    }

    #[test]
    fn coherent_through_identity() {
        let input = InputState::coherent(1, C64::new(2.0, 0.0));
        let m = moments_through(&ModeMatrix::identity(), &input);
        assert_eq!(m.mu, [C64::new(2.0, 0.0), ZERO, ZERO]);
        assert_eq!(m.n, Matrix3::zero());
        let ps = photon_statistics(&m);
        assert_eq!(ps.mean, [4.0, 0.0, 0.0]);
        assert_eq!(ps.cov[0][0], 4.0);
    }

    #[test]
    fn two_mode_squeezed_vacuum_statistics() {
        let beta = 0.4f64;
        let s = fwm_matrix(&FwmParams { beta, theta: 0.0, pair: ModePair::Modes12 });
        let ps = photon_statistics(&moments_through(&s, &InputState::vacuum()));
        let (sh2, ch2) = ((beta / 2.0).sinh().powi(2), (beta / 2.0).cosh().powi(2));
        assert!((ps.mean[0] - sh2).abs() < 1e-15);
        assert!((ps.cov[0][0] - sh2 * ch2).abs() < 1e-15);
        assert!((ps.cov[0][1] - sh2 * ch2).abs() < 1e-15);
        assert_eq!(ps.cov[2][2], 0.0);
    }

    #[test]
    fn estimator_stats_examples() {
        let ps = photon_statistics(&zero_moments());
        let e = estimator_stats(&ps, &DetectorWeights::new(0.0, 0.0, 0.0));
        assert_eq!((e.mean, e.variance), (0.0, 0.0));
        let cfg = InterferometerConfig::new([1.0, 2.0, 0.3, 0.7], [0.1, 0.2, 2.0, 3.0], PhaseShifts::new(0.4, -0.2, 1.0));
        let ps = photon_statistics(&moments_through(&total_transform(&cfg), &InputState::vacuum()));
        let e = estimator_stats(&ps, &DetectorWeights::new(1.0, -1.0, -1.0));
        assert!(e.variance < 1e-10, "{}", e.variance);
        assert!(e.mean.abs() < 1e-10);
    }

    #[test]
    fn moments_are_physical() {
        let cfg = InterferometerConfig::new([1.0, 2.0, 0.3, 0.7], [0.1, 0.2, 2.0, 3.0], PhaseShifts::new(0.4, -0.2, 1.0));
        let m = moments_through(&total_transform(&cfg), &InputState::coherent(2, C64::new(0.3, -1.0)));
        assert!(m.is_physical(1e-10));
    }
}
