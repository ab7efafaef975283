//! Small dense complex matrices with compile-time dimension.
//!
//! The defining representation of su(1,2) is 3×3 and the adjoint
//! representation is 8×8, so everything here is stack allocated and `Copy`.

use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Dense `N × N` complex matrix stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix<const N: usize>(pub [[C64; N]; N]);

/// 3×3 complex matrix.
pub type Matrix3 = Matrix<3>;
/// 8×8 complex matrix.
pub type Matrix8 = Matrix<8>;

impl<const N: usize> Default for Matrix<N> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const N: usize> Matrix<N> {
    pub const fn zero() -> Self {
        Matrix([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn from_diagonal(d: &[C64; N]) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            m.0[i][i] = d[i];
        }
        m
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].conj())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * c)
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    /// `self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..N)
            .map(|j| (0..N).map(|i| self.0[i][j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Solves `self · X = rhs` by Gaussian elimination with partial pivoting.
    /// Returns `None` when a pivot underflows.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        let mut a = self.0;
        let mut b = rhs.0;
        for col in 0..N {
            let pivot = (col..N).max_by(|&x, &y| {
                a[x][col]
                    .norm()
                    .partial_cmp(&a[y][col].norm())
                    .unwrap_or(core::cmp::Ordering::Equal)
            })?;
            if a[pivot][col].norm() < f64::MIN_POSITIVE {
                return None;
            }
            a.swap(col, pivot);
            b.swap(col, pivot);
            let inv = ONE / a[col][col];
            for row in col + 1..N {
                let factor = a[row][col] * inv;
                if factor == ZERO {
                    continue;
                }
                for k in col..N {
                    let v = a[col][k];
                    a[row][k] -= factor * v;
                }
                for k in 0..N {
                    let v = b[col][k];
                    b[row][k] -= factor * v;
                }
            }
        }
        let mut x = [[ZERO; N]; N];
        for k in 0..N {
            for row in (0..N).rev() {
                let mut acc = b[row][k];
                for c in row + 1..N {
                    acc -= a[row][c] * x[c][k];
                }
                x[row][k] = acc / a[row][row];
            }
        }
        Some(Matrix(x))
    }

    pub fn inverse(&self) -> Option<Self> {
        self.solve(&Self::identity())
    }

    /// Matrix exponential by scaling and squaring with a diagonal [6/6] Padé
    /// approximant. The argument is scaled until its 1-norm is at most 1/2,
    /// where the Padé truncation error is below 1e-17.
    pub fn expm(&self) -> Self {
        // c_k = (2q-k)! q! / ((2q)! k! (q-k)!), q = 6
        const PADE6: [f64; 7] = [
            1.0,
            1.0 / 2.0,
            5.0 / 44.0,
            1.0 / 66.0,
            1.0 / 792.0,
            1.0 / 15840.0,
            1.0 / 665280.0,
        ];
        let norm = self.norm_one();
        let mut squarings = 0u32;
        if norm > 0.5 {
            squarings = (norm / 0.5).log2().ceil() as u32;
        }
        let a = self.scale(C64::new(0.5f64.powi(squarings as i32), 0.0));
        let mut numer = Self::identity();
        let mut denom = Self::identity();
        let mut power = Self::identity();
        for (k, &c) in PADE6.iter().enumerate().skip(1) {
            power = power * a;
            let term = power.scale(C64::new(c, 0.0));
            numer += term;
            if k % 2 == 0 {
                denom += term;
            } else {
                denom = denom - term;
            }
        }
        let mut r = denom
            .solve(&numer)
            .expect("Padé denominator is well conditioned for scaled arguments");
        for _ in 0..squarings {
            r = r * r;
        }
        r
    }
}

impl Matrix3 {
    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
}

impl<const N: usize> Index<(usize, usize)> for Matrix<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Matrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zero();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    out.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        out
    }
}

impl<const N: usize> Mul<[C64; N]> for Matrix<N> {
    type Output = [C64; N];
    fn mul(self, v: [C64; N]) -> [C64; N] {
        let mut out = [ZERO; N];
        for i in 0..N {
            out[i] = (0..N).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<const N: usize> AddAssign for Matrix<N> {
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] += rhs.0[i][j];
            }
        }
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl<const N: usize> Neg for Matrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|i, j| -self.0[i][j])
    }
}
