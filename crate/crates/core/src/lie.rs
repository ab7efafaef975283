//! The su(1,2) algebra spanned by the eight pair-creation, beam-splitter and
//! phase Hamiltonians K₁..K₈, together with its 3×3 defining representation
//! on the operator vector `(â₁, â₂†, â₃†)` and its 8×8 adjoint representation.
//!
//! # Conventions
//!
//! * `generator_defining_rep(i)` is gᵢ = d/dα [e^{iαKᵢ} M e^{−iαKᵢ}] at α = 0,
//!   where `M = (â₁, â₂†, â₃†)ᵀ`; so `exp_generator(i, α) = exp(α·gᵢ)`.
//! * `generator_matrix(i)` is ρᵢ = −i·gᵢ, the matrix standing for Kᵢ itself.
//!   Heisenberg conjugation composes in reverse order, so ρ is an
//!   anti-homomorphism: `[ρᵢ, ρⱼ] = Σ table(i,j)ₖ ρₖ` holds with the
//!   commutation table exactly as tabulated ([`DEFINING_REP_SIGN`] = +1).
//! * At operator level the table entry `table(i,j)` is `[Kⱼ, Kᵢ]` (the
//!   column operator first), so `[Kᵢ, Kⱼ] = −table(i,j)`; this is
//!   [`OPERATOR_SIGN`]. The adjoint matrices use operator brackets:
//!   `adjoint_rep(i)[(j, k)]` is the coefficient of Kₖ in `[Kᵢ, Kⱼ]`, and
//!   reproduce the tabulated ad K₁ entrywise.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;


use crate::matrix::{Matrix3, Matrix8, C64, I, ONE, ZERO};

/// Sign relating `[ρᵢ, ρⱼ]` in the defining representation to the table.
pub const DEFINING_REP_SIGN: f64 = 1.0;
/// Sign relating the operator bracket `[Kᵢ, Kⱼ]` to the table.
pub const OPERATOR_SIGN: f64 = -1.0;

/// Default membership tolerance for [`is_pseudo_unitary`].
pub const MEMBERSHIP_TOL: f64 = 1e-10;
/// Default tolerance for structure-constant comparisons.
pub const STRUCTURE_TOL: f64 = 1e-9;

/// Index of one of the generators K₁..K₈ (one-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorIndex(u8);

impl GeneratorIndex {
    pub fn new(index: usize) -> Option<Self> {
        (1..=8).contains(&index).then_some(Self(index as u8))
    }

    /// One-based index.
    pub fn get(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn zero_based(self) -> usize {
        self.0 as usize - 1
    }

    pub fn all() -> impl Iterator<Item = Self> {
        (1..=8u8).map(Self)
    }
}

impl fmt::Display for GeneratorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K{}", self.0)
    }
}

/// 3×3 transformation acting on `(â₁, â₂†, â₃†)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeMatrix(pub Matrix3);

impl ModeMatrix {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    pub fn matrix(&self) -> &Matrix3 {
        &self.0
    }

    pub fn det(&self) -> C64 {
        self.0.det()
    }

    /// `J·S†·J`, which equals `S⁻¹` for group elements.
    pub fn pseudo_inverse(&self) -> Self {
        let j = metric();
        Self(j * self.0.adjoint() * j)
    }

    /// Residual `max |J·S†·J·S − I|`.
    pub fn membership_defect(&self) -> f64 {
        (self.pseudo_inverse().0 * self.0).max_abs_diff(&Matrix3::identity())
    }
}

impl core::ops::Mul for ModeMatrix {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

/// Metric `J = diag(1, −1, −1)`.
pub fn metric() -> Matrix3 {
    Matrix3::from_diagonal(&[ONE, -ONE, -ONE])
}

/// `true` iff `max |J·S†·J·S − I| ≤ tol`.
pub fn is_pseudo_unitary(s: &ModeMatrix, tol: f64) -> bool {
    s.0.is_finite() && s.membership_defect() <= tol
}

/// Infinitesimal generator gᵢ of the conjugation by `e^{iαKᵢ}`.
pub fn generator_defining_rep(i: GeneratorIndex) -> ModeMatrix {
    let h = 0.5;
    let r3 = 3f64.sqrt();
    let mut g = Matrix3::zero();
    match i.get() {
        1 => {
            g[(0, 1)] = -I * h;
            g[(1, 0)] = I * h;
        }
        2 => {
            g[(0, 1)] = C64::new(-h, 0.0);
            g[(1, 0)] = C64::new(-h, 0.0);
        }
        3 => {
            g[(0, 2)] = -I * h;
            g[(2, 0)] = I * h;
        }
        4 => {
            g[(0, 2)] = C64::new(-h, 0.0);
            g[(2, 0)] = C64::new(-h, 0.0);
        }
        5 => {
            g[(1, 2)] = -I * h;
            g[(2, 1)] = -I * h;
        }
        6 => {
            g[(1, 2)] = C64::new(-h, 0.0);
            g[(2, 1)] = C64::new(h, 0.0);
        }
        7 => {
            g[(0, 0)] = -I * h;
            g[(1, 1)] = I * h;
        }
        8 => {
            g[(0, 0)] = -I / (2.0 * r3);
            g[(1, 1)] = -I / (2.0 * r3);
            g[(2, 2)] = I / r3;
        }
        _ => unreachable!("GeneratorIndex is always in 1..=8"),
    }
    ModeMatrix(g)
}

/// ρᵢ = −i·gᵢ: the matrix representing Kᵢ in the defining representation.
pub fn generator_matrix(i: GeneratorIndex) -> Matrix3 {
    generator_defining_rep(i).0.scale(-I)
}

/// Closed form of `exp(α·gᵢ)`.
///
/// The beam-splitter pair K₅/K₆ generates compact rotations, so their
/// entries are trigonometric throughout.
pub fn exp_generator(i: GeneratorIndex, alpha: f64) -> ModeMatrix {
    let (ch, sh) = ((alpha / 2.0).cosh(), (alpha / 2.0).sinh());
    let (c, s) = ((alpha / 2.0).cos(), (alpha / 2.0).sin());
    let re = |x: f64| C64::new(x, 0.0);
    let mut m = Matrix3::identity();
    match i.get() {
        1 => {
            m[(0, 0)] = re(ch);
            m[(0, 1)] = -I * sh;
            m[(1, 0)] = I * sh;
            m[(1, 1)] = re(ch);
        }
        2 => {
            m[(0, 0)] = re(ch);
            m[(0, 1)] = re(-sh);
            m[(1, 0)] = re(-sh);
            m[(1, 1)] = re(ch);
        }
        3 => {
            m[(0, 0)] = re(ch);
            m[(0, 2)] = -I * sh;
            m[(2, 0)] = I * sh;
            m[(2, 2)] = re(ch);
        }
        4 => {
            m[(0, 0)] = re(ch);
            m[(0, 2)] = re(-sh);
            m[(2, 0)] = re(-sh);
            m[(2, 2)] = re(ch);
        }
        5 => {
            m[(1, 1)] = re(c);
            m[(1, 2)] = -I * s;
            m[(2, 1)] = -I * s;
            m[(2, 2)] = re(c);
        }
        6 => {
            m[(1, 1)] = re(c);
            m[(1, 2)] = re(-s);
            m[(2, 1)] = re(s);
            m[(2, 2)] = re(c);
        }
        7 => {
            m[(0, 0)] = (-I * (alpha / 2.0)).exp();
            m[(1, 1)] = (I * (alpha / 2.0)).exp();
        }
        8 => {
            let r3 = 3f64.sqrt();
            m[(0, 0)] = (-I * (alpha / (2.0 * r3))).exp();
            m[(1, 1)] = (-I * (alpha / (2.0 * r3))).exp();
            m[(2, 2)] = (I * (alpha / r3)).exp();
        }
        _ => unreachable!("GeneratorIndex is always in 1..=8"),
    }
    ModeMatrix(m)
}

/// One term `coeff·Kₖ` of a bracket.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BracketTerm {
    pub coeff: C64,
    pub k: GeneratorIndex,
}

/// The 8×8 commutation table; `get(i, j)` is the entry in row Kᵢ, column Kⱼ.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstantTable {
    entries: [[Vec<BracketTerm>; 8]; 8],
}

impl StructureConstantTable {
    pub fn empty() -> Self {
        Self {
            entries: core::array::from_fn(|_| core::array::from_fn(|_| Vec::new())),
        }
    }

    pub fn get(&self, i: GeneratorIndex, j: GeneratorIndex) -> &[BracketTerm] {
        &self.entries[i.zero_based()][j.zero_based()]
    }

    pub fn set(&mut self, i: GeneratorIndex, j: GeneratorIndex, terms: Vec<BracketTerm>) {
        self.entries[i.zero_based()][j.zero_based()] = terms;
    }

    /// Dense coefficient vector of entry (i, j).
    pub fn coefficients(&self, i: GeneratorIndex, j: GeneratorIndex) -> [C64; 8] {
        let mut out = [ZERO; 8];
        for t in self.get(i, j) {
            out[t.k.zero_based()] += t.coeff;
        }
        out
    }

    /// The 28 unordered pairs i < j.
    pub fn independent_pairs() -> impl Iterator<Item = (GeneratorIndex, GeneratorIndex)> {
        GeneratorIndex::all()
            .flat_map(|i| GeneratorIndex::all().filter(move |j| *j > i).map(move |j| (i, j)))
    }
}

/// The commutation table of K₁..K₈ as tabulated (row Kᵢ, column Kⱼ).
pub fn commutator_table() -> StructureConstantTable {
    let q = 3f64.sqrt() / 2.0;
    let mut t = StructureConstantTable::empty();
    let mut put = |i: usize, j: usize, terms: &[(f64, usize)]| {
        let terms = terms
            .iter()
            .map(|&(im, k)| BracketTerm {
                coeff: C64::new(0.0, im),
                k: GeneratorIndex::new(k).unwrap(),
            })
            .collect();
        t.set(GeneratorIndex::new(i).unwrap(), GeneratorIndex::new(j).unwrap(), terms);
    };
    put(1, 2, &[(1.0, 7)]);
    put(1, 3, &[(0.5, 6)]);
    put(1, 4, &[(-0.5, 5)]);
    put(1, 5, &[(-0.5, 4)]);
    put(1, 6, &[(0.5, 3)]);
    put(1, 7, &[(1.0, 2)]);

    put(2, 1, &[(-1.0, 7)]);
    put(2, 3, &[(0.5, 5)]);
    put(2, 4, &[(0.5, 6)]);
    put(2, 5, &[(0.5, 3)]);
    put(2, 6, &[(0.5, 4)]);
    put(2, 7, &[(-1.0, 1)]);

    put(3, 1, &[(-0.5, 6)]);
    put(3, 2, &[(-0.5, 5)]);
    put(3, 4, &[(0.5, 7), (q, 8)]);
    put(3, 5, &[(-0.5, 2)]);
    put(3, 6, &[(-0.5, 1)]);
    put(3, 7, &[(0.5, 4)]);
    put(3, 8, &[(q, 4)]);

    put(4, 1, &[(0.5, 5)]);
    put(4, 2, &[(-0.5, 6)]);
    put(4, 3, &[(-0.5, 7), (-q, 8)]);
    put(4, 5, &[(0.5, 1)]);
    put(4, 6, &[(-0.5, 2)]);
    put(4, 7, &[(-0.5, 3)]);
    put(4, 8, &[(-q, 3)]);

    put(5, 1, &[(0.5, 4)]);
    put(5, 2, &[(-0.5, 3)]);
    put(5, 3, &[(0.5, 2)]);
    put(5, 4, &[(-0.5, 1)]);
    put(5, 6, &[(0.5, 7), (-q, 8)]);
    put(5, 7, &[(-0.5, 6)]);
    put(5, 8, &[(q, 6)]);

    put(6, 1, &[(-0.5, 3)]);
    put(6, 2, &[(-0.5, 4)]);
    put(6, 3, &[(0.5, 1)]);
    put(6, 4, &[(0.5, 2)]);
    put(6, 5, &[(-0.5, 7), (q, 8)]);
    put(6, 7, &[(0.5, 5)]);
    put(6, 8, &[(-q, 5)]);

    put(7, 1, &[(-1.0, 2)]);
    put(7, 2, &[(1.0, 1)]);
    put(7, 3, &[(-0.5, 4)]);
    put(7, 4, &[(0.5, 3)]);
    put(7, 5, &[(0.5, 6)]);
    put(7, 6, &[(-0.5, 5)]);

    put(8, 3, &[(-q, 4)]);
    put(8, 4, &[(q, 3)]);
    put(8, 5, &[(-q, 6)]);
    put(8, 6, &[(q, 5)]);
    t
}

/// 8×8 matrix of ad Kᵢ in the basis K₁..K₈.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdjointMatrix(pub Matrix8);

/// ad Kᵢ built from the tabulated structure constants.
pub fn adjoint_rep(i: GeneratorIndex) -> AdjointMatrix {
    adjoint_rep_from(&commutator_table(), i)
}

/// ad Kᵢ from an arbitrary table: entry (j, k) is the Kₖ coefficient of the
/// operator bracket `[Kᵢ, Kⱼ]`.
pub fn adjoint_rep_from(table: &StructureConstantTable, i: GeneratorIndex) -> AdjointMatrix {
    let mut m = Matrix8::zero();
    for j in GeneratorIndex::all() {
        let row = table.coefficients(i, j);
        for (k, c) in row.iter().enumerate() {
            m[(j.zero_based(), k)] = *c * OPERATOR_SIGN;
        }
    }
    AdjointMatrix(m)
}

/// `ad(Σ cᵢ Kᵢ) = Σ cᵢ ad Kᵢ`.
pub fn adjoint_of_combination(coeffs: &[f64; 8]) -> Matrix8 {
    let mut m = Matrix8::zero();
    for i in GeneratorIndex::all() {
        let c = coeffs[i.zero_based()];
        if c != 0.0 {
            m += adjoint_rep(i).0.scale(C64::new(c, 0.0));
        }
    }
    m
}

/// Linear map on span{K₁..K₈} induced by `e^{iX} Kⱼ e^{−iX}` for
/// `X = Σ cᵢKᵢ`: row j holds the expansion of the conjugated Kⱼ.
pub fn conjugation_action(coeffs: &[f64; 8]) -> Matrix8 {
    adjoint_of_combination(coeffs).scale(I).expm()
}

/// Outcome of a single named property check.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl PropertyCheck {
    fn new(name: impl Into<String>, passed: bool, detail: String) -> Self {
        Self { name: name.into(), passed, detail }
    }
}

/// ad K₁ exactly as tabulated (row-major, zero-based).
pub fn tabulated_ad_k1() -> Matrix8 {
    let mut m = Matrix8::zero();
    m[(1, 6)] = -I;
    m[(2, 5)] = -I * 0.5;
    m[(3, 4)] = I * 0.5;
    m[(4, 3)] = I * 0.5;
    m[(5, 2)] = -I * 0.5;
    m[(6, 1)] = -I;
    m
}

/// Deterministic sample of parameters in `[−scale, scale]`.
fn sample(k: usize, scale: f64) -> f64 {
    // golden-ratio sequence, evenly spread on the interval
    let x = (k as f64 * 0.618_033_988_749_894_8 + 0.25).fract();
    scale * (2.0 * x - 1.0)
}

/// Element built as an ordered product of all eight one-parameter subgroups.
pub fn group_element(alphas: &[f64; 8]) -> ModeMatrix {
    GeneratorIndex::all().fold(ModeMatrix::identity(), |acc, i| {
        acc * exp_generator(i, alphas[i.zero_based()])
    })
}

/// Runs the algebra's property suite against `table`.
///
/// The suite holds 28 bracket checks (one per unordered pair), the
/// antisymmetry, Jacobi and tabulated ad K₁ checks, and the group-level
/// checks on closed-form exponentials, closure and the conserved number
/// difference.
pub fn verify(table: &StructureConstantTable) -> Vec<PropertyCheck> {
    let mut out = Vec::new();
    let rho: Vec<Matrix3> = GeneratorIndex::all().map(generator_matrix).collect();
    let combine = |coeffs: &[C64; 8]| {
        let mut m = Matrix3::zero();
        for (c, r) in coeffs.iter().zip(&rho) {
            m += r.scale(*c);
        }
        m
    };

    for (i, j) in StructureConstantTable::independent_pairs() {
        let numeric = rho[i.zero_based()].commutator(&rho[j.zero_based()]);
        let tabulated = combine(&table.coefficients(i, j)).scale(C64::new(DEFINING_REP_SIGN, 0.0));
        let err = numeric.max_abs_diff(&tabulated);
        out.push(PropertyCheck::new(
            format!("bracket [{i},{j}]"),
            err <= STRUCTURE_TOL,
            format!("max deviation {err:.3e}"),
        ));
    }

    let mut antisym = 0.0f64;
    for i in GeneratorIndex::all() {
        for j in GeneratorIndex::all() {
            let a = table.coefficients(i, j);
            let b = table.coefficients(j, i);
            for k in 0..8 {
                antisym = antisym.max((a[k] + b[k]).norm());
            }
        }
    }
    out.push(PropertyCheck::new(
        "antisymmetry",
        antisym <= STRUCTURE_TOL,
        format!("max |t(i,j)+t(j,i)| {antisym:.3e}"),
    ));

    // Jacobi on the table alone: [a,[b,c]] + [b,[c,a]] + [c,[a,b]] = 0
    let bracket_vec = |x: &[C64; 8], y: &[C64; 8]| {
        let mut out = [ZERO; 8];
        for i in GeneratorIndex::all() {
            for j in GeneratorIndex::all() {
                let c = x[i.zero_based()] * y[j.zero_based()];
                if c == ZERO {
                    continue;
                }
                for (k, v) in table.coefficients(i, j).iter().enumerate() {
                    out[k] += c * v;
                }
            }
        }
        out
    };
    let unit = |i: GeneratorIndex| {
        let mut v = [ZERO; 8];
        v[i.zero_based()] = ONE;
        v
    };
    let mut jacobi = 0.0f64;
    for a in GeneratorIndex::all() {
        for b in GeneratorIndex::all() {
            for c in GeneratorIndex::all() {
                let (ea, eb, ec) = (unit(a), unit(b), unit(c));
                let t1 = bracket_vec(&ea, &bracket_vec(&eb, &ec));
                let t2 = bracket_vec(&eb, &bracket_vec(&ec, &ea));
                let t3 = bracket_vec(&ec, &bracket_vec(&ea, &eb));
                for k in 0..8 {
                    jacobi = jacobi.max((t1[k] + t2[k] + t3[k]).norm());
                }
            }
        }
    }
    out.push(PropertyCheck::new(
        "jacobi identity",
        jacobi <= STRUCTURE_TOL,
        format!("max residual {jacobi:.3e}"),
    ));

    let ad1 = adjoint_rep_from(table, GeneratorIndex::new(1).unwrap());
    let ad_err = ad1.0.max_abs_diff(&tabulated_ad_k1());
    out.push(PropertyCheck::new(
        "ad K1 matches tabulated matrix",
        ad_err <= STRUCTURE_TOL,
        format!("max deviation {ad_err:.3e}"),
    ));

    let mut trace_max = 0.0f64;
    for i in GeneratorIndex::all() {
        trace_max = trace_max.max(adjoint_rep_from(table, i).0.trace().norm());
    }
    out.push(PropertyCheck::new(
        "ad traceless",
        trace_max <= STRUCTURE_TOL,
        format!("max |tr ad K| {trace_max:.3e}"),
    ));

    let mut exp_err = 0.0f64;
    let mut member = 0.0f64;
    let mut infinitesimal = 0.0f64;
    let j = metric();
    for i in GeneratorIndex::all() {
        let g = generator_defining_rep(i).0;
        infinitesimal = infinitesimal.max((j * g.adjoint() * j + g).max_abs());
        for k in 0..25 {
            let alpha = sample(k + 8 * i.get(), 3.0);
            let closed = exp_generator(i, alpha);
            let dense = g.scale(C64::new(alpha, 0.0)).expm();
            exp_err = exp_err.max(closed.0.max_abs_diff(&dense));
            member = member.max(closed.membership_defect());
        }
    }
    out.push(PropertyCheck::new(
        "infinitesimal pseudo-unitarity",
        infinitesimal <= 1e-14,
        format!("max |J g† J + g| {infinitesimal:.3e}"),
    ));
    out.push(PropertyCheck::new(
        "closed-form exponentials match dense exponential",
        exp_err <= STRUCTURE_TOL,
        format!("max deviation {exp_err:.3e} over |alpha| <= 3"),
    ));
    out.push(PropertyCheck::new(
        "closed-form exponentials are group members",
        member <= MEMBERSHIP_TOL,
        format!("max defect {member:.3e}"),
    ));

    let mut closure = 0.0f64;
    for k in 0..200 {
        let a: [f64; 8] = core::array::from_fn(|m| sample(17 * k + m, 0.8));
        let b: [f64; 8] = core::array::from_fn(|m| sample(17 * k + m + 8, 0.8));
        let (x, y) = (group_element(&a), group_element(&b));
        if is_pseudo_unitary(&x, 1e-12) && is_pseudo_unitary(&y, 1e-12) {
            closure = closure.max((x * y).membership_defect());
        }
    }
    out.push(PropertyCheck::new(
        "group closure",
        closure <= MEMBERSHIP_TOL,
        format!("max product defect {closure:.3e}"),
    ));

    let mut det_dev = 0.0f64;
    for k in 0..50 {
        let a: [f64; 8] = core::array::from_fn(|m| sample(31 * k + m, 1.0));
        det_dev = det_dev.max((group_element(&a).det().norm() - 1.0).abs());
    }
    out.push(PropertyCheck::new(
        "unit-modulus determinant",
        det_dev <= MEMBERSHIP_TOL,
        format!("max ||det|-1| {det_dev:.3e}"),
    ));

    let conserved = conserved_number_generator();
    let mut comm = 0.0f64;
    for i in GeneratorIndex::all() {
        comm = comm.max(conserved.commutator(&generator_defining_rep(i).0).max_abs());
    }
    out.push(PropertyCheck::new(
        "n1-n2-n3 commutes with all generators",
        comm <= 1e-15,
        format!("max commutator {comm:.3e}"),
    ));
    out
}

/// Generator of the conjugation by `e^{iλ(n̂₁−n̂₂−n̂₃)}` on `(â₁, â₂†, â₃†)`.
/// It is the scalar `−i·I`, so it commutes with the whole algebra.
pub fn conserved_number_generator() -> Matrix3 {
    Matrix3::from_diagonal(&[-I, -I, -I])
}
