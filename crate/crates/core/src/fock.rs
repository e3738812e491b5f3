//! Truncated two-mode Fock space.
//!
//! States `|n, m⟩` are kept when `n + m ≤ N_max` (and, for the emitter of the
//! Jaynes-Cummings variant, `m ≤ cap`). Ordering is by total excitation, then
//! by `n` descending, so serialized matrices are reproducible across runs.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use ndarray::Array2;

use crate::linalg;
use crate::{Error, Result, C64};

/// One of the two bosonic modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    One,
    Two,
}

impl Mode {
    pub fn from_index(index: usize) -> Result<Self> {
        match index {
            1 => Ok(Mode::One),
            2 => Ok(Mode::Two),
            other => Err(Error::InvalidMode(other)),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Mode::One => 1,
            Mode::Two => 2,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Mode::One => Mode::Two,
            Mode::Two => Mode::One,
        }
    }

    /// Occupation of this mode in the state `(n, m)`.
    pub fn count(self, state: (usize, usize)) -> usize {
        match self {
            Mode::One => state.0,
            Mode::Two => state.1,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Identifies the truncated space an operator or state lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisTag {
    pub cutoff: usize,
    pub mode2_cap: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockBasis {
    tag: BasisTag,
    states: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
}

impl FockBasis {
    /// All `(n, m)` with `n + m ≤ cutoff`.
    pub fn new(cutoff: usize) -> Self {
        Self::build(BasisTag { cutoff, mode2_cap: None })
    }

    /// Same as [`FockBasis::new`] with mode 2 additionally capped at `cap`
    /// excitations (`cap = 1` turns mode 2 into a two-level emitter).
    pub fn with_mode2_cap(cutoff: usize, cap: usize) -> Self {
        Self::build(BasisTag { cutoff, mode2_cap: Some(cap) })
    }

    pub fn from_tag(tag: BasisTag) -> Self {
        Self::build(tag)
    }

    fn build(tag: BasisTag) -> Self {
        let cap = tag.mode2_cap.unwrap_or(usize::MAX);
        let mut states = Vec::new();
        for total in 0..=tag.cutoff {
            for n in (0..=total).rev() {
                let m = total - n;
                if m <= cap {
                    states.push((n, m));
                }
            }
        }
        let index = states.iter().enumerate().map(|(k, &s)| (s, k)).collect();
        FockBasis { tag, states, index }
    }

    pub fn tag(&self) -> BasisTag {
        self.tag
    }

    pub fn cutoff(&self) -> usize {
        self.tag.cutoff
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[(usize, usize)] {
        &self.states
    }

    pub fn state(&self, k: usize) -> (usize, usize) {
        self.states[k]
    }

    pub fn index_of(&self, n: usize, m: usize) -> Option<usize> {
        self.index.get(&(n, m)).copied()
    }

    /// Annihilation operator of `mode`; transitions leaving the basis are dropped.
    pub fn annihilation(&self, mode: Mode) -> Operator {
        let d = self.len();
        let mut matrix = Array2::zeros((d, d));
        for (col, &(n, m)) in self.states.iter().enumerate() {
            let (target, amp) = match mode {
                Mode::One if n > 0 => ((n - 1, m), (n as f64).sqrt()),
                Mode::Two if m > 0 => ((n, m - 1), (m as f64).sqrt()),
                _ => continue,
            };
            if let Some(row) = self.index_of(target.0, target.1) {
                matrix[[row, col]] = C64::new(amp, 0.0);
            }
        }
        Operator { tag: self.tag, matrix }
    }

    pub fn creation(&self, mode: Mode) -> Operator {
        self.annihilation(mode).adjoint()
    }

    /// Number operator, diagonal by construction.
    pub fn number(&self, mode: Mode) -> Operator {
        let d = self.len();
        let mut matrix = Array2::zeros((d, d));
        for (k, &s) in self.states.iter().enumerate() {
            matrix[[k, k]] = C64::new(mode.count(s) as f64, 0.0);
        }
        Operator { tag: self.tag, matrix }
    }

    pub fn identity(&self) -> Operator {
        Operator { tag: self.tag, matrix: Array2::eye(self.len()) }
    }

    pub fn zero_operator(&self) -> Operator {
        let d = self.len();
        Operator { tag: self.tag, matrix: Array2::zeros((d, d)) }
    }

    /// Population of the states with `n + m = cutoff`.
    pub fn top_manifold_population(&self, rho: &DensityMatrix) -> f64 {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, &(n, m))| n + m == self.cutoff())
            .map(|(k, _)| rho.matrix[[k, k]].re)
            .sum()
    }

    fn check(&self, tag: BasisTag) -> Result<()> {
        if tag != self.tag {
            return Err(Error::BasisMismatch { left: self.tag, right: tag });
        }
        Ok(())
    }
}

/// Enumerates the truncated basis for `n + m ≤ n_max`.
pub fn build_basis(n_max: usize) -> FockBasis {
    FockBasis::new(n_max)
}

/// `â₁` or `â₂` selected by integer index.
pub fn mode_annihilation(basis: &FockBasis, mode: usize) -> Result<Operator> {
    Ok(basis.annihilation(Mode::from_index(mode)?))
}

/// Dense operator over a [`FockBasis`].
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    tag: BasisTag,
    matrix: Array2<C64>,
}

impl Operator {
    pub fn new(tag: BasisTag, matrix: Array2<C64>) -> Result<Self> {
        let expected = FockBasis::from_tag(tag).len();
        if matrix.nrows() != expected || matrix.ncols() != expected {
            return Err(Error::DimensionMismatch { expected, got: matrix.nrows() });
        }
        Ok(Operator { tag, matrix })
    }

    pub fn tag(&self) -> BasisTag {
        self.tag
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Operator {
        Operator { tag: self.tag, matrix: self.matrix.t().mapv(|z| z.conj()) }
    }

    pub fn scale(&self, factor: C64) -> Operator {
        Operator { tag: self.tag, matrix: &self.matrix * factor }
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    pub fn norm(&self) -> f64 {
        linalg::frobenius(&self.matrix)
    }

    /// `‖A − A†‖_F / ‖A‖_F ≤ tol` (zero counts as Hermitian).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        linalg::hermitian_defect(&self.matrix) <= tol
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.tag, rhs.tag, "operators on different bases");
        Operator { tag: self.tag, matrix: &self.matrix + &rhs.matrix }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.tag, rhs.tag, "operators on different bases");
        Operator { tag: self.tag, matrix: &self.matrix - &rhs.matrix }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.tag, rhs.tag, "operators on different bases");
        Operator { tag: self.tag, matrix: self.matrix.dot(&rhs.matrix) }
    }
}

/// Tolerances of the [`DensityMatrix`] invariants.
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;
pub const NEGATIVITY_TOL: f64 = 1e-8;

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    tag: BasisTag,
    matrix: Array2<C64>,
}

impl DensityMatrix {
    /// Validates all invariants, including positivity.
    pub fn new(tag: BasisTag, matrix: Array2<C64>) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(tag, matrix);
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(tag: BasisTag, matrix: Array2<C64>) -> Self {
        DensityMatrix { tag, matrix }
    }

    pub fn vacuum(basis: &FockBasis) -> Self {
        let d = basis.len();
        let mut matrix = Array2::zeros((d, d));
        matrix[[0, 0]] = C64::new(1.0, 0.0);
        DensityMatrix { tag: basis.tag(), matrix }
    }

    /// `|ψ⟩⟨ψ|` after normalizing `amplitudes`.
    pub fn from_pure(basis: &FockBasis, amplitudes: &[C64]) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), got: amplitudes.len() });
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        let d = basis.len();
        let matrix = Array2::from_shape_fn((d, d), |(i, j)| {
            amplitudes[i] * amplitudes[j].conj() / (norm * norm)
        });
        Ok(DensityMatrix { tag: basis.tag(), matrix })
    }

    /// Fock state `|n, m⟩`.
    pub fn fock(basis: &FockBasis, n: usize, m: usize) -> Result<Self> {
        let k = basis
            .index_of(n, m)
            .ok_or_else(|| Error::InvalidState(format!("|{n},{m}⟩ outside the basis")))?;
        let mut amps = vec![C64::new(0.0, 0.0); basis.len()];
        amps[k] = C64::new(1.0, 0.0);
        Self::from_pure(basis, &amps)
    }

    /// Product coherent state from the truncated number-state expansion,
    /// renormalized on the basis.
    pub fn coherent(basis: &FockBasis, alpha1: C64, alpha2: C64) -> Result<Self> {
        let amps: Vec<C64> = basis
            .states()
            .iter()
            .map(|&(n, m)| {
                alpha1.powu(n as u32) * alpha2.powu(m as u32)
                    / (factorial(n) * factorial(m)).sqrt()
            })
            .collect();
        Self::from_pure(basis, &amps)
    }

    /// Thermal state of `mode` with mean occupation `nbar` (other mode in
    /// vacuum), truncated and renormalized.
    pub fn thermal(basis: &FockBasis, mode: Mode, nbar: f64) -> Result<Self> {
        if nbar < 0.0 {
            return Err(Error::param("nbar", "must be non-negative"));
        }
        let ratio = nbar / (1.0 + nbar);
        let d = basis.len();
        let mut matrix = Array2::zeros((d, d));
        let mut total = 0.0;
        for (k, &s) in basis.states().iter().enumerate() {
            if mode.other().count(s) == 0 {
                let p = ratio.powi(mode.count(s) as i32);
                matrix[[k, k]] = C64::new(p, 0.0);
                total += p;
            }
        }
        matrix.mapv_inplace(|z| z / total);
        Ok(DensityMatrix { tag: basis.tag(), matrix })
    }

    pub fn tag(&self) -> BasisTag {
        self.tag
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.diag().sum()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_hermitian_trace()?;
        let min = self.eigenvalues()?.first().copied().unwrap_or(0.0);
        if min < -NEGATIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    pub(crate) fn validate_hermitian_trace(&self) -> Result<()> {
        let defect = linalg::hermitian_defect(&self.matrix);
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("hermiticity defect {defect:.3e}")));
        }
        let tr = self.trace();
        if (tr - 1.0).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        Ok(())
    }
}

/// `Tr(op · ρ)`.
pub fn expectation(rho: &DensityMatrix, op: &Operator) -> Result<C64> {
    if rho.tag != op.tag {
        return Err(Error::BasisMismatch { left: rho.tag, right: op.tag });
    }
    Ok(linalg::trace_of_product(&op.matrix, &rho.matrix))
}

/// Marginal photon-number distribution `P_n` of `mode`.
pub fn photon_distribution(basis: &FockBasis, rho: &DensityMatrix, mode: Mode) -> Result<Vec<f64>> {
    basis.check(rho.tag)?;
    let max = basis.states().iter().map(|&s| mode.count(s)).max().unwrap_or(0);
    let mut p = vec![0.0; max + 1];
    for (k, &s) in basis.states().iter().enumerate() {
        p[mode.count(s)] += rho.matrix[[k, k]].re;
    }
    Ok(p)
}

/// `Tr(ρ²)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    // Tr(ρ²) = Σ_ij |ρ_ij|² for Hermitian ρ
    rho.matrix.iter().map(|z| z.norm_sqr()).sum()
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn basis_sizes_and_order() {
        assert_eq!(build_basis(0).states(), &[(0, 0)]);
        assert_eq!(build_basis(2).states(), &[(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]);
        assert_eq!(build_basis(12).len(), 91);
        let b = build_basis(7);
        for (k, &(n, m)) in b.states().iter().enumerate() {
            assert_eq!(b.index_of(n, m), Some(k));
        }
        assert_eq!(b.len(), 8 * 9 / 2);
    }

    #[test]
    fn capped_basis_is_emitter_like() {
        let b = FockBasis::with_mode2_cap(2, 1);
        assert_eq!(b.states(), &[(0, 0), (1, 0), (0, 1), (2, 0), (1, 1)]);
    }

    #[test]
    fn annihilation_matrix_elements() {
        let b = build_basis(3);
        let a1 = mode_annihilation(&b, 1).unwrap();
        let m = a1.matrix();
        assert_eq!(m[[b.index_of(0, 0).unwrap(), b.index_of(1, 0).unwrap()]], C64::new(1.0, 0.0));
        assert_abs_diff_eq!(
            m[[b.index_of(1, 0).unwrap(), b.index_of(2, 0).unwrap()]].re,
            2f64.sqrt(),
            epsilon = 1e-15
        );
        assert!(matches!(mode_annihilation(&b, 3), Err(Error::InvalidMode(3))));
    }

    #[test]
    fn number_expectation_on_fock_state() {
        let b = build_basis(4);
        let a1 = b.annihilation(Mode::One);
        let n1 = &a1.adjoint() * &a1;
        let rho = DensityMatrix::fock(&b, 2, 1).unwrap();
        assert_abs_diff_eq!(expectation(&rho, &n1).unwrap().re, 2.0, epsilon = 1e-14);
        let vac = DensityMatrix::vacuum(&b);
        assert_eq!(expectation(&vac, &n1).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn expectation_rejects_basis_mismatch() {
        let rho = DensityMatrix::vacuum(&build_basis(2));
        let op = build_basis(3).number(Mode::One);
        assert!(matches!(expectation(&rho, &op), Err(Error::BasisMismatch { .. })));
    }

    #[test]
    fn coherent_state_mean_field() {
        let b = build_basis(12);
        let rho = DensityMatrix::coherent(&b, C64::new(0.3, 0.0), C64::new(0.0, 0.0)).unwrap();
        let a1 = b.annihilation(Mode::One);
        let mean = expectation(&rho, &a1).unwrap();
        assert!((mean - C64::new(0.3, 0.0)).norm() < 1e-6);
        rho.validate().unwrap();
    }

    #[test]
    fn thermal_state_moments_and_purity() {
        let b = build_basis(24);
        let rho = DensityMatrix::thermal(&b, Mode::One, 0.5).unwrap();
        let n = expectation(&rho, &b.number(Mode::One)).unwrap().re;
        assert!((n - 0.5).abs() < 1e-9);
        // 1/(2n̄+1)
        assert!((purity(&rho) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn photon_distribution_examples() {
        let b = build_basis(3);
        let vac = DensityMatrix::vacuum(&b);
        assert_eq!(photon_distribution(&b, &vac, Mode::One).unwrap()[0], 1.0);
        let rho = DensityMatrix::fock(&b, 1, 1).unwrap();
        for mode in [Mode::One, Mode::Two] {
            let p = photon_distribution(&b, &rho, mode).unwrap();
            assert_abs_diff_eq!(p[1], 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn purity_examples() {
        let b = build_basis(2);
        assert_abs_diff_eq!(purity(&DensityMatrix::fock(&b, 1, 0).unwrap()), 1.0, epsilon = 1e-15);
        let mut m = Array2::zeros((b.len(), b.len()));
        m[[0, 0]] = C64::new(0.5, 0.0);
        m[[1, 1]] = C64::new(0.5, 0.0);
        let mixed = DensityMatrix::new(b.tag(), m).unwrap();
        assert_abs_diff_eq!(purity(&mixed), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn invalid_density_matrices_rejected() {
        let b = build_basis(1);
        let mut m = Array2::zeros((3, 3));
        m[[0, 0]] = C64::new(1.5, 0.0);
        m[[1, 1]] = C64::new(-0.5, 0.0);
        assert!(DensityMatrix::new(b.tag(), m.clone()).is_err());
        m[[1, 1]] = C64::new(0.0, 0.0);
        assert!(DensityMatrix::new(b.tag(), m).is_err());
    }
}
