//! Dense real matrix kernels shared by every decomposition in the crate.
//!
//! The symplectic form is `ω(x, y) = xᵀJy` with `J = I_n ⊗ [[0, 1], [-1, 0]]`,
//! i.e. coordinates are interleaved as `(p₁, q₁, …, pₙ, qₙ)`.

mod partition;
mod skew;

pub use partition::common_eigenspace_partition;
pub(crate) use partition::{joint_eigenspaces, merge_odd_blocks};
pub use skew::{skew_canonical, SkewCanonical};

use std::ops::Deref;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Numerical thresholds used throughout the crate. All values are relative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Symmetry check, relative to `max(1, max |a_ij|)`.
    pub tol_sym: f64,
    /// Eigenvalue floor (relative to the largest eigenvalue magnitude) for definiteness.
    pub tol_pd: f64,
    /// Singular-value floor for rank and kernel decisions.
    pub tol_rank: f64,
    /// Commutation residual, relative to the product of the operands' norms.
    pub tol_commute: f64,
    /// Eigenvalue gap below which eigenvalues are grouped into one cluster.
    pub tol_cluster: f64,
    /// Acceptance threshold for post-construction residuals.
    pub tol_residual: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            tol_sym: 1e-10,
            tol_pd: 1e-10,
            tol_rank: 1e-9,
            tol_commute: 1e-10,
            tol_cluster: 1e-8,
            tol_residual: 1e-8,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("tol_sym", self.tol_sym),
            ("tol_pd", self.tol_pd),
            ("tol_rank", self.tol_rank),
            ("tol_commute", self.tol_commute),
            ("tol_cluster", self.tol_cluster),
            ("tol_residual", self.tol_residual),
        ];
        for (name, value) in fields {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must lie in (0, 1), got {value}"
                )));
            }
        }
        Ok(())
    }
}

/// Dense real symmetric matrix of even dimension `2n`.
///
/// Construction validates the shape and symmetry and then stores the exact
/// symmetric part `(M + Mᵀ)/2`, so downstream kernels see a bitwise symmetric
/// matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Validates with the default `tol_sym`.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(m, ToleranceConfig::default().tol_sym)
    }

    pub fn with_tolerance(m: DMatrix<f64>, tol_sym: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidDimension(format!(
                "matrix is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        let dim = m.nrows();
        if dim < 2 || !dim.is_multiple_of(2) {
            return Err(Error::InvalidDimension(format!(
                "dimension {dim} is not an even number >= 2"
            )));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(
                "matrix has non-finite entries".into(),
            ));
        }
        let asymmetry = max_asymmetry(&m);
        let threshold = tol_sym * max_abs(&m).max(1.0);
        if asymmetry > threshold {
            return Err(Error::NotSymmetric {
                asymmetry,
                threshold,
            });
        }
        Ok(Self(symmetrize(&m)))
    }

    pub fn from_row_slice(dim: usize, data: &[f64]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::InvalidDimension(format!(
                "{} entries cannot form a {dim}x{dim} matrix",
                data.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, data))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Number of modes `n` (half the dimension).
    pub fn modes(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

impl Deref for SymMatrix {
    type Target = DMatrix<f64>;

    fn deref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

impl AsRef<DMatrix<f64>> for SymMatrix {
    fn as_ref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// The standard symplectic form on `R^{2n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardForm {
    pub n: usize,
    pub j: DMatrix<f64>,
}

pub fn standard_j(n: usize) -> Result<StandardForm> {
    if n == 0 {
        return Err(Error::InvalidDimension(
            "number of modes must be >= 1".into(),
        ));
    }
    Ok(StandardForm { n, j: j_matrix(n) })
}

/// `I_n ⊗ [[0, 1], [-1, 0]]`; `n = 0` gives the empty matrix.
pub fn j_matrix(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(2 * k, 2 * k + 1)] = 1.0;
        j[(2 * k + 1, 2 * k)] = -1.0;
    }
    j
}

/// `J·M` by row permutation and sign flips (exact).
pub fn j_mul(m: &DMatrix<f64>) -> DMatrix<f64> {
    debug_assert!(m.nrows().is_multiple_of(2));
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for k in 0..m.nrows() / 2 {
        out.row_mut(2 * k).copy_from(&m.row(2 * k + 1));
        out.row_mut(2 * k + 1).copy_from(&(-m.row(2 * k)));
    }
    out
}

/// `M·J` by column permutation and sign flips (exact).
pub fn mul_j(m: &DMatrix<f64>) -> DMatrix<f64> {
    debug_assert!(m.ncols().is_multiple_of(2));
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for k in 0..m.ncols() / 2 {
        out.column_mut(2 * k).copy_from(&(-m.column(2 * k + 1)));
        out.column_mut(2 * k + 1).copy_from(&m.column(2 * k));
    }
    out
}

/// `MᵀJM`.
pub(crate) fn symplectic_form_of(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.transpose() * j_mul(m)
}

/// `D ⊗ I₂` for a list of diagonal entries.
pub fn diag_kron_i2(d: &[f64]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(2 * d.len(), 2 * d.len());
    for (k, &x) in d.iter().enumerate() {
        out[(2 * k, 2 * k)] = x;
        out[(2 * k + 1, 2 * k + 1)] = x;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemiDefinite,
    Indefinite,
}

/// Eigendecomposition of a symmetric matrix with eigenvalues sorted ascending.
#[derive(Debug, Clone)]
pub(crate) struct Spectral {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl Spectral {
    pub fn of(m: &DMatrix<f64>) -> Self {
        let eig = SymmetricEigen::new(m.clone());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
        let vectors = eig.eigenvectors.select_columns(&order);
        Self { values, vectors }
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Largest eigenvalue magnitude (the spectral norm).
    pub fn radius(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    pub fn classify(&self, tol_pd: f64) -> Definiteness {
        let floor = tol_pd * self.radius();
        if self.min() > floor {
            Definiteness::PositiveDefinite
        } else if self.min() >= -floor {
            Definiteness::PositiveSemiDefinite
        } else {
            Definiteness::Indefinite
        }
    }

    /// `V f(Λ) Vᵀ`, symmetrized.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let mut scaled = self.vectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.values[k]);
        }
        symmetrize(&(scaled * self.vectors.transpose()))
    }
}

pub fn classify_definiteness(a: &SymMatrix, cfg: &ToleranceConfig) -> Definiteness {
    Spectral::of(a).classify(cfg.tol_pd)
}

/// Spectral power `A^s`.
///
/// Any `s` is accepted for positive definite `A`; positive semidefinite `A`
/// only admits `s >= 1`, with round-off negative eigenvalues clamped to zero.
pub fn sym_power(a: &SymMatrix, s: f64, cfg: &ToleranceConfig) -> Result<SymMatrix> {
    if !s.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "exponent must be finite, got {s}"
        )));
    }
    let spec = Spectral::of(a);
    match spec.classify(cfg.tol_pd) {
        Definiteness::PositiveDefinite => {}
        Definiteness::PositiveSemiDefinite if s >= 1.0 => {}
        _ => {
            return Err(Error::NotPositiveDefinite {
                index: 0,
                min_eigenvalue: spec.min(),
                max_eigenvalue: spec.max(),
            })
        }
    }
    Ok(SymMatrix(spec.apply(|x| x.max(0.0).powf(s))))
}

/// Matrix whose columns span a subspace of `R^{ambient_dim}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    cols: DMatrix<f64>,
}

impl SubspaceBasis {
    /// Validates that the columns are linearly independent.
    pub fn new(cols: DMatrix<f64>, cfg: &ToleranceConfig) -> Result<Self> {
        if cols.ncols() > 0 {
            let sv = cols.singular_values();
            let max = sv.max();
            let min = sv.min();
            if !(max > 0.0) || min <= cfg.tol_rank * max {
                return Err(Error::InvalidArgument(format!(
                    "basis columns are linearly dependent (singular values in [{min:e}, {max:e}])"
                )));
            }
        }
        Ok(Self { cols })
    }

    pub(crate) fn from_orthonormal(cols: DMatrix<f64>) -> Self {
        Self { cols }
    }

    /// The zero subspace.
    pub fn empty(ambient_dim: usize) -> Self {
        Self {
            cols: DMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.cols.nrows()
    }

    pub fn dim(&self) -> usize {
        self.cols.ncols()
    }

    pub fn cols(&self) -> &DMatrix<f64> {
        &self.cols
    }

    pub fn into_cols(self) -> DMatrix<f64> {
        self.cols
    }
}

/// Orthonormal basis of the numerical kernel: eigenvectors whose eigenvalue is
/// at most `tol_rank · λ_max`.
pub fn kernel_basis(a: &SymMatrix, cfg: &ToleranceConfig) -> SubspaceBasis {
    SubspaceBasis::from_orthonormal(kernel_of(&Spectral::of(a), cfg.tol_rank))
}

pub(crate) fn kernel_of(spec: &Spectral, tol_rank: f64) -> DMatrix<f64> {
    let floor = tol_rank * spec.radius();
    let idx: Vec<usize> = (0..spec.values.len())
        .filter(|&i| spec.values[i] <= floor)
        .collect();
    spec.vectors.select_columns(&idx)
}

/// `‖lhs − rhs‖_F / max(1, scale)`.
pub fn rel_residual(lhs: &DMatrix<f64>, rhs: &DMatrix<f64>, scale: f64) -> Result<f64> {
    if lhs.shape() != rhs.shape() {
        return Err(Error::InvalidDimension(format!(
            "shape mismatch: {:?} vs {:?}",
            lhs.shape(),
            rhs.shape()
        )));
    }
    Ok((lhs - rhs).norm() / scale.max(1.0))
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub(crate) fn skew_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m - m.transpose()) * 0.5
}

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Replaces `q` by the nearest matrix with orthonormal columns, `Q (QᵀQ)^{-1/2}`.
pub(crate) fn orthonormalize(q: &DMatrix<f64>) -> DMatrix<f64> {
    if q.ncols() == 0 {
        return q.clone();
    }
    let gram = Spectral::of(&(q.transpose() * q));
    q * gram.apply(|x| 1.0 / x.sqrt())
}

/// `‖SᵀJS − J‖_F`.
pub fn symplectic_residual(s: &DMatrix<f64>) -> f64 {
    let j = j_matrix(s.ncols() / 2);
    (symplectic_form_of(s) - j).norm()
}

/// `‖SᵀAS − D⊗I₂‖_F / ‖A‖_F` (absolute when `A = 0`).
pub fn diagonalization_residual(a: &DMatrix<f64>, s: &DMatrix<f64>, spectrum: &[f64]) -> f64 {
    let diff = (s.transpose() * a * s - diag_kron_i2(spectrum)).norm();
    let scale = a.norm();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Threshold above which a condition-number warning is attached to results.
pub(crate) const CONDITION_WARNING: f64 = 1e12;
