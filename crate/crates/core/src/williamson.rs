//! Williamson decomposition of a single positive definite matrix.
//!
//! For `A > 0`, `Y = A^{1/2} J A^{1/2}` is an invertible skew-symmetric matrix.
//! An orthogonal `U` with `UᵀYU = (D ⊗ I₂) J` gives the symplectic congruence
//! `S = A^{-1/2} U (D^{1/2} ⊗ I₂)` with `SᵀAS = D ⊗ I₂`. The same pieces are
//! reused by [`crate::simdiag`], where `U` is additionally constrained to
//! respect the joint eigenspaces of the other family members.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matcore::{
    diagonalization_residual, j_mul, skew_canonical, skew_part, symplectic_residual,
    Definiteness, Spectral, SymMatrix, ToleranceConfig, CONDITION_WARNING,
};

#[derive(Debug, Clone)]
pub struct WilliamsonResult {
    /// Symplectic congruence with `SᵀAS = diag(d) ⊗ I₂`.
    pub s: DMatrix<f64>,
    /// Symplectic eigenvalues, nondecreasing.
    pub d: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Square roots of a positive definite matrix.
pub(crate) struct Metric {
    pub sqrt: DMatrix<f64>,
    pub inv_sqrt: DMatrix<f64>,
    pub warnings: Vec<String>,
}

impl Metric {
    pub fn new(a: &DMatrix<f64>, index: usize, cfg: &ToleranceConfig) -> Result<Self> {
        let spec = Spectral::of(a);
        if spec.classify(cfg.tol_pd) != Definiteness::PositiveDefinite {
            return Err(Error::NotPositiveDefinite {
                index,
                min_eigenvalue: spec.min(),
                max_eigenvalue: spec.max(),
            });
        }
        let mut warnings = Vec::new();
        let cond = spec.max() / spec.min();
        if cond > CONDITION_WARNING {
            warnings.push(format!(
                "matrix {index} has condition number {cond:.3e}; expect precision loss"
            ));
        }
        Ok(Self {
            sqrt: spec.apply(f64::sqrt),
            inv_sqrt: spec.apply(|x| 1.0 / x.sqrt()),
            warnings,
        })
    }

    /// `A^{1/2} J A^{1/2}`, exactly skew.
    pub fn hamiltonian_kernel(&self) -> DMatrix<f64> {
        skew_part(&(&self.sqrt * j_mul(&self.sqrt)))
    }

    /// `A^{-1/2} U (D^{1/2} ⊗ I₂)`.
    pub fn congruence(&self, u: &DMatrix<f64>, deltas: &[f64]) -> DMatrix<f64> {
        let mut s = &self.inv_sqrt * u;
        for (k, d) in deltas.iter().enumerate() {
            let scale = d.sqrt();
            s.column_mut(2 * k).scale_mut(scale);
            s.column_mut(2 * k + 1).scale_mut(scale);
        }
        s
    }
}

/// Gate applied to every finished construction.
pub(crate) fn verify_congruence(
    s: &DMatrix<f64>,
    members: &[(&DMatrix<f64>, &[f64])],
    cfg: &ToleranceConfig,
) -> Result<()> {
    let sympl = symplectic_residual(s);
    let threshold = cfg.tol_residual;
    if !(sympl <= threshold) {
        return Err(Error::NumericalFailure {
            stage: "symplecticity of the congruence",
            residual: sympl,
            threshold,
        });
    }
    for (a, spectrum) in members {
        let residual = diagonalization_residual(a, s, spectrum);
        if !(residual <= cfg.tol_residual) {
            return Err(Error::NumericalFailure {
                stage: "diagonalization by the congruence",
                residual,
                threshold: cfg.tol_residual,
            });
        }
    }
    Ok(())
}

/// Symplectic eigenvalues of a positive semidefinite matrix: the nonnegative
/// imaginary parts of the eigenvalues of the Hamilton map `JᵀA`, sorted
/// nondecreasing.
///
/// This goes through a general (nonsymmetric) eigensolver and is independent
/// of the construction in [`williamson`].
pub fn symplectic_eigenvalues(a: &SymMatrix, cfg: &ToleranceConfig) -> Result<Vec<f64>> {
    let spec = Spectral::of(a);
    if spec.classify(cfg.tol_pd) == Definiteness::Indefinite {
        return Err(Error::NotPositiveSemidefinite {
            index: 0,
            min_eigenvalue: spec.min(),
            max_eigenvalue: spec.max(),
        });
    }
    let hamilton = -j_mul(a);
    let mut imag: Vec<f64> = hamilton
        .complex_eigenvalues()
        .iter()
        .map(|z| z.im)
        .collect();
    imag.sort_by(|x, y| y.total_cmp(x));
    let mut d: Vec<f64> = imag[..a.modes()].iter().map(|x| x.max(0.0)).collect();
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Williamson decomposition `SᵀAS = diag(d) ⊗ I₂` of a positive definite `A`.
pub fn williamson(a: &SymMatrix, cfg: &ToleranceConfig) -> Result<WilliamsonResult> {
    let metric = Metric::new(a, 0, cfg)?;
    let y = metric.hamiltonian_kernel();
    let canon = skew_canonical(&y, cfg)?;
    if canon.zero_dim != 0 {
        return Err(Error::NumericalFailure {
            stage: "skew canonical form of A^{1/2} J A^{1/2}",
            residual: canon.zero_dim as f64,
            threshold: 0.0,
        });
    }
    let s = metric.congruence(&canon.q, &canon.deltas);
    verify_congruence(&s, &[(a.matrix(), &canon.deltas)], cfg)?;
    Ok(WilliamsonResult {
        s,
        d: canon.deltas,
        warnings: metric.warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthosymplecticCheck {
    pub diagonalizable: bool,
    /// `‖JA − AJ‖_F`.
    pub residual: f64,
    pub threshold: f64,
}

/// A positive definite `A` is diagonalizable by an orthosymplectic matrix
/// exactly when it commutes with `J`.
pub fn is_orthosymplectic_diagonalizable(
    a: &SymMatrix,
    cfg: &ToleranceConfig,
) -> Result<OrthosymplecticCheck> {
    let spec = Spectral::of(a);
    if spec.classify(cfg.tol_pd) != Definiteness::PositiveDefinite {
        return Err(Error::NotPositiveDefinite {
            index: 0,
            min_eigenvalue: spec.min(),
            max_eigenvalue: spec.max(),
        });
    }
    let residual = (j_mul(a) - crate::matcore::mul_j(a)).norm();
    let threshold = cfg.tol_commute * a.norm();
    Ok(OrthosymplecticCheck {
        diagonalizable: residual <= threshold,
        residual,
        threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilliamsonCheck {
    /// `‖SᵀJS − J‖_F`.
    pub symplectic_residual: f64,
    /// `‖SᵀAS − D⊗I₂‖_F / ‖A‖_F`.
    pub diagonal_residual: f64,
    pub passed: bool,
}

pub fn check_williamson(
    a: &SymMatrix,
    res: &WilliamsonResult,
    cfg: &ToleranceConfig,
) -> Result<WilliamsonCheck> {
    if res.s.shape() != a.shape() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: res.s.nrows(),
        });
    }
    if res.d.len() != a.modes() {
        return Err(Error::DimensionMismatch {
            left: a.modes(),
            right: res.d.len(),
        });
    }
    let symplectic = symplectic_residual(&res.s);
    let diagonal = diagonalization_residual(a, &res.s, &res.d);
    Ok(WilliamsonCheck {
        symplectic_residual: symplectic,
        diagonal_residual: diagonal,
        passed: symplectic <= cfg.tol_residual && diagonal <= cfg.tol_residual,
    })
}
