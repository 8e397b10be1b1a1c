//! Symplectic commutativity and simultaneous Williamson diagonalization.
//!
//! Symmetric `A, B` symplectically commute when `AJB = BJA`. For positive
//! definite `A` this is equivalent to `X = A^{-1/2} B A^{-1/2}` commuting with
//! `Y = A^{1/2} J A^{1/2}`, so `Y` preserves every eigenspace of `X` and can be
//! brought to canonical form inside each of them. The resulting orthogonal `U`
//! simultaneously gives `UᵀXU = Δ ⊗ I₂` and `UᵀYU = (D ⊗ I₂) J`, and
//! `S = A^{-1/2} U (D^{1/2} ⊗ I₂)` diagonalizes both matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matcore::{
    j_mul, joint_eigenspaces, merge_odd_blocks, skew_canonical, skew_part, sym_power, symmetrize,
    SymMatrix, ToleranceConfig,
};
use crate::williamson::{verify_congruence, Metric};

#[derive(Debug, Clone)]
pub struct SimDiagResult {
    /// Common symplectic congruence.
    pub s: DMatrix<f64>,
    /// One spectrum per input: `SᵀAᵢS = diag(spectra[i]) ⊗ I₂`. The first is
    /// nondecreasing; the others follow the same mode order.
    pub spectra: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

/// Hamilton map `H = JᵀA`, so that `uᵀAv = ω(u, Hv)` for `ω(x, y) = xᵀJy`.
pub fn hamilton_map(a: &SymMatrix) -> DMatrix<f64> {
    -j_mul(a)
}

fn same_dim(a: &SymMatrix, b: &SymMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// `AJB − BJA`, computed so that `A = B` gives exactly zero.
fn symplectic_commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * j_mul(b) - b * j_mul(a)
}

/// Gram matrix of the Poisson bracket `{Q_A, Q_B}` for `Q_M(u) = uᵀMu`.
///
/// `{Q_A, Q_B}(u) = (2Au)ᵀJ(2Bu)`, whose symmetric Gram matrix is
/// `C = 2(AJB − BJA)`.
pub fn poisson_bracket_gram(a: &SymMatrix, b: &SymMatrix) -> Result<DMatrix<f64>> {
    same_dim(a, b)?;
    let r = symplectic_commutator(a, b);
    Ok(&r + r.transpose())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommuteCheck {
    pub commutes: bool,
    /// `‖AJB − BJA‖_F`.
    pub residual: f64,
    /// `tol_commute · ‖A‖_F · ‖B‖_F`.
    pub threshold: f64,
}

impl CommuteCheck {
    /// Residual divided by `‖A‖_F · ‖B‖_F`.
    pub fn relative_residual(&self, cfg: &ToleranceConfig) -> f64 {
        let scale = self.threshold / cfg.tol_commute;
        if scale > 0.0 {
            self.residual / scale
        } else {
            self.residual
        }
    }
}

pub fn symplectically_commutes(
    a: &SymMatrix,
    b: &SymMatrix,
    cfg: &ToleranceConfig,
) -> Result<CommuteCheck> {
    same_dim(a, b)?;
    Ok(commute_check(a, b, cfg))
}

fn commute_check(a: &DMatrix<f64>, b: &DMatrix<f64>, cfg: &ToleranceConfig) -> CommuteCheck {
    let residual = symplectic_commutator(a, b).norm();
    let threshold = cfg.tol_commute * a.norm() * b.norm();
    CommuteCheck {
        commutes: residual <= threshold,
        residual,
        threshold,
    }
}

/// Fails with [`Error::NotCommuting`] on the first non-commuting pair.
pub(crate) fn require_pairwise_commuting(
    members: &[&DMatrix<f64>],
    cfg: &ToleranceConfig,
) -> Result<()> {
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let check = commute_check(members[i], members[j], cfg);
            if !check.commutes {
                let r = symplectic_commutator(members[i], members[j]);
                return Err(Error::NotCommuting {
                    first: i,
                    second: j,
                    residual: check.residual,
                    threshold: check.threshold,
                    bracket: Box::new(&r + r.transpose()),
                });
            }
        }
    }
    Ok(())
}

/// Mode ordering for [`simultaneous_congruence`].
#[derive(Debug, Clone, Copy)]
pub(crate) enum ModeOrder {
    /// By the symplectic spectrum of the metric.
    Metric,
    /// By the spectrum of the given member, ties broken by the metric.
    Member(usize),
}

pub(crate) struct Congruence {
    pub s: DMatrix<f64>,
    pub metric_spectrum: Vec<f64>,
    pub spectra: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

/// Common symplectic congruence for a positive definite metric and members
/// (positive semidefinite, each symplectically commuting with the metric).
/// Commutation is assumed to have been checked by the caller; residuals are
/// not verified here.
pub(crate) fn simultaneous_congruence(
    metric: &DMatrix<f64>,
    members: &[&DMatrix<f64>],
    order: ModeOrder,
    cfg: &ToleranceConfig,
) -> Result<Congruence> {
    let dim = metric.nrows();
    let root = Metric::new(metric, 0, cfg)?;
    let y = root.hamiltonian_kernel();
    let xs: Vec<DMatrix<f64>> = members
        .iter()
        .map(|b| symmetrize(&(&root.inv_sqrt * *b * &root.inv_sqrt)))
        .collect();

    // Round-off in A^{±1/2} perturbs XY = YX even when AJB = BJA held.
    let y_norm = y.norm();
    for x in &xs {
        let residual = (x * &y - &y * x).norm();
        let threshold = cfg.tol_commute * x.norm() * y_norm;
        if !(residual <= threshold) {
            return Err(Error::NumericalFailure {
                stage: "commutation of A^{-1/2}BA^{-1/2} with A^{1/2}JA^{1/2}",
                residual,
                threshold,
            });
        }
    }

    let x_refs: Vec<&DMatrix<f64>> = xs.iter().collect();
    let blocks = merge_odd_blocks(joint_eigenspaces(&x_refs, dim, cfg));

    // (δ, plane) for every mode, plane = 2 orthonormal columns.
    let mut planes: Vec<(f64, DMatrix<f64>)> = Vec::with_capacity(dim / 2);
    for block in &blocks {
        let restricted = skew_part(&(block.transpose() * &y * block));
        let canon = skew_canonical(&restricted, cfg)?;
        if canon.zero_dim != 0 {
            return Err(Error::NumericalFailure {
                stage: "skew canonical form on a joint eigenspace",
                residual: canon.zero_dim as f64,
                threshold: 0.0,
            });
        }
        let u = block * &canon.q;
        for (k, &delta) in canon.deltas.iter().enumerate() {
            planes.push((delta, u.columns(2 * k, 2).into_owned()));
        }
    }

    // Member spectrum per mode: δ · (mean of X on the plane).
    let member_values: Vec<Vec<f64>> = xs
        .iter()
        .map(|x| {
            planes
                .iter()
                .map(|(delta, p)| {
                    let xp = x * p;
                    let mean =
                        0.5 * (p.column(0).dot(&xp.column(0)) + p.column(1).dot(&xp.column(1)));
                    delta * mean
                })
                .collect()
        })
        .collect();

    let mut idx: Vec<usize> = (0..planes.len()).collect();
    match order {
        ModeOrder::Metric => idx.sort_by(|&a, &b| planes[a].0.total_cmp(&planes[b].0)),
        ModeOrder::Member(m) => idx.sort_by(|&a, &b| {
            member_values[m][a]
                .total_cmp(&member_values[m][b])
                .then(planes[a].0.total_cmp(&planes[b].0))
        }),
    }

    let mut u = DMatrix::zeros(dim, dim);
    for (k, &i) in idx.iter().enumerate() {
        u.columns_mut(2 * k, 2).copy_from(&planes[i].1);
    }
    let metric_spectrum: Vec<f64> = idx.iter().map(|&i| planes[i].0).collect();
    let spectra = member_values
        .iter()
        .map(|vals| idx.iter().map(|&i| vals[i]).collect())
        .collect();
    let s = root.congruence(&u, &metric_spectrum);
    Ok(Congruence {
        s,
        metric_spectrum,
        spectra,
        warnings: root.warnings,
    })
}

/// Simultaneous Williamson diagonalization of two symplectically commuting
/// positive definite matrices.
pub fn simdiag_pd_pair(
    a: &SymMatrix,
    b: &SymMatrix,
    cfg: &ToleranceConfig,
) -> Result<SimDiagResult> {
    same_dim(a, b)?;
    simdiag_pd_family(&[a.clone(), b.clone()], cfg)
}

/// Simultaneous Williamson diagonalization of a pairwise symplectically
/// commuting family of positive definite matrices. The first matrix is the
/// reference: its spectrum is sorted and fixes the mode order.
pub fn simdiag_pd_family(family: &[SymMatrix], cfg: &ToleranceConfig) -> Result<SimDiagResult> {
    let Some(first) = family.first() else {
        return Err(Error::EmptyFamily);
    };
    for m in family {
        same_dim(first, m)?;
    }
    for (i, m) in family.iter().enumerate() {
        // Positive definiteness of the reference is checked by `Metric`.
        if i > 0 {
            Metric::new(m, i, cfg).map(|_| ())?;
        }
    }
    let refs: Vec<&DMatrix<f64>> = family.iter().map(|m| m.matrix()).collect();
    require_pairwise_commuting(&refs, cfg)?;

    let cong = simultaneous_congruence(first, &refs[1..], ModeOrder::Metric, cfg)?;
    let mut spectra = Vec::with_capacity(family.len());
    spectra.push(cong.metric_spectrum);
    spectra.extend(cong.spectra);

    let checks: Vec<(&DMatrix<f64>, &[f64])> = refs
        .iter()
        .zip(&spectra)
        .map(|(m, sp)| (*m, sp.as_slice()))
        .collect();
    verify_congruence(&cong.s, &checks, cfg)?;
    Ok(SimDiagResult {
        s: cong.s,
        spectra,
        warnings: cong.warnings,
    })
}

/// Checks `A^s J B^s = B^s J A^s`.
pub fn powers_commute_check(
    a: &SymMatrix,
    b: &SymMatrix,
    s: f64,
    cfg: &ToleranceConfig,
) -> Result<CommuteCheck> {
    same_dim(a, b)?;
    let a_s = sym_power(a, s, cfg)?;
    let b_s = sym_power(b, s, cfg)?;
    symplectically_commutes(&a_s, &b_s, cfg)
}
