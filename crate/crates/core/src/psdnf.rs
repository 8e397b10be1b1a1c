//! Symplectic subspace geometry and simultaneous normal forms of positive
//! semidefinite families whose kernels are symplectic subspaces.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, KernelSource, Result};
use crate::matcore::{
    j_matrix, j_mul, kernel_of, symmetrize, Definiteness, Spectral, SubspaceBasis, SymMatrix,
    ToleranceConfig,
};
use crate::simdiag::{require_pairwise_commuting, simultaneous_congruence, ModeOrder};
use crate::williamson::verify_congruence;

#[derive(Debug, Clone)]
pub struct PsdNormalForm {
    /// Symplectic `S` with `SᵀAᵢS = diag(spectra[i]) ⊗ I₂`.
    pub s: DMatrix<f64>,
    /// Per-member spectra; the last `n - k` entries of each are the shared
    /// kernel modes and are exactly zero.
    pub spectra: Vec<Vec<f64>>,
    /// Number of active mode pairs.
    pub k: usize,
    /// Dimension of the joint kernel, `2(n - k)`.
    pub kernel_dim: usize,
    pub warnings: Vec<String>,
}

/// `WᵀJW`.
pub fn symplectic_gram(w: &SubspaceBasis) -> DMatrix<f64> {
    w.cols().transpose() * j_mul(w.cols())
}

/// The restriction of `ω` to the span of `w` is nondegenerate.
pub fn is_symplectic_subspace(w: &SubspaceBasis, cfg: &ToleranceConfig) -> bool {
    let m = w.dim();
    if m == 0 {
        return true;
    }
    if !m.is_multiple_of(2) {
        return false;
    }
    let sv = symplectic_gram(w).singular_values();
    sv.max() > 0.0 && sv.min() > cfg.tol_rank * sv.max()
}

/// Orthonormal basis of `{v : vᵀJw = 0 for all w ∈ W}`, the Euclidean
/// orthogonal complement of `JW`.
pub fn symplectic_complement(w: &SubspaceBasis) -> SubspaceBasis {
    let dim = w.ambient_dim();
    if w.dim() == 0 {
        return SubspaceBasis::from_orthonormal(DMatrix::identity(dim, dim));
    }
    let jw = j_mul(w.cols());
    // Orthonormal basis of span(JW) from its left singular vectors.
    let svd = jw.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let range = u.select_columns(&order[..w.dim()]);
    let projector = DMatrix::identity(dim, dim) - &range * range.transpose();
    let spec = Spectral::of(&symmetrize(&projector));
    let keep = dim - w.dim();
    SubspaceBasis::from_orthonormal(spec.vectors.columns(dim - keep, keep).into_owned())
}

fn omega(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let mut acc = 0.0;
    for k in 0..x.len() / 2 {
        acc += x[2 * k] * y[2 * k + 1] - x[2 * k + 1] * y[2 * k];
    }
    acc
}

/// Symplectic Gram–Schmidt. Returns columns `p₁, q₁, …, p_m, q_m` spanning the
/// same subspace with `PᵀJP = J_m`.
///
/// At each step the first remaining vector is paired with the remaining vector
/// maximizing `|ω(p, ·)|`; everything else is then made `ω`-orthogonal to the
/// new pair.
pub fn darboux_basis(w: &SubspaceBasis, cfg: &ToleranceConfig) -> Result<DMatrix<f64>> {
    let dim = w.ambient_dim();
    if !w.dim().is_multiple_of(2) {
        return Err(Error::NotSymplecticSubspace {
            step: 0,
            pivot: 0.0,
            threshold: 0.0,
        });
    }
    let mut rest: Vec<DVector<f64>> = w.cols().column_iter().map(|c| c.into_owned()).collect();
    let mut out = DMatrix::zeros(dim, w.dim());
    let mut step = 0;
    while !rest.is_empty() {
        let p = rest.remove(0);
        let (best, pivot) = rest
            .iter()
            .enumerate()
            .map(|(i, u)| (i, omega(&p, u)))
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .unwrap_or((0, 0.0));
        let scale = p.norm() * rest.get(best).map_or(0.0, |u| u.norm());
        let threshold = cfg.tol_rank * scale;
        if rest.is_empty() || !(pivot.abs() > threshold) {
            return Err(Error::NotSymplecticSubspace {
                step,
                pivot: pivot.abs(),
                threshold,
            });
        }
        let q = rest.remove(best) / pivot;
        for v in rest.iter_mut() {
            let wq = omega(v, &q);
            let wp = omega(v, &p);
            *v -= &p * wq;
            *v += &q * wp;
        }
        out.set_column(2 * step, &p);
        out.set_column(2 * step + 1, &q);
        step += 1;
    }
    Ok(out)
}

/// Simultaneous symplectic normal form of a family of positive semidefinite
/// matrices whose individual kernels and joint kernel are symplectic.
///
/// The joint kernel `N` is the kernel of the sum. Its symplectic complement
/// `W` carries all the active modes: in Darboux coordinates of `W` the family
/// restricts to matrices whose sum is positive definite, and that sum serves
/// as the metric for the simultaneous congruence. Active modes are ordered by
/// the first member's spectrum and precede the kernel modes.
pub fn psd_normal_form_family(
    family: &[SymMatrix],
    cfg: &ToleranceConfig,
) -> Result<PsdNormalForm> {
    let Some(first) = family.first() else {
        return Err(Error::EmptyFamily);
    };
    let dim = first.dim();
    let n = dim / 2;
    let mut warnings = Vec::new();
    let mut spectra = Vec::with_capacity(family.len());
    for (i, m) in family.iter().enumerate() {
        if m.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: m.dim(),
            });
        }
        let spec = Spectral::of(m);
        if spec.classify(cfg.tol_pd) == Definiteness::Indefinite {
            return Err(Error::NotPositiveSemidefinite {
                index: i,
                min_eigenvalue: spec.min(),
                max_eigenvalue: spec.max(),
            });
        }
        spectra.push(spec);
    }

    let refs: Vec<&DMatrix<f64>> = family.iter().map(|m| m.matrix()).collect();
    require_pairwise_commuting(&refs, cfg)?;

    for (i, spec) in spectra.iter().enumerate() {
        near_threshold_warning(spec, cfg, &format!("matrix {i}"), &mut warnings);
        let kernel = SubspaceBasis::from_orthonormal(kernel_of(spec, cfg.tol_rank));
        if !is_symplectic_subspace(&kernel, cfg) {
            return Err(Error::KernelNotSymplectic {
                kernel: KernelSource::Member(i),
            });
        }
    }

    let sum = family
        .iter()
        .fold(DMatrix::zeros(dim, dim), |acc, m| acc + m.matrix());
    let sum_spec = Spectral::of(&sum);
    near_threshold_warning(&sum_spec, cfg, "sum of the family", &mut warnings);
    let joint = SubspaceBasis::from_orthonormal(kernel_of(&sum_spec, cfg.tol_rank));
    if !is_symplectic_subspace(&joint, cfg) {
        return Err(Error::KernelNotSymplectic {
            kernel: KernelSource::Joint,
        });
    }
    let kernel_dim = joint.dim();
    let k = n - kernel_dim / 2;

    let mut s = DMatrix::zeros(dim, dim);
    let mut active_spectra = vec![Vec::new(); family.len()];
    if k > 0 {
        let complement = symplectic_complement(&joint);
        let p_w = darboux_basis(&complement, cfg)?;
        let restricted: Vec<DMatrix<f64>> = refs
            .iter()
            .map(|m| symmetrize(&(p_w.transpose() * *m * &p_w)))
            .collect();
        let metric = restricted
            .iter()
            .fold(DMatrix::zeros(2 * k, 2 * k), |acc, m| acc + m);
        let members: Vec<&DMatrix<f64>> = restricted.iter().collect();
        let cong = simultaneous_congruence(&metric, &members, ModeOrder::Member(0), cfg)?;
        warnings.extend(cong.warnings);
        s.columns_mut(0, 2 * k).copy_from(&(&p_w * &cong.s));
        active_spectra = cong.spectra;
    }
    if kernel_dim > 0 {
        let p_n = darboux_basis(&joint, cfg)?;
        s.columns_mut(2 * k, kernel_dim).copy_from(&p_n);
    }

    let spectra: Vec<Vec<f64>> = active_spectra
        .into_iter()
        .map(|mut sp| {
            sp.iter_mut().for_each(|x| *x = x.max(0.0));
            sp.resize(n, 0.0);
            sp
        })
        .collect();
    let checks: Vec<(&DMatrix<f64>, &[f64])> = refs
        .iter()
        .zip(&spectra)
        .map(|(m, sp)| (*m, sp.as_slice()))
        .collect();
    verify_congruence(&s, &checks, cfg)?;
    Ok(PsdNormalForm {
        s,
        spectra,
        k,
        kernel_dim,
        warnings,
    })
}

/// Warns when an eigenvalue sits within a factor 100 of the kernel cut-off on
/// either side, where the rank decision is fragile.
fn near_threshold_warning(
    spec: &Spectral,
    cfg: &ToleranceConfig,
    what: &str,
    out: &mut Vec<String>,
) {
    let floor = cfg.tol_rank * spec.radius();
    if spec
        .values
        .iter()
        .any(|&x| x.abs() > floor / 100.0 && x.abs() < floor * 100.0)
    {
        out.push(format!(
            "{what} has an eigenvalue near the rank threshold {floor:.3e}; kernel dimension may be unreliable"
        ));
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonActionCheck {
    /// `‖JᵀA S − S Jᵀ (diag(μ) ⊗ I₂)‖_F`, i.e. the defect in
    /// `H pᵢ = μᵢ qᵢ`, `H qᵢ = −μᵢ pᵢ` over all columns.
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Verifies the Hamilton map action on the normal-form basis for family
/// member `member` (whose matrix is `a`).
pub fn hamilton_action_check(
    a: &SymMatrix,
    nf: &PsdNormalForm,
    member: usize,
    cfg: &ToleranceConfig,
) -> Result<HamiltonActionCheck> {
    let spectrum = nf.spectra.get(member).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "member {member} out of range for a family of {}",
            nf.spectra.len()
        ))
    })?;
    hamilton_action_residual(a, &nf.s, spectrum, cfg)
}

/// Same check for an arbitrary basis `s` and spectrum.
pub fn hamilton_action_residual(
    a: &SymMatrix,
    s: &DMatrix<f64>,
    spectrum: &[f64],
    cfg: &ToleranceConfig,
) -> Result<HamiltonActionCheck> {
    if s.shape() != a.shape() || spectrum.len() != a.modes() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: s.nrows(),
        });
    }
    let h_s = -j_mul(&(a.matrix() * s));
    let jt = -j_matrix(a.modes());
    let mut expected = s * jt;
    for (k, &mu) in spectrum.iter().enumerate() {
        expected.column_mut(2 * k).scale_mut(mu);
        expected.column_mut(2 * k + 1).scale_mut(mu);
    }
    let residual = (h_s - expected).norm();
    let threshold = cfg.tol_residual * a.norm();
    Ok(HamiltonActionCheck {
        residual,
        threshold,
        passed: residual <= threshold,
    })
}
