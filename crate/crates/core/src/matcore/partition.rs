use nalgebra::DMatrix;

use super::{symmetrize, Spectral, SubspaceBasis, SymMatrix, ToleranceConfig};
use crate::error::{Error, Result};

/// Orthonormal bases of the joint eigenspaces of a commuting symmetric family.
///
/// The first matrix is eigendecomposed and its eigenvalues grouped into
/// clusters; each cluster block is then refined by the next matrix restricted
/// to it, and so on. Blocks come out ordered by the eigenvalues of the first
/// matrix, then the second, etc. An empty family yields the whole space.
pub fn common_eigenspace_partition(
    xs: &[SymMatrix],
    cfg: &ToleranceConfig,
) -> Result<Vec<SubspaceBasis>> {
    let Some(first) = xs.first() else {
        return Err(Error::EmptyFamily);
    };
    let dim = first.dim();
    for x in xs {
        if x.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: x.dim(),
            });
        }
    }
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let comm = xs[i].matrix() * xs[j].matrix() - xs[j].matrix() * xs[i].matrix();
            let residual = comm.norm();
            let threshold = cfg.tol_commute * xs[i].norm() * xs[j].norm();
            if residual > threshold {
                return Err(Error::NotCommutingClassically {
                    first: i,
                    second: j,
                    residual,
                    threshold,
                });
            }
        }
    }
    let mats: Vec<&DMatrix<f64>> = xs.iter().map(|x| x.matrix()).collect();
    Ok(joint_eigenspaces(&mats, dim, cfg)
        .into_iter()
        .map(SubspaceBasis::from_orthonormal)
        .collect())
}

/// Refinement without the commutation pre-check; `dim` is needed for the
/// empty family.
pub(crate) fn joint_eigenspaces(
    xs: &[&DMatrix<f64>],
    dim: usize,
    cfg: &ToleranceConfig,
) -> Vec<DMatrix<f64>> {
    let scales: Vec<f64> = xs.iter().map(|x| Spectral::of(x).radius()).collect();
    let mut out = Vec::new();
    refine(DMatrix::identity(dim, dim), xs, &scales, cfg, &mut out);
    out
}

fn refine(
    basis: DMatrix<f64>,
    xs: &[&DMatrix<f64>],
    scales: &[f64],
    cfg: &ToleranceConfig,
    out: &mut Vec<DMatrix<f64>>,
) {
    let (Some(x), Some(&scale)) = (xs.first(), scales.first()) else {
        out.push(basis);
        return;
    };
    if basis.ncols() <= 1 {
        out.push(basis);
        return;
    }
    let restricted = symmetrize(&(basis.transpose() * *x * &basis));
    let spec = Spectral::of(&restricted);
    let gap = cfg.tol_cluster * scale;
    let mut start = 0;
    for k in 1..=spec.values.len() {
        if k == spec.values.len() || spec.values[k] - spec.values[k - 1] > gap {
            let sub = &basis * spec.vectors.columns(start, k - start);
            refine(sub, &xs[1..], &scales[1..], cfg, out);
            start = k;
        }
    }
}

/// Merges consecutive blocks until every block has even dimension. The total
/// dimension must be even.
pub(crate) fn merge_odd_blocks(blocks: Vec<DMatrix<f64>>) -> Vec<DMatrix<f64>> {
    let mut out: Vec<DMatrix<f64>> = Vec::with_capacity(blocks.len());
    let mut pending: Option<DMatrix<f64>> = None;
    for b in blocks {
        let merged = match pending.take() {
            Some(p) => {
                let mut cols: Vec<_> = p.column_iter().collect();
                cols.extend(b.column_iter());
                DMatrix::from_columns(&cols)
            }
            None => b,
        };
        if merged.ncols() % 2 == 0 {
            out.push(merged);
        } else {
            pending = Some(merged);
        }
    }
    if let Some(p) = pending {
        out.push(p);
    }
    out
}
