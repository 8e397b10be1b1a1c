use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use super::{orthonormalize, skew_part, Spectral, ToleranceConfig};
use crate::error::{Error, Result};

/// Real canonical form of a skew-symmetric matrix `Y`:
/// `QᵀYQ = ⊕_j [[0, δ_j], [-δ_j, 0]] ⊕ 0_{zero_dim}` with `Q` orthogonal.
#[derive(Debug, Clone)]
pub struct SkewCanonical {
    pub q: DMatrix<f64>,
    /// Positive block parameters, sorted nondecreasing.
    pub deltas: Vec<f64>,
    pub zero_dim: usize,
}

impl SkewCanonical {
    /// The block-diagonal matrix `QᵀYQ` is supposed to equal.
    pub fn canonical_matrix(&self) -> DMatrix<f64> {
        let m = self.q.ncols();
        let mut out = DMatrix::zeros(m, m);
        for (k, &d) in self.deltas.iter().enumerate() {
            out[(2 * k, 2 * k + 1)] = d;
            out[(2 * k + 1, 2 * k)] = -d;
        }
        out
    }
}

/// Orthogonal block diagonalization of a real skew-symmetric matrix.
///
/// The planes are read off the Hermitian matrix `iY`: an eigenvector
/// `a + ib` with eigenvalue `δ > 0` satisfies `Ya = δb`, `Yb = -δa`, so
/// `(u, v) = √2 (b, a)` is an orthonormal pair with `uᵀYv = +δ`. This keeps
/// the accuracy of each `δ` at `ε‖Y‖` instead of the `ε‖Y‖²` obtained by
/// working with `YᵀY`.
pub fn skew_canonical(y: &DMatrix<f64>, cfg: &ToleranceConfig) -> Result<SkewCanonical> {
    if !y.is_square() {
        return Err(Error::InvalidDimension(format!(
            "matrix is {}x{}, expected square",
            y.nrows(),
            y.ncols()
        )));
    }
    let m = y.nrows();
    let deviation = (y + y.transpose()).norm() * 0.5;
    let threshold = cfg.tol_sym * y.norm();
    if deviation > threshold {
        return Err(Error::NotSkewSymmetric {
            deviation,
            threshold,
        });
    }
    if m == 0 {
        return Ok(SkewCanonical {
            q: DMatrix::zeros(0, 0),
            deltas: Vec::new(),
            zero_dim: 0,
        });
    }

    let ys = skew_part(y);
    let herm = DMatrix::from_fn(m, m, |i, j| Complex::new(0.0, ys[(i, j)]));
    let eig = SymmetricEigen::new(herm);
    let radius = eig
        .eigenvalues
        .iter()
        .fold(0.0_f64, |acc, x| acc.max(x.abs()));
    let floor = cfg.tol_rank * radius;

    let mut planes: Vec<(f64, usize)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &lam)| lam > floor)
        .map(|(i, &lam)| (lam, i))
        .collect();
    // Guard against the +δ/-δ counts disagreeing right at the threshold.
    let negatives = eig.eigenvalues.iter().filter(|&&lam| lam < -floor).count();
    planes.sort_by(|a, b| a.0.total_cmp(&b.0));
    if planes.len() > negatives {
        planes.drain(..planes.len() - negatives);
    }
    let r = planes.len();

    let mut q = DMatrix::zeros(m, m);
    let sqrt2 = std::f64::consts::SQRT_2;
    for (k, &(_, idx)) in planes.iter().enumerate() {
        let x = eig.eigenvectors.column(idx);
        let re = DVector::from_iterator(m, x.iter().map(|z| z.re * sqrt2));
        let im = DVector::from_iterator(m, x.iter().map(|z| z.im * sqrt2));
        q.set_column(2 * k, &im);
        q.set_column(2 * k + 1, &re);
    }
    let active = orthonormalize(&q.columns(0, 2 * r).into_owned());
    q.columns_mut(0, 2 * r).copy_from(&active);

    let zero_dim = m - 2 * r;
    if zero_dim > 0 {
        // Kernel: eigenvectors of I - PPᵀ with eigenvalue ≈ 1.
        let p = &active;
        let complement = DMatrix::identity(m, m) - p * p.transpose();
        let spec = Spectral::of(&complement);
        let kernel = spec.vectors.columns(m - zero_dim, zero_dim).into_owned();
        q.columns_mut(2 * r, zero_dim).copy_from(&kernel);
    }

    // Recompute each δ from the cleaned plane so that uᵀYv is exactly what the
    // canonical form reports.
    let deltas: Vec<f64> = (0..r)
        .map(|k| q.column(2 * k).dot(&(&ys * q.column(2 * k + 1))))
        .collect();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| deltas[a].total_cmp(&deltas[b]));
    let mut cols: Vec<usize> = order.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
    cols.extend(2 * r..m);
    let q = q.select_columns(&cols);
    let deltas = order.iter().map(|&k| deltas[k]).collect();

    Ok(SkewCanonical {
        q,
        deltas,
        zero_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::j_matrix;
    use approx::assert_relative_eq;

    fn check_contract(y: &DMatrix<f64>, sc: &SkewCanonical, cfg: &ToleranceConfig) {
        let m = y.nrows();
        let qtq = sc.q.transpose() * &sc.q;
        assert!((qtq - DMatrix::identity(m, m)).norm() <= cfg.tol_residual);
        let canon = sc.q.transpose() * y * &sc.q;
        assert!((canon - sc.canonical_matrix()).norm() <= cfg.tol_residual * y.norm().max(1.0));
        assert!(sc.deltas.iter().all(|&d| d > 0.0));
        assert!(sc.deltas.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(2 * sc.deltas.len() + sc.zero_dim, m);
    }

    #[test]
    fn two_by_two_block() {
        let cfg = ToleranceConfig::default();
        let y = DMatrix::from_row_slice(2, 2, &[0.0, 3.0, -3.0, 0.0]);
        let sc = skew_canonical(&y, &cfg).unwrap();
        assert_eq!(sc.deltas.len(), 1);
        assert_relative_eq!(sc.deltas[0], 3.0, max_relative = 1e-14);
        assert_eq!(sc.zero_dim, 0);
        check_contract(&y, &sc, &cfg);
        // The only orientation-preserving orthogonal Q with QᵀYQ = Y is a
        // rotation; Y is already canonical so Q must commute with it.
        assert_relative_eq!(sc.q.transpose() * &y * &sc.q, y, epsilon = 1e-13);
    }

    #[test]
    fn standard_form_is_canonical() {
        let cfg = ToleranceConfig::default();
        for n in 1..=5 {
            let j = j_matrix(n);
            let sc = skew_canonical(&j, &cfg).unwrap();
            assert_eq!(sc.deltas.len(), n);
            for d in &sc.deltas {
                assert_relative_eq!(*d, 1.0, max_relative = 1e-13);
            }
            check_contract(&j, &sc, &cfg);
        }
    }

    #[test]
    fn kernel_is_reported() {
        let cfg = ToleranceConfig::default();
        let mut y = DMatrix::zeros(5, 5);
        y[(0, 3)] = 2.0;
        y[(3, 0)] = -2.0;
        y[(1, 4)] = -0.5;
        y[(4, 1)] = 0.5;
        let sc = skew_canonical(&y, &cfg).unwrap();
        assert_eq!(sc.zero_dim, 1);
        assert_relative_eq!(sc.deltas[0], 0.5, max_relative = 1e-13);
        assert_relative_eq!(sc.deltas[1], 2.0, max_relative = 1e-13);
        check_contract(&y, &sc, &cfg);

        let zero = DMatrix::zeros(4, 4);
        let sc = skew_canonical(&zero, &cfg).unwrap();
        assert_eq!(sc.zero_dim, 4);
        check_contract(&zero, &sc, &cfg);
    }

    #[test]
    fn rejects_non_skew() {
        let cfg = ToleranceConfig::default();
        let y = DMatrix::from_row_slice(2, 2, &[1.0, 3.0, -3.0, 0.0]);
        assert!(matches!(
            skew_canonical(&y, &cfg),
            Err(Error::NotSkewSymmetric { .. })
        ));
        assert!(skew_canonical(&DMatrix::zeros(2, 3), &cfg).is_err());
    }

    #[test]
    fn degenerate_deltas() {
        let cfg = ToleranceConfig::default();
        let j = j_matrix(3) * 2.5;
        // Rotate by a fixed orthogonal matrix so the planes are not axis aligned.
        let qr = DMatrix::from_fn(6, 6, |i, k| {
            ((i * 7 + k * 3) % 5) as f64 - 2.0 + (i == k) as u8 as f64 * 4.0
        })
        .qr();
        let o = qr.q();
        let y = o.transpose() * j * &o;
        let sc = skew_canonical(&y, &cfg).unwrap();
        for d in &sc.deltas {
            assert_relative_eq!(*d, 2.5, max_relative = 1e-13);
        }
        check_contract(&y, &sc, &cfg);
    }
}
