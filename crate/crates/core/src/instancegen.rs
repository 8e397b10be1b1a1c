//! Seeded generators for symplectic matrices and planted test instances.
//!
//! Every generator draws from `ChaCha8Rng::seed_from_u64(seed)` (rand_chacha
//! 0.9), so a given [`GenConfig`] always yields bitwise-identical output.

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matcore::{diag_kron_i2, j_mul, mul_j, symmetrize, SymMatrix};

/// Largest condition number accepted from [`random_symplectic`].
pub const MAX_CONDITION: f64 = 1e8;
const MAX_REDRAWS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenConfig {
    pub seed: u64,
    /// Number of modes (matrices are `2n × 2n`).
    pub n: usize,
    /// Bound on the magnitude of the random Hamiltonian entries.
    pub spread: f64,
}

impl GenConfig {
    pub fn new(seed: u64, n: usize) -> Self {
        Self {
            seed,
            n,
            spread: 1.0,
        }
    }

    pub fn with_spread(self, spread: f64) -> Self {
        Self { spread, ..self }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidDimension(
                "number of modes must be >= 1".into(),
            ));
        }
        if !(self.spread > 0.0 && self.spread.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "spread must be positive, got {}",
                self.spread
            )));
        }
        Ok(())
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// `exp(JH)` for symmetric `H`; the exponential of a Hamiltonian matrix is
/// symplectic.
pub fn symplectic_exp(h: &DMatrix<f64>) -> DMatrix<f64> {
    j_mul(&symmetrize(h)).exp()
}

/// `S⁻¹ = JᵀSᵀJ` for symplectic `S`, without a linear solve.
pub fn symplectic_inverse(s: &DMatrix<f64>) -> DMatrix<f64> {
    -j_mul(&mul_j(&s.transpose()))
}

fn random_hamiltonian(rng: &mut ChaCha8Rng, dim: usize, spread: f64) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let x = rng.random_range(-spread..=spread);
            h[(i, j)] = x;
            h[(j, i)] = x;
        }
    }
    h
}

fn condition(m: &DMatrix<f64>) -> f64 {
    let sv = m.singular_values();
    sv.max() / sv.min()
}

/// Random symplectic `S = exp(JH)` with `H` uniform in `[-spread, spread]`.
///
/// Draws with condition number above [`MAX_CONDITION`] are discarded; each
/// redraw halves the spread, so the loop always terminates.
pub fn random_symplectic(g: &GenConfig) -> Result<DMatrix<f64>> {
    g.validate()?;
    Ok(symplectic_from_rng(&mut g.rng(), g))
}

fn symplectic_from_rng(rng: &mut ChaCha8Rng, g: &GenConfig) -> DMatrix<f64> {
    let mut spread = g.spread;
    let mut s = symplectic_exp(&random_hamiltonian(rng, 2 * g.n, spread));
    for _ in 0..MAX_REDRAWS {
        if condition(&s) <= MAX_CONDITION {
            break;
        }
        spread *= 0.5;
        s = symplectic_exp(&random_hamiltonian(rng, 2 * g.n, spread));
    }
    s
}

/// Realification `a + ib ↦ [[a, b], [-b, a]]` of a complex `n × n` matrix in
/// the interleaved layout. Unitary input gives an orthosymplectic matrix.
pub fn realify(u: &DMatrix<Complex<f64>>) -> DMatrix<f64> {
    let (rows, cols) = u.shape();
    let mut out = DMatrix::zeros(2 * rows, 2 * cols);
    for i in 0..rows {
        for j in 0..cols {
            let z = u[(i, j)];
            out[(2 * i, 2 * j)] = z.re;
            out[(2 * i, 2 * j + 1)] = z.im;
            out[(2 * i + 1, 2 * j)] = -z.im;
            out[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    out
}

/// Random orthosymplectic matrix: realification of the unitary factor of a
/// complex Gaussian matrix.
pub fn random_orthosymplectic(g: &GenConfig) -> Result<DMatrix<f64>> {
    g.validate()?;
    let mut rng = g.rng();
    let z = DMatrix::from_fn(g.n, g.n, |_, _| {
        Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    Ok(realify(&z.qr().q()))
}

/// `S⁻ᵀ (diag(d) ⊗ I₂) S⁻¹`: the matrix whose Williamson congruence is `S`.
pub fn planted_from_symplectic(s: &DMatrix<f64>, d: &[f64]) -> Result<SymMatrix> {
    if s.nrows() != 2 * d.len() || !s.is_square() {
        return Err(Error::DimensionMismatch {
            left: s.nrows(),
            right: 2 * d.len(),
        });
    }
    let inv = symplectic_inverse(s);
    SymMatrix::new(symmetrize(&(inv.transpose() * diag_kron_i2(d) * inv)))
}

/// Positive definite matrix with symplectic spectrum `d`.
pub fn random_pd_with_spectrum(g: &GenConfig, d: &[f64]) -> Result<SymMatrix> {
    if let Some(bad) = d.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "symplectic eigenvalues must be positive, got {bad}"
        )));
    }
    random_psd_with_spectrum(g, d)
}

/// Positive semidefinite variant: zero entries of `d` become a symplectic kernel.
pub fn random_psd_with_spectrum(g: &GenConfig, d: &[f64]) -> Result<SymMatrix> {
    check_spectrum(g, d)?;
    planted_from_symplectic(&random_symplectic(g)?, d)
}

fn check_spectrum(g: &GenConfig, d: &[f64]) -> Result<()> {
    if d.len() != g.n {
        return Err(Error::DimensionMismatch {
            left: g.n,
            right: d.len(),
        });
    }
    if let Some(bad) = d.iter().find(|&&x| !(x >= 0.0 && x.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "spectrum entries must be nonnegative, got {bad}"
        )));
    }
    Ok(())
}

/// Family `Aᵢ = S⁻ᵀ (diag(spectra[i]) ⊗ I₂) S⁻¹` sharing one random symplectic
/// `S`; every pair symplectically commutes.
pub fn random_commuting_family(g: &GenConfig, spectra: &[Vec<f64>]) -> Result<Vec<SymMatrix>> {
    for sp in spectra {
        check_spectrum(g, sp)?;
    }
    let s = random_symplectic(g)?;
    spectra
        .iter()
        .map(|sp| planted_from_symplectic(&s, sp))
        .collect()
}

/// As [`random_commuting_family`] but with a shared orthosymplectic `O`, so the
/// members also commute in the ordinary sense.
pub fn random_orthosymplectic_family(
    g: &GenConfig,
    spectra: &[Vec<f64>],
) -> Result<Vec<SymMatrix>> {
    for sp in spectra {
        check_spectrum(g, sp)?;
    }
    let o = random_orthosymplectic(g)?;
    spectra
        .iter()
        .map(|sp| planted_from_symplectic(&o, sp))
        .collect()
}
