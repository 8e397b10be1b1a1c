//! Williamson decompositions, symplectic spectra and simultaneous symplectic
//! diagonalization of families of positive (semi-)definite matrices.
//!
//! Phase space uses the interleaved ordering `(p₁, q₁, …, pₙ, qₙ)` with
//! `J = Iₙ ⊗ [[0, 1], [-1, 0]]`.

// `!(x <= t)` is used on purpose so that NaN residuals fail checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod apps;
pub mod error;
pub mod instancegen;
pub mod matcore;
pub mod psdnf;
pub mod simdiag;
pub mod williamson;

pub use apps::{gaussian_normal_modes, partition_function, GaussianModesResult, PartitionResult};
pub use error::{Error, KernelSource, Result};
pub use matcore::{SymMatrix, ToleranceConfig};
pub use psdnf::{psd_normal_form_family, PsdNormalForm};
pub use simdiag::{
    poisson_bracket_gram, simdiag_pd_family, simdiag_pd_pair, symplectically_commutes,
    SimDiagResult,
};
pub use williamson::{symplectic_eigenvalues, williamson, WilliamsonResult};
