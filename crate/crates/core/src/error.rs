use nalgebra::DMatrix;
use thiserror::Error;

/// Which kernel failed the symplectic-subspace test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelSource {
    /// Kernel of the family member at this index.
    Member(usize),
    /// Intersection of all kernels in the family.
    Joint,
}

impl std::fmt::Display for KernelSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KernelSource::Member(i) => write!(f, "kernel of matrix {i}"),
            KernelSource::Joint => write!(f, "joint kernel of the family"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not symmetric (asymmetry {asymmetry:e} > {threshold:e})")]
    NotSymmetric { asymmetry: f64, threshold: f64 },

    #[error("matrix is not skew-symmetric (deviation {deviation:e} > {threshold:e})")]
    NotSkewSymmetric { deviation: f64, threshold: f64 },

    #[error("matrix {index} is not positive definite (eigenvalues in [{min_eigenvalue:e}, {max_eigenvalue:e}])")]
    NotPositiveDefinite {
        index: usize,
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    #[error("matrix {index} is not positive semidefinite (eigenvalues in [{min_eigenvalue:e}, {max_eigenvalue:e}])")]
    NotPositiveSemidefinite {
        index: usize,
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    /// `AJB != BJA` for the pair `(first, second)`. `bracket` is the Gram
    /// matrix `2(AJB - BJA)` of the Poisson bracket of the two quadratic forms.
    #[error("matrices {first} and {second} do not symplectically commute (residual {residual:e} > {threshold:e})")]
    NotCommuting {
        first: usize,
        second: usize,
        residual: f64,
        threshold: f64,
        bracket: Box<DMatrix<f64>>,
    },

    /// Classical commutation `XY = YX` failed inside the joint eigenspace refinement.
    #[error(
        "matrices {first} and {second} do not commute (residual {residual:e} > {threshold:e})"
    )]
    NotCommutingClassically {
        first: usize,
        second: usize,
        residual: f64,
        threshold: f64,
    },

    #[error("states are not jointly reducible to normal modes: V1 J V2 != V2 J V1 (residual {residual:e} > {threshold:e})")]
    StatesNotJointlyReducible { residual: f64, threshold: f64 },

    #[error("{kernel} is not a symplectic subspace")]
    KernelNotSymplectic { kernel: KernelSource },

    #[error("subspace is not symplectic (pivot {pivot:e} below {threshold:e} at step {step})")]
    NotSymplecticSubspace {
        step: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("empty family")]
    EmptyFamily,

    #[error("numerical failure in {stage}: residual {residual:e} exceeds {threshold:e}")]
    NumericalFailure {
        stage: &'static str,
        residual: f64,
        threshold: f64,
    },
}

impl Error {
    /// Name of the mathematical hypothesis this error reports as violated, or
    /// `None` for engineering failures (bad shapes, arguments, numerics).
    pub fn violated_hypothesis(&self) -> Option<&'static str> {
        match self {
            Error::NotPositiveDefinite { .. } => Some("positive definiteness"),
            Error::NotPositiveSemidefinite { .. } => Some("positive semidefiniteness"),
            Error::NotCommuting { .. } | Error::StatesNotJointlyReducible { .. } => {
                Some("symplectic commutation")
            }
            Error::NotCommutingClassically { .. } => Some("commutation"),
            Error::KernelNotSymplectic { .. } | Error::NotSymplecticSubspace { .. } => {
                Some("symplectic kernel")
            }
            _ => None,
        }
    }

    /// Residual attached to the violation, when one was measured.
    pub fn residual(&self) -> Option<f64> {
        match self {
            Error::NotCommuting { residual, .. }
            | Error::NotCommutingClassically { residual, .. }
            | Error::StatesNotJointlyReducible { residual, .. }
            | Error::NumericalFailure { residual, .. } => Some(*residual),
            Error::NotSymmetric { asymmetry, .. } => Some(*asymmetry),
            Error::NotSkewSymmetric { deviation, .. } => Some(*deviation),
            Error::NotPositiveDefinite { min_eigenvalue, .. }
            | Error::NotPositiveSemidefinite { min_eigenvalue, .. } => Some(*min_eigenvalue),
            Error::NotSymplecticSubspace { pivot, .. } => Some(*pivot),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
