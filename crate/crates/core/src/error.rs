//! Error type shared across the crate.

/// Everything that can go wrong when validating inputs or running a
/// numerical check whose precondition fails.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("not Hermitian: symmetry residual {residual:.3e} exceeds {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("not positive semidefinite: min eigenvalue {min_eigenvalue:.3e} below -{tol:.3e}")]
    NotPsd { min_eigenvalue: f64, tol: f64 },

    #[error("not a contraction: operator norm {norm} exceeds 1")]
    NotContraction { norm: f64 },

    #[error("not unitary: residual {residual:.3e}")]
    NotUnitary { residual: f64 },

    #[error("operators do not commute: residual {residual:.3e}")]
    NotCommuting { residual: f64 },

    #[error("tuple does not doubly commute: residual {residual:.3e}")]
    NotDoublyCommuting { residual: f64 },

    #[error(
        "adjoint-commutation residual {residual:.3e} inconsistent with commuting normal input"
    )]
    FugledeResidual { residual: f64 },

    #[error("vector is not invariant: residual {residual:.3e}")]
    NotInvariant { residual: f64 },

    #[error("point lies outside the open unit disc: modulus {modulus}")]
    NotInDisc { modulus: f64 },

    #[error("polynomial degree {degree} exceeds certificate order {order}")]
    DegreeExceedsOrder { degree: usize, order: usize },

    #[error("joint diagonalization failed to reach residual target: {residual:.3e}")]
    DegenerateFailure { residual: f64 },

    #[error("map is not completely positive: Choi min eigenvalue {min_eigenvalue:.3e}")]
    NotCp { min_eigenvalue: f64 },

    #[error("supplied operators are not an N-dilation of the tuple: residual {residual:.3e}")]
    NotADilation { residual: f64 },

    #[error("cubature weight {value:.3e} is negative beyond rounding tolerance")]
    NegativeWeight { value: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
