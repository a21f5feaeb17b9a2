use thiserror::Error;

/// Errors raised by the operator and spectrum routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("shape mismatch: expected (d={expected_d}, n={expected_n}), found (d={found_d}, n={found_n})")]
    Shape {
        expected_d: usize,
        expected_n: usize,
        found_d: usize,
        found_n: usize,
    },

    #[error("operator must have unit l2 norm, measured {norm}")]
    Normalization { norm: f64 },

    #[error("operator is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("operator is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("not a density operator: {0}")]
    InvalidState(String),

    #[error("dephased state has vanishing diagonal entry {value:.3e} at index {index}")]
    SingularState { index: usize, value: f64 },

    #[error("operator is not supported on the declared qudits (residual {residual:.3e})")]
    Support { residual: f64 },

    #[error("eigensolver did not converge: {0}")]
    Convergence(String),

    #[error("unsupported local dimension {d}: {what} requires qubits")]
    QubitsOnly { d: usize, what: &'static str },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
