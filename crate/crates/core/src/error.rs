use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("width mismatch: {0} qubits vs {1} qubits")]
    WidthMismatch(usize, usize),

    #[error("invalid Pauli string {0:?}: {1}")]
    InvalidPauli(String, &'static str),

    #[error("{what} needs {qubits} qubits, cap is {cap}")]
    DimensionCap {
        what: &'static str,
        qubits: usize,
        cap: usize,
    },

    #[error("Hamiltonian has no nonzero coefficient")]
    EmptyHamiltonian,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("qubit {qubit} out of range for a {total}-qubit register")]
    QubitOutOfRange { qubit: usize, total: usize },

    #[error("gate acts twice on qubit {0}")]
    DuplicateQubit(usize),

    #[error("non-finite gate parameter")]
    NonFinite,

    #[error("weights sum to {0}, expected 1")]
    WeightSum(f64),

    #[error("energy {0} is at the spectral boundary |E| = 1")]
    BoundaryEnergy(f64),

    #[error("observable cannot be recovered: scale factor {0} is too close to zero")]
    Unrecoverable(f64),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
