use thiserror::Error;

/// Errors raised by the library. Every variant carries enough context to
/// identify the offending input.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid signature ({p},{q}): {reason}")]
    InvalidSignature { p: usize, q: usize, reason: String },
    #[error("invalid convention sign {0}, expected +1 or -1")]
    InvalidConvention(i32),
    #[error("invalid blade {indices:?} for dimension {n}: indices must be strictly increasing and < n")]
    InvalidBlade { indices: Vec<usize>, n: usize },
    #[error("grade {grade} out of range 0..={n}")]
    GradeOutOfRange { grade: usize, n: usize },
    #[error("invalid index subset {subset:?} for rank {rank}")]
    InvalidIndexSubset { subset: Vec<usize>, rank: usize },
    #[error("tensor violates required symmetry: {0}")]
    SymmetryViolated(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("grading violation: {0}")]
    Grading(String),
    #[error("invalid internal operator: {0}")]
    InvalidPhi(String),
    #[error("not of simple type: residual {residual:e} exceeds tolerance {tolerance:e}")]
    NotSimpleType { residual: f64, tolerance: f64 },
    #[error("problem size exceeds brute-force limits: {0}")]
    SizeLimit(String),
    #[error("lattice size {0} below minimum of 4 sites per direction")]
    LatticeTooSmall(usize),
    #[error("operator needs about {needed} bytes which exceeds the memory cap of {cap} bytes")]
    MemoryCap { needed: usize, cap: usize },
    #[error("unsupported chart: {0}")]
    UnsupportedChart(String),
    #[error("gauge transformation is not unitary or does not commute with the Clifford action: {0}")]
    NotUnitaryGauge(String),
    #[error("invalid fermion model: {0}")]
    InvalidModel(String),
    #[error("Yukawa image is not anti-Hermitian: deviation {0:e}")]
    YukawaNotAntiHermitian(f64),
    #[error("Yukawa map is not equivariant: residual {0:e}")]
    NotEquivariant(f64),
    #[error("Yukawa image does not map Γ-even to Γ-odd: residual {0:e}")]
    YukawaNotOdd(f64),
    #[error("group action is not transitive on the orbit sphere: {0}")]
    NotTransitive(String),
    #[error("no real structure available: {0}")]
    NoRealStructure(String),
    #[error("numerical procedure did not converge: {0}")]
    NoConvergence(String),
    #[error("polynomial fit of the {family} family failed: residual {residual:e} exceeds {tolerance:e}")]
    DecompositionFailure { family: String, residual: f64, tolerance: f64 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
