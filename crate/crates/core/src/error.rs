use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime in [2, 65536)")]
    NotPrime(u64),
    #[error("modulus of degree {0} is not irreducible over F_p")]
    ReducibleModulus(usize),
    #[error("invalid extension degree {0}")]
    BadExtensionDegree(usize),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("variable count mismatch: {0} vs {1}")]
    VarMismatch(usize, usize),
    #[error("characteristic mismatch: {0} vs {1}")]
    FieldMismatch(u32, u32),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(u32, u32),
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("polynomial vanishes after reduction mod {0}")]
    ZeroModP(u32),
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("not a plane curve (n = {0})")]
    NotACurve(usize),
    #[error("curve has genus zero")]
    GenusZero,

    #[error("p-power map A_{degree} -> A_{target} has a kernel of dimension {kernel}")]
    NonInjectivePower { degree: i32, target: i32, kernel: usize },
    #[error("saturation in degree {degree} did not stabilize (last exponent tried {tried})")]
    NoStabilization { degree: i32, tried: usize },
    #[error("degree {degree} is outside the materialized range [{lo}, {hi}]")]
    OutOfRange { degree: i32, lo: i32, hi: i32 },
    #[error("presentation is not square: {gens} generators, {rels} relations")]
    NotSquare { gens: usize, rels: usize },
    #[error("minimal generator in degree {degree} exceeds the relation cutoff {cutoff}")]
    GeneratorAboveCutoff { degree: i32, cutoff: i32 },
    #[error("freeness check failed in degree {degree}: expected {expected}, found {found}")]
    FreenessCheckFailed { degree: i32, expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    MatrixShape { rows: usize, cols: usize },
    #[error("determinant size cap exceeded ({0} > 16)")]
    SizeCap(usize),
    #[error("matrix is not alternating")]
    NotSkew,
    #[error("matrix has odd size {0}")]
    OddSize(usize),
    #[error("every sample point annihilated G")]
    DegenerateSamples,
    #[error("det(M) is not a scalar multiple of G^{r}: {detail}")]
    Mismatch { r: u32, detail: String },
    #[error("deg det(M) = {det_degree} is not a multiple of deg G = {g_degree}")]
    DegreeIncompatible { det_degree: u32, g_degree: u32 },

    #[error("i/o error: {0}")]
    Io(String),
    #[error("json error: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
