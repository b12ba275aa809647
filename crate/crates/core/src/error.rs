use std::path::PathBuf;

/// Errors raised by the laboratory.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("p^d = {p}^{d} exceeds the enumeration guard of 2^31")]
    SizeOverflow { p: u32, d: usize },
    #[error("{0} is not an odd prime")]
    InvalidPrime(u64),
    #[error("exponent {0} is outside [1, inf]")]
    InvalidExponent(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("quadratic form is degenerate (rank {rank} < {dim})")]
    DegenerateForm { rank: usize, dim: usize },
    #[error("subspace is not maximal totally isotropic: {0}")]
    NotMaximalIsotropic(String),
    #[error("restricted form vanishes identically")]
    FullyDegenerate,
    #[error("subspaces are not complementary")]
    NonComplementary,
    #[error("matrix does not realise the requested congruence")]
    NotCongruent,
    #[error("point {0:?} is not on the surface")]
    NotOnSurface(Vec<u32>),
    #[error("alpha = {alpha} is outside the validity range of {kind}")]
    OutOfValidityRange { kind: String, alpha: f64 },
    #[error("no equalising root in [alpha, 1) for alpha = {alpha}; endpoint bound {endpoint}")]
    NoRoot { alpha: f64, endpoint: f64 },
    #[error("subspaces are not a complementary isotropic pair")]
    NotIsotropicPair,
    #[error("unknown scenario {0}")]
    UnknownScenario(String),
    #[error("parameter {name} = {value} is invalid for {scenario}: {reason}")]
    BadParameter {
        scenario: String,
        name: &'static str,
        value: String,
        reason: String,
    },
    #[error("no baseline for {0}; run `fflab baseline --regen --ids {0}`")]
    MissingBaseline(String),
    #[error("baseline for {id} was produced by a different oracle (stored {stored}, current {current})")]
    OracleHashMismatch {
        id: String,
        stored: String,
        current: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
