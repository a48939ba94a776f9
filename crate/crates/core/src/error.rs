use thiserror::Error;

/// Errors produced while building models, solving them, or certifying gaps.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("spin must be a positive half-integer, got {0}")]
    InvalidSpin(f64),

    #[error("anisotropy must satisfy delta > 1, got {0}")]
    InvalidAnisotropy(f64),

    #[error("magnetic quantum number 2m={two_m} outside the ladder of spin 2j={two_j}")]
    MagneticNumberOutOfRange { two_j: u32, two_m: i32 },

    #[error("chain needs at least {min} sites, got {sites}")]
    ChainTooShort { sites: usize, min: usize },

    #[error("site {site} outside [{lo}, {hi}]")]
    SiteOutOfRange { site: usize, lo: usize, hi: usize },

    #[error("Hilbert space dimension {local}^{sites} exceeds the budget of {budget}")]
    DimensionOverflow { local: usize, sites: usize, budget: usize },

    #[error("total 2m={two_m} is not reachable on {sites} sites with 2j={two_j}")]
    UnreachableSector { sites: usize, two_j: u32, two_m: i32 },

    #[error("operator couples different S3 sectors (entry of magnitude {magnitude:.3e})")]
    SectorCoupling { magnitude: f64 },

    #[error("dense diagonalization of dimension {dim} exceeds the cap {cap}")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),

    #[error("ground cluster fills all {k} computed eigenvalues; request more")]
    ClusterFillsK { k: usize },

    #[error("unsupported regime: {0}")]
    Unsupported(String),

    #[error("certificate refused: {0}")]
    CertificateRefused(String),

    #[error("closed form {name} = {closed} disagrees with dense value {numeric} (|diff| = {diff:.3e})")]
    ClosedFormMismatch {
        name: &'static str,
        closed: f64,
        numeric: f64,
        diff: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
