use crate::basis::{Sector, SiteKind};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("sector {sector:?} is empty for {sites} {kind:?} sites")]
    EmptySector {
        sites: usize,
        kind: SiteKind,
        sector: Sector,
    },

    #[error("sector {sector:?} is not defined for {kind:?} sites")]
    UnsupportedSector { kind: SiteKind, sector: Sector },

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{term} maps configuration {from} outside the {sector:?} sector (amplitude {amplitude:e})")]
    SymmetryViolation {
        term: String,
        from: u64,
        sector: Sector,
        amplitude: f64,
    },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("observable is not conserved: max |[A, rho]| = {norm:e}")]
    NotConserved { norm: f64 },

    #[error("entanglement spectrum carries no charge labels")]
    MissingCharges,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate single-particle levels straddle the Fermi level ({below} and {above})")]
    DegenerateFermiLevel { below: f64, above: f64 },

    #[error("subspace selection is empty")]
    EmptySubspace,

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
