use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid Cartan type: {0}")]
    InvalidCartanType(String),

    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("degenerate Cartan pairing: p={p} divides det(Cartan matrix)={det}")]
    DegenerateCartanPairing { p: u64, det: i64 },

    #[error("structure constants vanish mod p: p={p} <= n_max={n_max}")]
    StructureConstantsVanish { p: u64, n_max: u64 },

    #[error("not a prime: {0}")]
    NotPrime(u64),

    #[error("prime too small: p={p}, need p >= {min}")]
    PrimeTooSmall { p: u64, min: u64 },

    #[error("level bounds violated: {0}")]
    LevelBounds(String),

    #[error("element is not in the kernel layer: {0}")]
    NotInLayer(String),

    #[error("enumeration cap exceeded: more than {cap} elements")]
    CapExceeded { cap: usize },

    #[error("prime search exceeded ceiling {ceiling}")]
    PrimeSearchCeiling { ceiling: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cache I/O: {0}")]
    Cache(String),
}
