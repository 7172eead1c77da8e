use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid letter {base}^({power}): {reason}")]
    InvalidLetter {
        base: u32,
        power: u32,
        reason: &'static str,
    },
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("grade {grade} outside 1..={max}")]
    GradeOutOfRange { grade: usize, max: usize },
    #[error("composition sums to {sum} but the word has length {len}")]
    CompositionMismatch { sum: usize, len: usize },
    #[error("endomorphism must vanish on the empty word")]
    NotAugmented,
    #[error("series must have unit coefficient on the empty element")]
    MalformedUnit,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("unknown decoration {0}")]
    UnknownDecoration(u32),
    #[error("operation requires a nonempty word")]
    EmptyWord,
    #[error("series is not homogeneous of length {0}")]
    NotHomogeneous(usize),
    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),
    #[error("power {power} is not defined for Wiener driver {driver}")]
    WienerPower { driver: u32, power: u32 },
    #[error("invalid grid step {0}")]
    InvalidStep(f64),
    #[error("spec is not a scalar linear equation: {0}")]
    NotLinear(String),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
