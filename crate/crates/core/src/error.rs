use alloc::string::String;
use core::fmt;

/// Errors raised by the circuit compiler core.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Coefficient arrays do not match the declared `T` and `r`.
    DimensionMismatch(String),
    /// The level-schedule theory needs `r > T^2` and `0 < gamma < 1`.
    ScheduleInapplicable { rank: usize, block_dim: usize },
    /// Matrix dimension is not a power of the base block dimension.
    NotPowerOfBase { n: usize, base: usize },
    /// A requested tree level is outside `[0, log_T N]` or not below/above the source level.
    LevelOutOfRange { from: u32, to: u32, max: u32 },
    /// MSB extractor called with `k` outside `1..=l`.
    BitIndexOutOfRange { l: u32, k: u32 },
    /// A weighted sum needs at least one term.
    EmptySum,
    /// Composed algorithm coefficients overflowed `i64`.
    CoefficientOverflow,
    /// Input bit vector length does not match the circuit.
    InputLength { expected: usize, got: usize },
    /// A matrix entry does not fit the declared input width.
    EntryTooWide { label: String },
    /// A value supplied for an input label was missing or malformed.
    MissingInput(String),
    /// Threshold `tau` exceeds the width bound of the trace circuit.
    ThresholdTooWide { bits: u64, max_bits: u64 },
    /// Adjacency matrix is not symmetric with zero diagonal.
    NotAdjacency,
    /// Shapes of operands do not conform.
    ShapeMismatch(String),
    /// A label could not be parsed.
    BadLabel(String),
    /// Circuit structure violates the DAG or fan-in rules.
    InvalidStructure(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            Error::ScheduleInapplicable { rank, block_dim } => write!(
                f,
                "level schedule needs r > T^2 and 0 < gamma < 1 (r = {rank}, T^2 = {})",
                block_dim * block_dim
            ),
            Error::NotPowerOfBase { n, base } => {
                write!(f, "N = {n} is not a power of T = {base}")
            }
            Error::LevelOutOfRange { from, to, max } => {
                write!(f, "level step {from} -> {to} out of range (max level {max})")
            }
            Error::BitIndexOutOfRange { l, k } => {
                write!(f, "bit index k = {k} out of range for l = {l}")
            }
            Error::EmptySum => f.write_str("weighted sum has no terms"),
            Error::CoefficientOverflow => f.write_str("composed coefficient overflows i64"),
            Error::InputLength { expected, got } => {
                write!(f, "expected {expected} input bits, got {got}")
            }
            Error::EntryTooWide { label } => write!(f, "value for {label} does not fit its bits"),
            Error::MissingInput(name) => write!(f, "missing input value for {name}"),
            Error::ThresholdTooWide { bits, max_bits } => {
                write!(f, "tau needs {bits} bits, bound is {max_bits}")
            }
            Error::NotAdjacency => {
                f.write_str("adjacency matrix must be symmetric 0/1 with zero diagonal")
            }
            Error::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
            Error::BadLabel(label) => write!(f, "unrecognized signal label {label:?}"),
            Error::InvalidStructure(msg) => write!(f, "invalid circuit: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;
