use thiserror::Error;

/// Errors raised by the library. Variants are grouped by the module that
/// raises them; the CLI maps "numeric guard" variants to a distinct exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // partitions
    #[error("parts must be weakly decreasing (part {index} = {value} exceeds its predecessor)")]
    NonMonotonic { index: usize, value: i64 },
    #[error("parts must be positive (part {index} = {value})")]
    NonPositivePart { index: usize, value: i64 },
    #[error("n = {n} exceeds the enumeration cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("empty range [{a}, {b}]")]
    EmptyRange { a: i64, b: i64 },
    #[error("size mismatch: partition has {actual} cells, caller passed n = {expected}")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("cannot parse partition {0:?}")]
    ParsePartition(String),

    // sampling
    #[error("duplicate entry in insertion sequence")]
    DuplicateEntry,
    #[error("window length {len} exceeds the limit {max}")]
    WindowTooLarge { len: usize, max: usize },
    #[error("restricted kernel eigenvalue {value} lies outside [0, 1] beyond tolerance")]
    EigenvalueOutOfRange { value: f64 },

    // kernels
    #[error("Bessel table covers orders up to {max_order}, order {needed} required")]
    TableTooSmall { needed: i64, max_order: i64 },
    #[error("duplicate point {0} in correlation")]
    DuplicatePoint(i64),
    #[error("{count} points exceed the correlation limit {max}")]
    TooManyPoints { count: usize, max: usize },
    #[error("contour radii must satisfy 0 < r < 1 < R (got r = {inner}, R = {outer})")]
    RadiusOrderViolated { inner: f64, outer: f64 },

    // variance
    #[error("interval [{a}, {b}] leaves the kernel support [-{cutoff}, {cutoff}]")]
    IntervalBeyondEdge { a: i64, b: i64, cutoff: i64 },
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    // stats
    #[error("{got} samples, at least {need} required")]
    TooFewSamples { got: usize, need: usize },
    #[error("degenerate regression design: {0}")]
    DegenerateDesign(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures of a numerical guard (as opposed to malformed input).
    pub fn is_numeric_guard(&self) -> bool {
        matches!(
            self,
            Error::IntervalBeyondEdge { .. }
                | Error::TableTooSmall { .. }
                | Error::EigenvalueOutOfRange { .. }
                | Error::WindowTooLarge { .. }
                | Error::CapExceeded { .. }
                | Error::DegenerateDesign(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
