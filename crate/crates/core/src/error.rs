use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid class: {0}")]
    InvalidClass(String),
    #[error("empty hypothesis class")]
    EmptyClass,
    #[error("label {label} exceeds k = {k}")]
    LabelOutOfRange { label: u32, k: u16 },
    #[error("domain index {index} out of range for domain of size {size}")]
    DomainOutOfRange { index: usize, size: usize },
    #[error("bit index {index} outside 1..={bits}")]
    InvalidBitIndex { index: usize, bits: usize },
    #[error("expected a binary class (k = 1), found k = {0}")]
    NotBinary(u16),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("resource cap exceeded: {what} ({value} > {cap})")]
    CapExceeded { what: &'static str, value: u128, cap: u128 },
    #[error("malformed tree: {0}")]
    MalformedTree(String),
    #[error("depth mismatch: expected {expected}, found {found}")]
    DepthMismatch { expected: usize, found: usize },
    #[error("feedback not realizable by the class: x = {x}, y = {y}")]
    Unrealizable { x: usize, y: u16 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("game solver did not reach tolerance {tolerance} within {iterations} iterations")]
    ToleranceNotReached { tolerance: f64, iterations: u64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("bound violated: {name} ({lhs} > {rhs})")]
    BoundViolated { name: String, lhs: String, rhs: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn cap(what: &'static str, value: impl Into<u128>, cap: impl Into<u128>) -> Self {
        Error::CapExceeded { what, value: value.into(), cap: cap.into() }
    }

    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}
