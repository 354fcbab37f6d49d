use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A caller-supplied parameter is outside its domain.
    Parameter(String),
    /// A vertex id does not fit the id space (or the declared vertex count).
    VertexOutOfRange { id: u64, limit: u64 },
    /// Vector or matrix shapes do not line up.
    DimensionMismatch { expected: usize, found: usize },
    /// A bin received a different number of entries than the layout sized it for.
    CapacityOverflow { bin: usize, expected: usize, found: usize },
    /// A non-empty destination-id bin does not start with an MSB-flagged id.
    MalformedBin { bin: usize },
    /// CSR arrays violate a structural invariant.
    InvalidGraph(String),
    /// An internal invariant was violated.
    Invariant(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::VertexOutOfRange { id, limit } => {
                write!(f, "vertex id {id} out of range (limit {limit})")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::CapacityOverflow { bin, expected, found } => {
                write!(f, "bin {bin} sized for {expected} entries but received {found}")
            }
            Error::MalformedBin { bin } => {
                write!(f, "destination bin {bin} does not start with a flagged id")
            }
            Error::InvalidGraph(msg) => write!(f, "invalid graph: {msg}"),
            Error::Invariant(msg) => write!(f, "invariant violated: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
