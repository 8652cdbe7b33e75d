use alloc::string::String;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Two objects that must live on the same torus (or a matrix and its
    /// right-hand side) have incompatible sizes.
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// Inclusion–exclusion over more components than the configured budget.
    ComponentBudgetExceeded {
        components: usize,
        budget: usize,
    },
    /// Brute-force enumeration of `d^N` points exceeds the configured cap.
    CapExceeded {
        modulus: u64,
        dim: usize,
        cap: u64,
    },
    /// The modulus of a torsion computation must be at least 1.
    ZeroModulus,
    /// `defect` needs the `l = 0` entry of the fibre-dimension stratification.
    MissingStratification,
    /// Plurigenus requested for an `m` with no supplied data.
    MissingPluriData {
        m: u32,
    },
    UnknownSheaf(String),
    UnknownName(String),
    BadParams(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::ComponentBudgetExceeded { components, budget } => write!(
                f,
                "inclusion-exclusion over {components} components exceeds the budget of {budget}"
            ),
            Error::CapExceeded { modulus, dim, cap } => {
                write!(f, "enumerating {modulus}^{dim} torsion points exceeds the cap of {cap}")
            }
            Error::ZeroModulus => f.write_str("torsion modulus must be positive"),
            Error::MissingStratification => f.write_str("defect stratification is missing the l = 0 entry"),
            Error::MissingPluriData { m } => write!(f, "no plurigenus data for m = {m}"),
            Error::UnknownSheaf(name) => write!(f, "unknown sheaf family `{name}`"),
            Error::UnknownName(name) => write!(f, "unknown catalog entry `{name}`"),
            Error::BadParams(msg) => write!(f, "bad parameters: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
