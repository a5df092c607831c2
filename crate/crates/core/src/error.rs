use thiserror::Error;

/// Failure modes shared by every operation in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input violates a documented precondition or invariant.
    #[error("validation error: {0}")]
    Validation(String),
    /// A search or enumeration exceeded its configured cap.
    #[error("computational limit exceeded: {0}")]
    Limit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}

/// Caps for every exhaustive search in the crate.
///
/// The CLI exposes a single `--limit` flag which maps onto
/// [`Limits::uniform`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of circuits enumerated for a cycle matroid.
    pub circuits: usize,
    /// Maximum number of lattice points returned by one ellipsoid enumeration.
    pub lattice_points: usize,
    /// Maximum number of states visited by twist-orbit searches.
    pub orbit: usize,
    /// Maximum number of candidate tuples tried by witness searches.
    pub witnesses: usize,
    /// Maximum number of cells in a Delaunay star.
    pub cells: usize,
    /// Maximum genus accepted by the stable graph enumerator.
    pub genus: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            circuits: 100_000,
            lattice_points: 200_000,
            orbit: 100_000,
            witnesses: 2_000_000,
            cells: 20_000,
            genus: 5,
        }
    }
}

impl Limits {
    /// Every count cap set to `n`; the genus cap stays at its default.
    pub fn uniform(n: usize) -> Self {
        Limits {
            circuits: n,
            lattice_points: n,
            orbit: n,
            witnesses: n,
            cells: n,
            ..Limits::default()
        }
    }
}
