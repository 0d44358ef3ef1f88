use thiserror::Error;

use crate::lattice::PrimitiveDirection;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate lattice basis: |det| = {det:e}")]
    DegenerateBasis { det: f64 },
    #[error("zero mean field: the total magnetic flux must be nonzero")]
    ZeroFlux,
    #[error("flux integer must be ±1, got {0}")]
    FluxNotUnit(String),
    #[error("(0,0) is not a valid direction or oscillatory index")]
    ZeroIndex,
    #[error("profile has a p = 0 coefficient; its antiderivative is not periodic")]
    NonPeriodicAntiderivative,
    #[error("coefficient at ({m},{n}) breaks Hermitian symmetry")]
    NotHermitian { m: i64, n: i64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("hypothesis |B - b0| < |b0| fails: margin {margin:e}")]
    HypothesisViolated { margin: f64 },
    #[error("pushforward density not positive (min {min:e}): map is not monotone")]
    NotMonotone { min: f64 },
    #[error("magnetic translation by e{j} leaves the sample grid")]
    ShiftOutsideGrid { j: usize },
    #[error("dual index ({m},{n}) assigned twice")]
    DuplicateAssignment { m: i64, n: i64 },
    #[error("root solve failed for target {target:e}")]
    RootSolve { target: f64 },
    #[error("direction {direction}: {source}")]
    Direction {
        direction: PrimitiveDirection,
        #[source]
        source: Box<Error>,
    },
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn at(self, direction: PrimitiveDirection) -> Self {
        Error::Direction {
            direction,
            source: Box::new(self),
        }
    }
}
