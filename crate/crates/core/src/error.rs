use crate::linalg::LinalgError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("the half-space intersection is unbounded")]
    UnboundedRegion,
    #[error("vertex {point} lies on {count} facets; the polytope is not simple")]
    NonSimpleVertex { point: String, count: usize },
    #[error("the half-space intersection has empty interior")]
    EmptyInterior,
    #[error("half-space {facet} does not support a facet")]
    RedundantHalfspace { facet: usize },
    #[error("scale factor must be positive")]
    NonPositiveScale,
    #[error("the origin is not in the interior of the polytope")]
    OriginNotInterior,
    #[error("the Reeb vector is outside the chamber")]
    ReebVectorOutsideChamber,
    #[error("the affine function is not positive on the polytope")]
    ReebNotPositive,
    #[error("Reeb vector too close to the chamber wall (min vertex value {min_value:.3e})")]
    ChamberBoundaryProximity { min_value: f64 },
    #[error("quadrature stopped at estimated relative error {error:.3e}")]
    AccuracyNotReached { error: f64 },
    #[error("exponent {power} has no closed form for this numerator; use the floating pipeline")]
    UnsupportedExponent { power: usize },
    #[error("operation requires dimension {expected}, got {found}")]
    WrongDimension { expected: usize, found: usize },
    #[error("labels cannot be certified rational")]
    IrrationalLabels,
    #[error("normal of facet {facet} is not along a lattice direction")]
    NormalNotInLatticeDirection { facet: usize },
    #[error("linear system is ill-conditioned (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },
    #[error("critical point search exhausted: {0}")]
    SearchExhausted(String),
    #[error("resultant vanishes identically; the system has a common factor")]
    DegenerateResultant,
    #[error("expected a quadrilateral (dimension 2 with 4 facets)")]
    NotAQuadrilateral,
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("p = {p} and q = {q} are not coprime")]
    NotCoprime { p: u64, q: u64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
