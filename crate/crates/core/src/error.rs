use thiserror::Error;

use crate::geometry::Quadric;

/// Why a circular series stopped before reaching its step budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockReason {
    /// The chain circle touches or misses the carrier circle.
    NoSecondIntersection,
    /// Both tangent circles through the current point coincide (envelope of the family).
    EnvelopeBoundary,
    /// Fewer than two tangent circles of the requested index pass through the point.
    MissingCandidate,
    /// The current point lies on one of the base circles.
    PointOnBaseCircle,
}

impl std::fmt::Display for BlockReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            BlockReason::NoSecondIntersection => "chain circle does not cut the carrier circle twice",
            BlockReason::EnvelopeBoundary => "both tangent circles through the point coincide",
            BlockReason::MissingCandidate => "fewer than two tangent circles through the point",
            BlockReason::PointOnBaseCircle => "point lies on a base circle",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("circles coincide")]
    CoincidentCircles,
    #[error("quadric restricted to the line is constant")]
    DegenerateRestriction,
    #[error("circles are not tangent (residual {residual:.3e})")]
    NotTangent { residual: f64 },
    #[error("point lies on a base circle")]
    PointOnBaseCircle,
    #[error("no real tangent circle of the requested index through the point")]
    NoRealSolution,
    #[error("point is not on the circle (power residual {residual:.3e})")]
    PointNotOnCircle { residual: f64 },
    #[error("quadrature did not reach tolerance {tolerance:.1e} (error estimate {estimate:.3e})")]
    QuadratureFailure { tolerance: f64, estimate: f64 },
    #[error("triangle with the requested side lengths does not exist")]
    DegenerateTriangle,
    #[error("series blocked: {0}")]
    SeriesBlocked(BlockReason),
    #[error("configuration is not nested (inner base circle inside carrier inside outer base circle)")]
    NotNested,
    #[error("first chain circle does not lie inside the outer base circle")]
    AssumptionViolated,
    #[error("no inversion center found that places the chain inside the outer base circle")]
    NormalizationFailed,
    #[error("first chain circle crosses the outer base circle instead of touching it")]
    NotTangentConfiguration,
    #[error("pencil member is imaginary (squared radius {squared_radius:.3e})")]
    ImaginaryMember { squared_radius: f64 },
    #[error("pair member coincides with the carrier circle")]
    DegeneratePair,
    #[error("no real pencil member is tangent to the diagonal circle")]
    NoTangentMember,
    #[error("circle is not doubly tangent to the cyclic (residual {residual:.3e})")]
    NotDoublyTangent { residual: f64 },
    #[error("tangency condition has no real root")]
    NoRealAp,
    #[error("tangency condition has {} admissible roots", .0.len())]
    AmbiguousAp(Vec<(f64, Quadric)>),
    #[error("no real circle pair reproduces the quadric")]
    NoRealPair,
    #[error("cyclic has vanishing quartic coefficient and is not reducible to a quadric pencil")]
    LambdaZero,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
