//! Invariant measures for circular closing theorems.
//!
//! The density `ρ(x) = 1/√|f₀(x) f₁(x)|` built from the powers of two base
//! circles is invariant along any carrier circle `δ` under the chord map of
//! an Emch circular series. This crate constructs such series, integrates
//! `ρ` along arcs, checks the invariance identities numerically and relates
//! the construction to pencils of circles, cyclics and Poncelet quadrics.

pub mod conic_bridge;
pub mod error;
pub mod geometry;
pub mod measure;
pub mod pencils;
pub mod quadrature;
pub mod series;
pub mod tangency;

use serde::{Deserialize, Serialize};

pub use error::{BlockReason, Error, Result};
pub use geometry::{Circle, Curve, Inversion, Line, Point, Quadric};
pub use measure::{Direction, PairDensity};
pub use series::{CircularSeries, ClosureReport, Scene};
pub use tangency::{TangencyIndex, TangentCircle};

/// Numerical tolerances shared by all operations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Tangency and coincidence classification, in scene length units.
    pub geo: f64,
    /// Absolute target error of arc-mass quadrature.
    pub quad: f64,
    /// Closure detection in (center, radius) space.
    pub close: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            geo: 1e-9,
            quad: 1e-10,
            close: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("geo", self.geo), ("quad", self.quad), ("close", self.close)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "tolerance {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}
