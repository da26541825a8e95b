//! Tangency classification and the Apollonius constructions used to build
//! chain circles.
//!
//! Both solvers invert at a point the sought circles must pass through.
//! Circles through that point become lines, so tangent circles through one
//! point become common tangent lines of the two image circles, and tangent
//! circles through two points become tangent lines from one image point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Circle, Inversion, Line, Point};

/// Parity of the number of interior tangencies a circle has with the base pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum TangencyIndex {
    Zero,
    One,
}

impl TangencyIndex {
    pub fn value(self) -> u8 {
        match self {
            TangencyIndex::Zero => 0,
            TangencyIndex::One => 1,
        }
    }

    pub fn other(self) -> Self {
        match self {
            TangencyIndex::Zero => TangencyIndex::One,
            TangencyIndex::One => TangencyIndex::Zero,
        }
    }

    pub fn from_interior_count(count: usize) -> Self {
        if count.is_multiple_of(2) {
            TangencyIndex::Zero
        } else {
            TangencyIndex::One
        }
    }
}

impl From<TangencyIndex> for u8 {
    fn from(i: TangencyIndex) -> u8 {
        i.value()
    }
}

impl TryFrom<u8> for TangencyIndex {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            0 => Ok(TangencyIndex::Zero),
            1 => Ok(TangencyIndex::One),
            other => Err(format!("tangency index must be 0 or 1, got {other}")),
        }
    }
}

/// How two tangent circles touch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactKind {
    /// Each circle lies outside the other.
    Exterior,
    /// One circle lies inside the other.
    Interior,
}

/// Distance from `a` and `b` to exterior and interior tangency.
fn contact_residuals(a: &Circle, b: &Circle) -> (f64, f64, f64) {
    let d = a.center.distance(b.center);
    let ext = (d - (a.radius + b.radius)).abs();
    let int = (d - (a.radius - b.radius).abs()).abs();
    (d, ext, int)
}

/// Classify the tangency of two circles; `NotTangent` when neither
/// `|d - (r + r')|` nor `|d - |r - r'||` is within `eps`.
pub fn contact_kind(a: &Circle, b: &Circle, eps: f64) -> Result<ContactKind> {
    let (d, ext, int) = contact_residuals(a, b);
    if d <= eps {
        // concentric circles never touch unless they coincide
        return Err(Error::NotTangent {
            residual: (a.radius - b.radius).abs().max(d),
        });
    }
    let best = ext.min(int);
    if best > eps {
        return Err(Error::NotTangent { residual: best });
    }
    Ok(if int < ext {
        ContactKind::Interior
    } else {
        ContactKind::Exterior
    })
}

/// Smallest of the two tangency residuals.
pub fn tangency_residual(a: &Circle, b: &Circle) -> f64 {
    let (_, ext, int) = contact_residuals(a, b);
    ext.min(int)
}

/// A chain circle together with its touch points on the base pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentCircle {
    pub circle: Circle,
    pub touch0: Point,
    pub touch1: Point,
    pub index: TangencyIndex,
    /// Set when the two solutions through the construction point merged.
    #[serde(default)]
    pub boundary: bool,
}

impl TangentCircle {
    /// Build from a circle already known to touch both base circles.
    pub fn from_circle(circle: Circle, alpha0: &Circle, alpha1: &Circle, eps: f64) -> Result<Self> {
        let index = classify_index(&circle, alpha0, alpha1, eps)?;
        Ok(Self {
            circle,
            touch0: tangency_point(&circle, alpha0, eps)?,
            touch1: tangency_point(&circle, alpha1, eps)?,
            index,
            boundary: false,
        })
    }
}

pub fn classify_index(omega: &Circle, alpha0: &Circle, alpha1: &Circle, eps: f64) -> Result<TangencyIndex> {
    let interior = [alpha0, alpha1]
        .into_iter()
        .map(|a| contact_kind(omega, a, eps))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|k| *k == ContactKind::Interior)
        .count();
    Ok(TangencyIndex::from_interior_count(interior))
}

/// Touch point of two tangent circles, averaged from both circles' sides.
pub fn tangency_point(omega: &Circle, alpha: &Circle, eps: f64) -> Result<Point> {
    let kind = contact_kind(omega, alpha, eps)?;
    let d = alpha.center - omega.center;
    let e = d / d.norm();
    let (from_omega, from_alpha) = match kind {
        ContactKind::Exterior => (omega.center + e * omega.radius, alpha.center - e * alpha.radius),
        ContactKind::Interior if omega.radius < alpha.radius => {
            (omega.center - e * omega.radius, alpha.center - e * alpha.radius)
        }
        ContactKind::Interior => (omega.center + e * omega.radius, alpha.center + e * alpha.radius),
    };
    Ok(from_omega.lerp(from_alpha, 0.5))
}

/// Common tangent lines of two circles (up to four).
fn common_tangents(a: &Circle, b: &Circle) -> Vec<Line> {
    let delta = a.center - b.center;
    let l2 = delta.norm_sq();
    let mut lines = Vec::with_capacity(4);
    if l2 == 0.0 {
        return lines;
    }
    for side in [1.0, -1.0] {
        // n·a.center - d = a.radius and n·b.center - d = side * b.radius
        let k = a.radius - side * b.radius;
        let mut disc = l2 - k * k;
        if disc < 0.0 {
            if disc < -1e-12 * l2 {
                continue;
            }
            disc = 0.0;
        }
        let root = disc.sqrt();
        for sigma in [1.0, -1.0] {
            let n = (delta * k + delta.perp() * (sigma * root)) / l2;
            let n = n / n.norm();
            lines.push(Line {
                normal: n,
                offset: n.dot(a.center) - a.radius,
            });
        }
    }
    lines
}

/// Circle image of a line under `inv`, or `None` when the line passes
/// (numerically) through the inversion center.
fn line_to_circle(inv: &Inversion, l: &Line, scale: f64) -> Option<Circle> {
    let h = l.offset - l.normal.dot(inv.center);
    if h.abs() <= 1e-14 * scale {
        return None;
    }
    let k = inv.power / (2.0 * h);
    Some(Circle {
        center: inv.center + l.normal * k,
        radius: k.abs(),
    })
}

fn image_circle(inv: &Inversion, c: &Circle) -> Result<Circle> {
    match inv.invert_circle(c, 0.0) {
        crate::geometry::Curve::Circle(img) => Ok(img),
        crate::geometry::Curve::Line(_) => Err(Error::PointOnBaseCircle),
    }
}

/// Every real circle through `p` tangent to both base circles, of either index.
pub fn all_tangent_circles_through_point(
    alpha0: &Circle,
    alpha1: &Circle,
    p: Point,
    eps: f64,
) -> Result<Vec<TangentCircle>> {
    if alpha0.parameter_distance(alpha1) <= eps {
        return Err(Error::CoincidentCircles);
    }
    if alpha0.power(p).abs() <= eps || alpha1.power(p).abs() <= eps {
        return Err(Error::PointOnBaseCircle);
    }
    let inv = Inversion::new(p, 1.0)?;
    let b0 = image_circle(&inv, alpha0)?;
    let b1 = image_circle(&inv, alpha1)?;
    let scale = b0.center.distance(p) + b0.radius + b1.center.distance(p) + b1.radius;

    let mut out: Vec<TangentCircle> = Vec::with_capacity(4);
    for line in common_tangents(&b0, &b1) {
        let Some(circle) = line_to_circle(&inv, &line, scale) else {
            continue;
        };
        let Ok(index) = classify_index(&circle, alpha0, alpha1, eps) else {
            continue;
        };
        let (Some(t0), Some(t1)) = (inv.map_point(line.foot(b0.center)), inv.map_point(line.foot(b1.center))) else {
            continue;
        };
        let candidate = TangentCircle {
            circle,
            touch0: t0,
            touch1: t1,
            index,
            boundary: false,
        };
        if let Some(existing) = out
            .iter_mut()
            .find(|c| c.index == index && c.circle.parameter_distance(&circle) <= eps)
        {
            existing.boundary = true;
            continue;
        }
        out.push(candidate);
    }
    Ok(out)
}

/// Circles through `p` touching `alpha0` and `alpha1` with index `index`.
///
/// Generically two; a single circle flagged `boundary` when `p` lies on the
/// envelope of the family.
pub fn tangent_circles_through_point(
    alpha0: &Circle,
    alpha1: &Circle,
    p: Point,
    index: TangencyIndex,
    eps: f64,
) -> Result<Vec<TangentCircle>> {
    let found: Vec<_> = all_tangent_circles_through_point(alpha0, alpha1, p, eps)?
        .into_iter()
        .filter(|c| c.index == index)
        .collect();
    if found.is_empty() {
        return Err(Error::NoRealSolution);
    }
    Ok(found)
}

/// A circle through two given points touching a third circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPointTangent {
    pub circle: Circle,
    pub touch: Point,
    pub kind: ContactKind,
}

/// Circles through `p` and `q` tangent to `alpha` (at most two).
pub fn circles_through_two_points(p: Point, q: Point, alpha: &Circle, eps: f64) -> Result<Vec<TwoPointTangent>> {
    if alpha.power(p).abs() <= eps || alpha.power(q).abs() <= eps {
        return Err(Error::PointOnBaseCircle);
    }
    if p.distance(q) <= eps {
        return Err(Error::InvalidInput("the two points coincide".into()));
    }
    let inv = Inversion::new(p, 1.0)?;
    let img = image_circle(&inv, alpha)?;
    let q_img = inv.map_point(q).expect("q differs from p");
    let v = img.center - q_img;
    let dist = v.norm();
    if dist < img.radius {
        return Ok(Vec::new());
    }
    let scale = dist + img.radius + q_img.distance(p);
    let half = (img.radius / dist).min(1.0).asin();
    let base = v.angle();
    let mut out: Vec<TwoPointTangent> = Vec::with_capacity(2);
    for sign in [1.0, -1.0] {
        let dir = Point::unit(base + sign * half);
        let normal = dir.perp();
        let line = Line {
            normal,
            offset: normal.dot(q_img),
        };
        let Some(circle) = line_to_circle(&inv, &line, scale) else {
            continue;
        };
        let Ok(kind) = contact_kind(&circle, alpha, eps) else {
            continue;
        };
        let Some(touch) = inv.map_point(line.foot(img.center)) else {
            continue;
        };
        if out.iter().any(|c| c.circle.parameter_distance(&circle) <= eps) {
            continue;
        }
        out.push(TwoPointTangent { circle, touch, kind });
    }
    Ok(out)
}
