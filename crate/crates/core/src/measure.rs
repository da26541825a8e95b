//! The invariant density `ρ = 1/√|f₀ f₁|` and masses of arcs of a carrier
//! circle.
//!
//! Masses are computed on the angle parametrization `θ ↦ c + R e(θ)` of the
//! carrier. The angles where the carrier meets the zero set of the density
//! source split the range into panels, each integrated with
//! [`quadrature::endpoint_singular`].

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::conic_bridge::Cyclic;
use crate::error::{Error, Result};
use crate::geometry::{circle_circle_intersection, Circle, Line, Point};
use crate::quadrature::{self, Estimate};
use crate::tangency::{tangent_circles_through_point, TangentCircle};
use crate::Tolerances;

/// Orientation of travel along a circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Ccw,
    Cw,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Ccw => 1.0,
            Direction::Cw => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Ccw => Direction::Cw,
            Direction::Cw => Direction::Ccw,
        }
    }
}

/// Source of a density on the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairDensity {
    /// `1/√|f₀ f₁|` for two base circles.
    Pair { alpha0: Circle, alpha1: Circle },
    /// `1/√|f₀|`, the Jacobi–Bertrand density of one circle.
    Single { alpha0: Circle },
    /// `1/√|F|` for a cyclic.
    Cyclic { cyclic: Cyclic },
}

impl PairDensity {
    pub fn pair(alpha0: Circle, alpha1: Circle) -> Self {
        PairDensity::Pair { alpha0, alpha1 }
    }

    /// The polynomial whose zero set carries the singularities.
    pub fn generator(&self, p: Point) -> f64 {
        match self {
            PairDensity::Pair { alpha0, alpha1 } => alpha0.power(p) * alpha1.power(p),
            PairDensity::Single { alpha0 } => alpha0.power(p),
            PairDensity::Cyclic { cyclic } => cyclic.eval(p),
        }
    }

    /// Density at `p`; `+∞` exactly where the generator vanishes.
    pub fn rho(&self, p: Point) -> f64 {
        let v = match self {
            // two square roots avoid under/overflow of the product
            PairDensity::Pair { alpha0, alpha1 } => alpha0.power(p).abs().sqrt() * alpha1.power(p).abs().sqrt(),
            _ => self.generator(p).abs().sqrt(),
        };
        if v == 0.0 {
            f64::INFINITY
        } else {
            1.0 / v
        }
    }

    pub fn base_pair(&self) -> Option<(Circle, Circle)> {
        match self {
            PairDensity::Pair { alpha0, alpha1 } => Some((*alpha0, *alpha1)),
            _ => None,
        }
    }

    /// Angles in `[0, 2π)` where the density is singular on `delta`, sorted.
    pub fn singular_angles(&self, delta: &Circle, eps: f64) -> Result<Vec<f64>> {
        let mut angles = Vec::new();
        let mut push_circle = |a: &Circle| -> Result<()> {
            match circle_circle_intersection(delta, a, eps) {
                Ok(pts) => {
                    angles.extend(pts.iter().map(|p| delta.angle_of(*p).rem_euclid(TAU)));
                    Ok(())
                }
                Err(Error::CoincidentCircles) => Err(Error::InvalidInput(
                    "carrier circle coincides with a base circle".into(),
                )),
                Err(e) => Err(e),
            }
        };
        match self {
            PairDensity::Pair { alpha0, alpha1 } => {
                push_circle(alpha0)?;
                push_circle(alpha1)?;
            }
            PairDensity::Single { alpha0 } => push_circle(alpha0)?,
            PairDensity::Cyclic { cyclic } => angles = cyclic_roots_on(cyclic, delta),
        }
        angles.sort_by(f64::total_cmp);
        angles.dedup_by(|a, b| (*a - *b).abs() <= 1e-14);
        Ok(angles)
    }
}

const CYCLIC_SCAN: usize = 2048;

// sign changes of F along the carrier, refined by bisection
fn cyclic_roots_on(cyclic: &Cyclic, delta: &Circle) -> Vec<f64> {
    let g = |t: f64| cyclic.eval(delta.point_at(t));
    let step = TAU / CYCLIC_SCAN as f64;
    let mut roots = Vec::new();
    let mut a = 0.0;
    let mut ga = g(a);
    for k in 1..=CYCLIC_SCAN {
        let b = k as f64 * step;
        let gb = g(b);
        if ga == 0.0 {
            roots.push(a);
        } else if ga * gb < 0.0 {
            let (mut lo, mut hi, mut glo) = (a, b, ga);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if !(mid > lo && mid < hi) {
                    break;
                }
                let gm = g(mid);
                if gm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if glo * gm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    glo = gm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        a = b;
        ga = gb;
    }
    roots.into_iter().map(|t| t.rem_euclid(TAU)).collect()
}

/// Mass of an oriented arc together with the total mass of its carrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcMass {
    pub value: f64,
    pub total: f64,
    /// Summed quadrature error estimate of `value`.
    pub error: f64,
}

/// A density restricted to one carrier circle, with its singular angles
/// precomputed and the total mass cached.
#[derive(Debug)]
pub struct CarrierMeasure {
    density: PairDensity,
    delta: Circle,
    singular: Vec<f64>,
    tol: Tolerances,
    total: OnceLock<Result<Estimate>>,
}

impl Clone for CarrierMeasure {
    fn clone(&self) -> Self {
        Self {
            density: self.density,
            delta: self.delta,
            singular: self.singular.clone(),
            tol: self.tol,
            total: OnceLock::new(),
        }
    }
}

impl CarrierMeasure {
    pub fn new(density: PairDensity, delta: Circle, tol: Tolerances) -> Result<Self> {
        let singular = density.singular_angles(&delta, tol.geo)?;
        Ok(Self {
            density,
            delta,
            singular,
            tol,
            total: OnceLock::new(),
        })
    }

    pub fn density(&self) -> &PairDensity {
        &self.density
    }

    pub fn delta(&self) -> &Circle {
        &self.delta
    }

    pub fn singular_angles(&self) -> &[f64] {
        &self.singular
    }

    /// Mass swept from angle `start` through the signed angle `sweep`,
    /// `|sweep| ≤ 2π`.
    pub fn sweep_mass(&self, start: f64, sweep: f64) -> Result<Estimate> {
        let length = sweep.abs();
        if length == 0.0 {
            return Ok(Estimate::default());
        }
        if length > TAU * (1.0 + 1e-15) {
            return Err(Error::InvalidInput(format!("sweep {sweep} exceeds a full turn")));
        }
        let sign = sweep.signum();
        let mut cuts: Vec<f64> = self
            .singular
            .iter()
            .map(|&t| (sign * (t - start)).rem_euclid(TAU))
            .filter(|&s| s > 0.0 && s < length)
            .collect();
        cuts.sort_by(f64::total_cmp);
        let mut nodes = Vec::with_capacity(cuts.len() + 2);
        nodes.push(0.0);
        nodes.extend(cuts);
        nodes.push(length);

        let panels = nodes.len() - 1;
        let per_panel = self.tol.quad / panels as f64;
        let r = self.delta.radius;
        let f = |s: f64| self.density.rho(self.delta.point_at(start + sign * s)) * r;
        let mut total = Estimate::default();
        for w in nodes.windows(2) {
            total = total + quadrature::endpoint_singular(f, w[0], w[1], per_panel)?;
        }
        Ok(total)
    }

    /// Total mass `m(δ)`.
    pub fn total(&self) -> Result<Estimate> {
        self.total
            .get_or_init(|| {
                let start = self.singular.first().copied().unwrap_or(0.0);
                self.sweep_mass(start, TAU)
            })
            .clone()
    }

    fn check_on_carrier(&self, p: Point) -> Result<()> {
        let residual = p.distance(self.delta.center) - self.delta.radius;
        if residual.abs() > self.tol.geo {
            return Err(Error::PointNotOnCircle { residual });
        }
        Ok(())
    }

    /// Signed angle from `from` to `to` travelling in `direction`, in
    /// `[0, 2π)` for ccw and `(-2π, 0]` for cw.
    pub fn sweep_between(&self, from: Point, to: Point, direction: Direction) -> f64 {
        let a = self.delta.angle_of(from);
        let b = self.delta.angle_of(to);
        direction.sign() * (direction.sign() * (b - a)).rem_euclid(TAU)
    }

    /// Angle reached from `start` after sweeping `mass` in `direction`,
    /// found by bisection on the swept angle.
    pub fn angle_at_mass(&self, start: f64, mass: f64, direction: Direction) -> Result<f64> {
        let total = self.total()?.value;
        if !(0.0..=total).contains(&mass) {
            return Err(Error::InvalidInput(format!("mass {mass} outside [0, {total}]")));
        }
        let (mut lo, mut hi) = (0.0, TAU);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if self.sweep_mass(start, direction.sign() * mid)?.value < mass {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 {
                break;
            }
        }
        Ok(start + direction.sign() * 0.5 * (lo + hi))
    }

    /// Mass of the arc from `from` to `to` in the given direction.
    pub fn arc_mass(&self, from: Point, to: Point, direction: Direction) -> Result<ArcMass> {
        self.check_on_carrier(from)?;
        self.check_on_carrier(to)?;
        let total = self.total()?.value;
        if from.distance(to) <= self.tol.geo {
            return Ok(ArcMass {
                value: 0.0,
                total,
                error: 0.0,
            });
        }
        let sweep = self.sweep_between(from, to, direction);
        let est = self.sweep_mass(self.delta.angle_of(from), sweep)?;
        Ok(ArcMass {
            value: est.value,
            total,
            error: est.error,
        })
    }
}

/// Mass of an oriented arc of `delta`.
pub fn arc_mass(
    density: &PairDensity,
    delta: &Circle,
    from: Point,
    to: Point,
    direction: Direction,
    tol: &Tolerances,
) -> Result<ArcMass> {
    CarrierMeasure::new(*density, *delta, *tol)?.arc_mass(from, to, direction)
}

/// Two concentric base circles, the mid circle and the jump length of the
/// zigzag construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZigzagConfig {
    pub alpha0: Circle,
    pub alpha1: Circle,
    pub mid: Circle,
    pub jump: f64,
}

impl ZigzagConfig {
    pub fn new(alpha0: Circle, alpha1: Circle, eps: f64) -> Result<Self> {
        if alpha0.center.distance(alpha1.center) > eps {
            return Err(Error::InvalidInput("zigzag base circles must be concentric".into()));
        }
        if (alpha0.radius - alpha1.radius).abs() <= eps {
            return Err(Error::CoincidentCircles);
        }
        let (r0, r1) = (alpha0.radius, alpha1.radius);
        Ok(Self {
            alpha0,
            alpha1,
            mid: Circle::new(alpha0.center, 0.5 * (r0 + r1))?,
            jump: 0.5 * (r1 - r0).abs(),
        })
    }

    /// `1/(2·area)` of the triangle with sides `|p - c|`, the mid radius and the
    /// jump, by Heron's formula in its cancellation-free ordering.
    ///
    /// `+∞` on the boundary of the annulus (within `eps`), an error outside.
    pub fn black_howland(&self, p: Point, eps: f64) -> Result<f64> {
        let x = p.distance(self.alpha0.center);
        let (lo, hi) = {
            let (a, b) = (self.alpha0.radius, self.alpha1.radius);
            (a.min(b), a.max(b))
        };
        if x < lo - eps || x > hi + eps {
            return Err(Error::DegenerateTriangle);
        }
        let mut s = [x, self.mid.radius, self.jump];
        s.sort_by(|a, b| b.total_cmp(a));
        let [a, b, c] = s;
        let q = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
        if q <= 0.0 || x < lo || x > hi {
            return Ok(f64::INFINITY);
        }
        Ok(2.0 / q.sqrt())
    }

    /// A point `z` on the mid circle with `|p - z|` equal to the jump.
    pub fn witness(&self, p: Point, eps: f64) -> Result<Point> {
        let reach = Circle::new(p, self.jump)?;
        circle_circle_intersection(&self.mid, &reach, eps)?
            .first()
            .copied()
            .ok_or(Error::DegenerateTriangle)
    }

    /// The same quantity as [`Self::black_howland`] from the witness triangle
    /// `(c, z, p)` directly: `1/|(z - c) × (p - c)|`.
    pub fn black_howland_from_witness(&self, p: Point, eps: f64) -> Result<f64> {
        let z = self.witness(p, eps)?;
        let c = self.alpha0.center;
        let doubled = (z - c).cross(p - c).abs();
        Ok(if doubled == 0.0 { f64::INFINITY } else { 1.0 / doubled })
    }
}

/// Spread of the ratio of two functions sampled on a circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioReport {
    pub mean: f64,
    /// `max |r_k - mean| / |mean|` over the used samples.
    pub spread: f64,
    pub used: usize,
    pub skipped: usize,
}

/// Sample `num/den` at `samples` equally spaced points of `circle` (offset by
/// half a step) and report how far it is from constant. Samples where either
/// value is non-finite or the ratio is undefined are skipped.
pub fn ratio_spread<N, D>(circle: &Circle, samples: usize, num: N, den: D) -> RatioReport
where
    N: Fn(Point) -> f64,
    D: Fn(Point) -> f64,
{
    let values: Vec<Option<f64>> = (0..samples)
        .map(|k| {
            let p = circle.point_at((k as f64 + 0.5) * TAU / samples as f64);
            let (a, b) = (num(p), den(p));
            let r = a / b;
            (a.is_finite() && b.is_finite() && b != 0.0 && r.is_finite()).then_some(r)
        })
        .collect();
    spread_of(&values)
}

pub(crate) fn spread_of(values: &[Option<f64>]) -> RatioReport {
    let used: Vec<f64> = values.iter().flatten().copied().collect();
    let skipped = values.len() - used.len();
    if used.is_empty() {
        return RatioReport {
            mean: f64::NAN,
            spread: f64::NAN,
            used: 0,
            skipped,
        };
    }
    let mean = used.iter().sum::<f64>() / used.len() as f64;
    let spread = used.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max) / mean.abs();
    RatioReport {
        mean,
        spread,
        used: used.len(),
        skipped,
    }
}

/// Outcome of checking that `ρ·h` is constant on a tangent circle, `h` being
/// the distance to the line through its two touch points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prop1Report {
    pub mean: f64,
    pub max_relative_deviation: f64,
    pub used: usize,
    pub skipped: usize,
    pub passed: bool,
}

pub const PROP1_THRESHOLD: f64 = 1e-9;

/// Samples where a power's condition number `(|x - c|² + r²) / |f(x)|`
/// exceeds this are skipped; near a touch point both `f` and `h` vanish to
/// second order and rounding dominates.
pub const PROP1_CONDITION: f64 = 1e6;

fn condition(c: &Circle, p: Point) -> f64 {
    let f = c.power(p).abs();
    ((p - c.center).norm_sq() + c.radius * c.radius) / f
}

/// Sample `samples` points of `omega` and check that `ρ·h` is constant.
///
/// Samples closer than `1e-6·r` to a touch point are skipped.
pub fn verify_prop1(omega: &TangentCircle, density: &PairDensity, samples: usize, eps: f64) -> Result<Prop1Report> {
    if samples < 3 {
        return Err(Error::InvalidInput("at least three samples are required".into()));
    }
    let (a0, a1) = density
        .base_pair()
        .ok_or_else(|| Error::InvalidInput("tangent-circle check needs a pair density".into()))?;
    let checked = TangentCircle::from_circle(omega.circle, &a0, &a1, eps)?;
    // work in coordinates centered at ω so that sample points carry no
    // rounding proportional to their distance from the origin
    let o = omega.circle.center;
    let local = |c: &Circle| Circle {
        center: c.center - o,
        radius: c.radius,
    };
    let (l0, l1) = (local(&a0), local(&a1));
    let local_density = PairDensity::pair(l0, l1);
    let (t0, t1) = (checked.touch0 - o, checked.touch1 - o);
    let chord = Line::through(t0, t1)?;
    let r = omega.circle.radius;
    let values: Vec<Option<f64>> = (0..samples)
        .map(|k| {
            let p = Point::unit((k as f64 + 0.5) * TAU / samples as f64) * r;
            if condition(&l0, p).max(condition(&l1, p)) > PROP1_CONDITION {
                return None;
            }
            let v = local_density.rho(p) * chord.distance(p);
            v.is_finite().then_some(v)
        })
        .collect();
    let r = spread_of(&values);
    Ok(Prop1Report {
        mean: r.mean,
        max_relative_deviation: r.spread,
        used: r.used,
        skipped: r.skipped,
        passed: r.used > 0 && r.spread <= PROP1_THRESHOLD,
    })
}

/// Finite-difference check of `w(x)|dx| = w(y)|dy|` for the chord map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub epsilon: f64,
    /// Residual at `epsilon`; `None` when the case was skipped.
    pub residual: Option<f64>,
    /// Residual at `epsilon / 2`.
    pub residual_half: Option<f64>,
    pub skipped: bool,
}

impl InvarianceReport {
    /// `residual / residual_half`, close to 2 for a first-order scheme.
    pub fn halving_ratio(&self) -> Option<f64> {
        Some(self.residual? / self.residual_half?)
    }

    /// Residual below `bound` and either at the rounding floor or shrinking
    /// with the step.
    pub fn passes(&self, bound: f64, floor: f64) -> bool {
        match (self.residual, self.residual_half) {
            (Some(r), Some(h)) => r <= bound && (r <= floor || (h < r && r / h > 1.5 && r / h < 2.5)),
            _ => false,
        }
    }
}

fn invariance_residual<W: Fn(Point) -> f64>(
    a0: &Circle,
    a1: &Circle,
    delta: &Circle,
    omega: &TangentCircle,
    x: Point,
    y: Point,
    epsilon: f64,
    weight: &W,
    eps: f64,
) -> Result<f64> {
    let tx = delta.angle_of(x);
    let x2 = delta.point_at(tx + epsilon / delta.radius);
    let nearest = tangent_circles_through_point(a0, a1, x2, omega.index, eps)?
        .into_iter()
        .min_by(|a, b| {
            a.circle
                .parameter_distance(&omega.circle)
                .total_cmp(&b.circle.parameter_distance(&omega.circle))
        })
        .ok_or(Error::NoRealSolution)?;
    let y2 = circle_circle_intersection(delta, &nearest.circle, eps)?
        .into_iter()
        .min_by(|a, b| a.distance(y).total_cmp(&b.distance(y)))
        .ok_or(Error::SeriesBlocked(crate::BlockReason::NoSecondIntersection))?;
    let dtheta = (delta.angle_of(y2) - delta.angle_of(y) + PI).rem_euclid(TAU) - PI;
    let dx = epsilon.abs();
    let dy = (dtheta * delta.radius).abs();
    let wx = weight(x) * dx;
    Ok((wx - weight(y) * dy).abs() / wx)
}

/// Perturb `x = ω ∩ δ` by an arc length `epsilon`, rebuild the tangent circle
/// of the same index through the displaced point and compare `w|dx|` with
/// `w|dy|` at the other intersection point.
pub fn verify_invariance_weighted<W: Fn(Point) -> f64>(
    alpha0: &Circle,
    alpha1: &Circle,
    delta: &Circle,
    omega: &TangentCircle,
    epsilon: f64,
    weight: W,
    eps: f64,
) -> Result<InvarianceReport> {
    let pts = circle_circle_intersection(delta, &omega.circle, eps)?;
    if pts.len() < 2 {
        return Ok(InvarianceReport {
            epsilon,
            residual: None,
            residual_half: None,
            skipped: true,
        });
    }
    let (x, y) = (pts[0], pts[1]);
    let r1 = invariance_residual(alpha0, alpha1, delta, omega, x, y, epsilon, &weight, eps)?;
    let r2 = invariance_residual(alpha0, alpha1, delta, omega, x, y, 0.5 * epsilon, &weight, eps)?;
    Ok(InvarianceReport {
        epsilon,
        residual: Some(r1),
        residual_half: Some(r2),
        skipped: false,
    })
}

/// [`verify_invariance_weighted`] with the density itself as weight.
pub fn verify_invariance(
    density: &PairDensity,
    delta: &Circle,
    omega: &TangentCircle,
    epsilon: f64,
    eps: f64,
) -> Result<InvarianceReport> {
    let (a0, a1) = density
        .base_pair()
        .ok_or_else(|| Error::InvalidInput("invariance check needs a pair density".into()))?;
    verify_invariance_weighted(&a0, &a1, delta, omega, epsilon, |p| density.rho(p), eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitRow {
    pub r1: f64,
    pub deviation: f64,
}

/// Deviation of `r₁ ρ` from the single-circle density as the outer circle grows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitReport {
    pub rows: Vec<LimitRow>,
    pub decreasing: bool,
    /// Least-squares slope of `log deviation` against `log r₁`.
    pub log_slope: f64,
}

/// For each `r₁`, `max_x∈δ |r₁ ρ(x) - 1/√|f₀(x)||` with `α₁ = Circle(center1, r₁)`.
pub fn jacobi_bertrand_limit_check(
    alpha0: &Circle,
    delta: &Circle,
    center1: Point,
    r1_sequence: &[f64],
    samples: usize,
) -> Result<LimitReport> {
    if r1_sequence.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("outer radii must increase".into()));
    }
    let single = PairDensity::Single { alpha0: *alpha0 };
    let mut rows = Vec::with_capacity(r1_sequence.len());
    for &r1 in r1_sequence {
        let pair = PairDensity::pair(*alpha0, Circle::new(center1, r1)?);
        let deviation = (0..samples)
            .map(|k| delta.point_at((k as f64 + 0.5) * TAU / samples as f64))
            .map(|p| (r1 * pair.rho(p) - single.rho(p)).abs())
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max);
        rows.push(LimitRow { r1, deviation });
    }
    let decreasing = rows.windows(2).all(|w| w[1].deviation < w[0].deviation);
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.deviation > 0.0)
        .map(|r| (r.r1.ln(), r.deviation.ln()))
        .collect();
    let log_slope = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    } else {
        f64::NAN
    };
    Ok(LimitReport {
        rows,
        decreasing,
        log_slope,
    })
}
