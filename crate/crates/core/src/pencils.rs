//! Pencils of circles and Emch series over sequences of pairs taken from two
//! pencils through the carrier circle.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{BlockReason, Error, Result};
use crate::geometry::{Circle, Line, Point, Quadric};
use crate::measure::{spread_of, CarrierMeasure, Direction, PairDensity};
use crate::series::{make_step, CircularSeries, ClosureReport, Scene, Step};
use crate::tangency::{
    circles_through_two_points, contact_kind, tangent_circles_through_point, ContactKind, TangencyIndex, TangentCircle,
};
use crate::Tolerances;

/// The family `(1 - t) a + t b`, `t ∈ ℝ ∪ {∞}`; `t = ∞` gives `b - a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pencil {
    pub a: Quadric,
    pub b: Quadric,
}

impl Pencil {
    pub fn new(a: Quadric, b: Quadric) -> Result<Self> {
        if a.is_zero() || b.is_zero() || a.distance_up_to_scale(&b) <= 1e-15 {
            return Err(Error::InvalidInput(
                "pencil generators must be distinct and nonzero".into(),
            ));
        }
        Ok(Self { a, b })
    }

    pub fn of_circles(a: &Circle, b: &Circle) -> Result<Self> {
        Self::new(a.to_quadric(), b.to_quadric())
    }

    pub fn quadric(&self, t: f64) -> Quadric {
        if t.is_infinite() {
            self.b.sub_scaled(1.0, &self.a)
        } else {
            self.a.scale(1.0 - t).add(&self.b.scale(t))
        }
    }
}

/// Classified locus of a pencil member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PencilMember {
    Circle { circle: Circle },
    PointCircle { point: Point },
    Line { line: Line },
    Conic { quadric: Quadric },
}

/// Normalized locus of the member at `t`.
pub fn pencil_member(pencil: &Pencil, t: f64, eps: f64) -> Result<PencilMember> {
    classify_quadric(&pencil.quadric(t), eps)
}

/// Circle, point circle or line when `q` is of circle type, else the conic itself.
pub fn classify_quadric(q: &Quadric, eps: f64) -> Result<PencilMember> {
    let q = *q;
    let scale = q.coefficient_norm();
    if scale == 0.0 {
        return Err(Error::InvalidInput("pencil member vanishes identically".into()));
    }
    let quad = q.a11.abs().max(q.a22.abs()).max(q.a12.abs());
    if quad <= 1e-14 * scale {
        let line = Line::new(Point::new(q.b1, q.b2), -q.c)
            .map_err(|_| Error::InvalidInput("pencil member is a nonzero constant".into()))?;
        return Ok(PencilMember::Line { line });
    }
    if !q.is_circle_type(1e-12) {
        return Ok(PencilMember::Conic { quadric: q });
    }
    let k = 0.5 * (q.a11 + q.a22);
    let center = Point::new(q.b1, q.b2) * (-0.5 / k);
    let r2 = center.norm_sq() - q.c / k;
    let tol = eps * (1.0 + center.norm_sq());
    if r2.abs() <= tol {
        Ok(PencilMember::PointCircle { point: center })
    } else if r2 < 0.0 {
        Err(Error::ImaginaryMember { squared_radius: r2 })
    } else {
        Ok(PencilMember::Circle {
            circle: Circle::new(center, r2.sqrt())?,
        })
    }
}

// center and squared radius of (1 - t) f_a + t f_b for circles a, b
fn circle_member(a: &Circle, b: &Circle, t: f64) -> (Point, f64) {
    let center = a.center * (1.0 - t) + b.center * t;
    let constant = (1.0 - t) * a.constant_term() + t * b.constant_term();
    (center, center.norm_sq() - constant)
}

/// Pencil parameter of `c` in `{a, b}`, fitted by least squares; errors if
/// `c` is not a member within `eps`.
pub fn member_parameter(a: &Circle, b: &Circle, c: &Circle, eps: f64) -> Result<f64> {
    let u = [
        b.center.x - a.center.x,
        b.center.y - a.center.y,
        b.constant_term() - a.constant_term(),
    ];
    let v = [
        c.center.x - a.center.x,
        c.center.y - a.center.y,
        c.constant_term() - a.constant_term(),
    ];
    let uu: f64 = u.iter().map(|x| x * x).sum();
    if uu == 0.0 {
        return Err(Error::CoincidentCircles);
    }
    let t = u.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>() / uu;
    let (center, r2) = circle_member(a, b, t);
    if center.distance(c.center) > eps || (r2.max(0.0).sqrt() - c.radius).abs() > eps {
        return Err(Error::InvalidInput("circle is not a member of the pencil".into()));
    }
    Ok(t)
}

/// Pairs `(α₀⁽ᵏ⁾, α₁⁽ᵏ⁾)` drawn from the pencils `{δ, α₀⁽¹⁾}` and `{δ, α₁⁽¹⁾}`.
///
/// The member at parameter `t` has power `(1 - t) f_δ + t f_i⁽¹⁾`, so the
/// first pair corresponds to `t = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSequence {
    pub delta: Circle,
    pub alpha0: Circle,
    pub alpha1: Circle,
    pub t0: Vec<f64>,
    pub t1: Vec<f64>,
}

impl PairSequence {
    pub fn new(delta: Circle, alpha0: Circle, alpha1: Circle, t0: Vec<f64>, t1: Vec<f64>) -> Result<Self> {
        if t0.len() != t1.len() || t0.is_empty() {
            return Err(Error::InvalidInput(
                "parameter lists must be nonempty and of equal length".into(),
            ));
        }
        Ok(Self {
            delta,
            alpha0,
            alpha1,
            t0,
            t1,
        })
    }

    /// Fit parameters for explicit pairs; the first pair generates the pencils.
    pub fn from_pairs(delta: Circle, pairs: &[(Circle, Circle)], eps: f64) -> Result<Self> {
        let (a0, a1) = *pairs
            .first()
            .ok_or_else(|| Error::InvalidInput("at least one pair is required".into()))?;
        let mut t0 = Vec::with_capacity(pairs.len());
        let mut t1 = Vec::with_capacity(pairs.len());
        for (c0, c1) in pairs {
            t0.push(member_parameter(&delta, &a0, c0, eps)?);
            t1.push(member_parameter(&delta, &a1, c1, eps)?);
        }
        Self::new(delta, a0, a1, t0, t1)
    }

    pub fn len(&self) -> usize {
        self.t0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t0.is_empty()
    }

    fn member(&self, first: &Circle, t: f64) -> Result<Circle> {
        if t == 0.0 {
            return Err(Error::DegeneratePair);
        }
        let (center, r2) = circle_member(&self.delta, first, t);
        if !(r2 > 0.0) {
            return Err(Error::ImaginaryMember { squared_radius: r2 });
        }
        Circle::new(center, r2.sqrt())
    }

    /// The `k`-th pair (0-based).
    pub fn pair(&self, k: usize) -> Result<(Circle, Circle)> {
        Ok((
            self.member(&self.alpha0, self.t0[k])?,
            self.member(&self.alpha1, self.t1[k])?,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prop3Row {
    pub k: usize,
    /// `t₀,ₖ t₁,ₖ`
    pub expected_ratio: f64,
    /// Mean of `f₀⁽ᵏ⁾ f₁⁽ᵏ⁾ / (f₀⁽¹⁾ f₁⁽¹⁾)` over the samples.
    pub measured_ratio: f64,
    /// Relative spread of `ρ_k / ρ_1` on the carrier.
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop3Report {
    pub rows: Vec<Prop3Row>,
    pub max_spread: f64,
    /// `max_k |measured - expected| / |expected|`.
    pub max_identity_error: f64,
}

/// Check that every pair of the sequence induces a density on the carrier
/// proportional to the first one, with the predicted constant.
pub fn verify_prop3(pairs: &PairSequence, samples: usize) -> Result<Prop3Report> {
    let base = PairDensity::pair(pairs.alpha0, pairs.alpha1);
    let delta = pairs.delta;
    let mut rows = Vec::with_capacity(pairs.len());
    for k in 0..pairs.len() {
        let (c0, c1) = pairs.pair(k)?;
        let dk = PairDensity::pair(c0, c1);
        let ratio = |p: Point| dk.rho(p) / base.rho(p);
        let values: Vec<Option<f64>> = (0..samples)
            .map(|j| {
                let p = delta.point_at((j as f64 + 0.5) * TAU / samples as f64);
                let r = ratio(p);
                r.is_finite().then_some(r)
            })
            .collect();
        let spread = spread_of(&values).spread;
        let products: Vec<Option<f64>> = (0..samples)
            .map(|j| {
                let p = delta.point_at((j as f64 + 0.5) * TAU / samples as f64);
                let r = dk.generator(p) / base.generator(p);
                r.is_finite().then_some(r)
            })
            .collect();
        let measured_ratio = spread_of(&products).mean;
        rows.push(Prop3Row {
            k,
            expected_ratio: pairs.t0[k] * pairs.t1[k],
            measured_ratio,
            spread,
        });
    }
    let max_spread = rows.iter().map(|r| r.spread).fold(0.0, f64::max);
    let max_identity_error = rows
        .iter()
        .map(|r| (r.measured_ratio - r.expected_ratio).abs() / r.expected_ratio.abs())
        .fold(0.0, f64::max);
    Ok(Prop3Report {
        rows,
        max_spread,
        max_identity_error,
    })
}

// the circle through x touching the pair whose cut arc leaves x in `direction`
fn directed_step(
    measure: &CarrierMeasure,
    pair: (Circle, Circle),
    index: TangencyIndex,
    x: Point,
    direction: Direction,
    tol: &Tolerances,
) -> Result<Step> {
    let delta = *measure.delta();
    let found = tangent_circles_through_point(&pair.0, &pair.1, x, index, tol.geo).map_err(|e| match e {
        Error::NoRealSolution => Error::SeriesBlocked(BlockReason::MissingCandidate),
        Error::PointOnBaseCircle => Error::SeriesBlocked(BlockReason::PointOnBaseCircle),
        other => other,
    })?;
    let mut chosen = None;
    for c in found {
        let Ok(pts) = crate::geometry::circle_circle_intersection(&delta, &c.circle, tol.geo) else {
            continue;
        };
        let Some(y) = pts.into_iter().max_by(|a, b| a.distance(x).total_cmp(&b.distance(x))) else {
            continue;
        };
        if y.distance(x) <= tol.geo {
            continue;
        }
        let step = make_step(measure, c, x, y)?;
        if f64::from(step.orientation) == direction.sign() {
            if chosen.is_some() {
                return Err(Error::SeriesBlocked(BlockReason::EnvelopeBoundary));
            }
            chosen = Some(step);
        }
    }
    chosen.ok_or(Error::SeriesBlocked(BlockReason::MissingCandidate))
}

fn nested_pair(delta: &Circle, pair: &(Circle, Circle), eps: f64) -> bool {
    pair.0.inside(delta, -eps) && delta.inside(&pair.1, -eps)
}

/// Build the series whose `j`-th circle touches pair `order[j]`, and check
/// whether the circle after the last pair returns to `omega1`.
///
/// Arc masses are measured with the density of the first pair of the
/// sequence, to which all other densities are proportional on the carrier.
pub fn run_generalized_series(
    pairs: &PairSequence,
    omega1: &TangentCircle,
    order: &[usize],
    direction: Direction,
    tol: Tolerances,
) -> Result<(Vec<Step>, ClosureReport)> {
    let n = pairs.len();
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&k| k >= n || std::mem::replace(&mut seen[k], true)) {
        return Err(Error::InvalidInput("order must be a permutation of the pairs".into()));
    }
    let all: Vec<(Circle, Circle)> = (0..n).map(|k| pairs.pair(k)).collect::<Result<_>>()?;
    if all.iter().any(|p| !nested_pair(&pairs.delta, p, tol.geo)) {
        return Err(Error::NotNested);
    }
    let first = all[order[0]];
    let scene = Scene::new(first.0, first.1, pairs.delta, TangencyIndex::One, tol)?;
    let start = CircularSeries::start(scene, *omega1, direction)?;
    let measure = CarrierMeasure::new(PairDensity::pair(pairs.alpha0, pairs.alpha1), pairs.delta, tol)?;
    let s0 = start.steps[0];
    let mut steps = vec![make_step(&measure, s0.omega, s0.x, s0.x_next)?];
    let total_mass = measure.total()?.value;

    let mut blocked = None;
    let mut closing = None;
    for j in 1..=n {
        let x = steps.last().expect("nonempty").x_next;
        match directed_step(&measure, all[order[j % n]], TangencyIndex::One, x, direction, &tol) {
            Ok(step) if j < n => steps.push(step),
            Ok(step) => closing = Some(step),
            Err(Error::SeriesBlocked(r)) => {
                blocked = Some(r);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let residual = closing.map_or(f64::INFINITY, |c| {
        c.omega
            .circle
            .parameter_distance(&steps[0].omega.circle)
            .max(c.x.distance(steps[0].x))
    });
    let closed = residual <= tol.close;
    let signed_mass_sum: f64 = steps.iter().map(Step::signed_mass).sum();
    let winding = closed.then(|| (signed_mass_sum / total_mass).round() as i64);
    let report = ClosureReport {
        closed,
        n: closed.then_some(n),
        winding,
        residual,
        steps: steps.len(),
        blocked,
        total_mass,
        step_mass: Some(steps[0].mass),
        signed_mass_sum,
        quantization_residual: winding.map(|w| (signed_mass_sum - w as f64 * total_mass).abs()),
    };
    Ok((steps, report))
}

/// How a circle touches a pencil member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemberContact {
    Exterior,
    /// The circle lies inside the member.
    CircleInside,
    /// The member lies inside the circle.
    MemberInside,
}

const MEMBER_SCAN: usize = 4001;

/// Parameters `t` of the members of `{a, b}` touching `gamma` with the given
/// contact, found by scanning `t = tan s` and bisecting each sign change to
/// `1e-12` relative.
pub fn tangent_member_parameters(a: &Circle, b: &Circle, gamma: &Circle, contact: MemberContact) -> Vec<f64> {
    let residual = |t: f64| -> Option<f64> {
        let (center, r2) = circle_member(a, b, t);
        if !(r2 > 0.0) {
            return None;
        }
        let (d, rm) = (center.distance(gamma.center), r2.sqrt());
        Some(match contact {
            MemberContact::Exterior => d - gamma.radius - rm,
            MemberContact::CircleInside => d + gamma.radius - rm,
            MemberContact::MemberInside => d + rm - gamma.radius,
        })
    };
    let s_of = |k: usize| -FRAC_PI_2 + (k as f64) * std::f64::consts::PI / (MEMBER_SCAN as f64 + 1.0);
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for k in 1..=MEMBER_SCAN {
        let s = s_of(k);
        let cur = residual(s.tan()).map(|v| (s, v));
        if let (Some((s0, v0)), Some((s1, v1))) = (prev, cur) {
            if v0 == 0.0 {
                roots.push(s0.tan());
            } else if v0 * v1 < 0.0 {
                let (mut lo, mut hi, mut vlo) = (s0, s1, v0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let (tl, th) = (lo.tan(), hi.tan());
                    if (th - tl).abs() <= 1e-12 * tl.abs().max(1.0) || !(mid > lo && mid < hi) {
                        break;
                    }
                    match residual(mid.tan()) {
                        Some(0.0) => {
                            lo = mid;
                            hi = mid;
                            break;
                        }
                        Some(vm) if (vm < 0.0) == (vlo < 0.0) => {
                            lo = mid;
                            vlo = vm;
                        }
                        Some(_) => hi = mid,
                        None => break,
                    }
                }
                roots.push((0.5 * (lo + hi)).tan());
            }
        }
        prev = cur;
    }
    roots
}

/// The member of `{δ, α₁}` touched by a family of circles through chord
/// endpoints on `δ`, each touching `α₀`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedMemberReport {
    /// Index of each circle with respect to `(α₀, member)`.
    pub index: TangencyIndex,
    pub contact0: ContactKind,
    pub member_contact: MemberContact,
    pub circles: Vec<Circle>,
    /// Fitted pencil parameter per circle.
    pub parameters: Vec<f64>,
    pub parameter: f64,
    /// `max_k |t_k - mean| / max(1, |mean|)`.
    pub spread: f64,
    pub member: PencilMember,
}

// member contact whose interior count with `kind0` has the parity of `index`
fn contact_for(kind0: ContactKind, index: TangencyIndex, inside: bool) -> MemberContact {
    let interior0 = kind0 == ContactKind::Interior;
    let interior_member = interior0 != (index == TangencyIndex::One);
    match (interior_member, inside) {
        (false, _) => MemberContact::Exterior,
        (true, true) => MemberContact::CircleInside,
        (true, false) => MemberContact::MemberInside,
    }
}

// circles through each chord touching α₀ with one contact kind, containing
// the arc from x to y in `direction`, or the complementary arc
fn chord_circles(
    scene: &Scene,
    chords: &[(Point, Point)],
    direction: Direction,
    prefer: ContactKind,
    complement: bool,
) -> Result<(Vec<Circle>, ContactKind)> {
    let delta = scene.delta;
    let sign = direction.sign();
    let mut circles = Vec::with_capacity(chords.len());
    let mut kind0 = None;
    for &(x, y) in chords {
        let sweep = sign * (sign * (delta.angle_of(y) - delta.angle_of(x))).rem_euclid(TAU);
        let mid = delta.point_at(delta.angle_of(x) + 0.5 * sweep);
        let gamma = circles_through_two_points(x, y, &scene.alpha0, scene.tolerances.geo)?
            .into_iter()
            .filter(|c| (c.circle.power(mid) < 0.0) != complement)
            .min_by_key(|c| c.kind != prefer)
            .ok_or(Error::NoTangentMember)?;
        if *kind0.get_or_insert(gamma.kind) != gamma.kind {
            return Err(Error::NoTangentMember);
        }
        circles.push(gamma.circle);
    }
    Ok((circles, kind0.expect("nonempty chords")))
}

/// For each chord `(x, y)` of `δ`, the circle through `x` and `y` touching
/// `α₀` and containing the arc from `x` to `y` in `direction`, and the member
/// of `{δ, α₁}` it touches. When some chord has no such circle, every circle
/// contains the complementary arc instead.
///
/// A circle touching `α₀` with contact `prefer` is chosen when two qualify.
/// `inside` selects whether interior member contacts put the circle inside
/// the member. Without an explicit `index` both indices are tried, `Zero`
/// after `One`.
pub fn chord_fixed_member(
    scene: &Scene,
    chords: &[(Point, Point)],
    direction: Direction,
    prefer: ContactKind,
    inside: bool,
    index: Option<TangencyIndex>,
) -> Result<FixedMemberReport> {
    if !scene.is_nested() {
        return Err(Error::NotNested);
    }
    if chords.is_empty() {
        return Err(Error::InvalidInput("at least one chord is required".into()));
    }
    let eps = scene.tolerances.geo;
    let delta = scene.delta;
    let (circles, kind0) = match chord_circles(scene, chords, direction, prefer, false) {
        Ok(found) => found,
        Err(_) => chord_circles(scene, chords, direction, prefer, true)?,
    };

    let candidates = match index {
        Some(i) => vec![i],
        None => vec![TangencyIndex::One, TangencyIndex::Zero],
    };
    let pencil = Pencil::of_circles(&delta, &scene.alpha1)?;
    let mut last = Error::NoTangentMember;
    for idx in candidates {
        let contact = contact_for(kind0, idx, inside);
        let Some(parameters) = fit_members(&delta, &scene.alpha1, &circles, contact) else {
            continue;
        };
        let mean = parameters.iter().sum::<f64>() / parameters.len() as f64;
        let spread = parameters.iter().map(|t| (t - mean).abs()).fold(0.0, f64::max) / mean.abs().max(1.0);
        let member = match pencil_member(&pencil, mean, eps) {
            Ok(m) => m,
            Err(e) => {
                last = e;
                continue;
            }
        };
        return Ok(FixedMemberReport {
            index: idx,
            contact0: kind0,
            member_contact: contact,
            circles,
            parameters,
            parameter: mean,
            spread,
            member,
        });
    }
    Err(last)
}

/// Diagonals of order `r`: circles through `x_k` and `x_{k+r}` touching
/// `α₀` and containing the arc covered by the series circles between them.
/// All of them touch one member of `{δ, α₁}`.
pub fn diagonal_fixed_circle(
    series: &CircularSeries,
    r: usize,
    index: Option<TangencyIndex>,
) -> Result<FixedMemberReport> {
    let scene = &series.scene;
    let points = series.points();
    if r == 0 || points.len() < r + 2 {
        return Err(Error::InvalidInput(format!(
            "diagonals of order {r} need at least {} series points",
            r + 2
        )));
    }
    let eps = scene.tolerances.geo;
    let omega1 = series.steps[0].omega.circle;
    let prefer = contact_kind(&omega1, &scene.alpha0, eps)?;
    let inside = omega1.inside(&scene.alpha1, eps);
    let direction = if series.steps[0].orientation > 0 {
        Direction::Ccw
    } else {
        Direction::Cw
    };
    let chords: Vec<_> = (0..points.len() - r).map(|k| (points[k], points[k + r])).collect();
    chord_fixed_member(scene, &chords, direction, prefer, inside, index)
}

/// Circles through `x_k` and `x_k'` of two series with the same direction.
pub fn parallel_fixed_circle(
    a: &CircularSeries,
    b: &CircularSeries,
    index: Option<TangencyIndex>,
) -> Result<FixedMemberReport> {
    let scene = &a.scene;
    let eps = scene.tolerances.geo;
    let omega1 = a.steps[0].omega.circle;
    let prefer = contact_kind(&omega1, &scene.alpha0, eps)?;
    let inside = omega1.inside(&scene.alpha1, eps);
    let direction = if a.steps[0].orientation > 0 {
        Direction::Ccw
    } else {
        Direction::Cw
    };
    let chords: Vec<_> = a.points().into_iter().zip(b.points()).collect();
    chord_fixed_member(scene, &chords, direction, prefer, inside, index)
}

// root nearest t = 1 for the first circle, then nearest the previous root
fn fit_members(delta: &Circle, alpha1: &Circle, circles: &[Circle], contact: MemberContact) -> Option<Vec<f64>> {
    let mut prev = 1.0;
    circles
        .iter()
        .map(|gamma| {
            let t = tangent_member_parameters(delta, alpha1, gamma, contact)
                .into_iter()
                .min_by(|a, b| (a - prev).abs().total_cmp(&(b - prev).abs()))?;
            prev = t;
            Some(t)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::run_series;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn circle(x: f64, y: f64, r: f64) -> Circle {
        Circle::new(Point::new(x, y), r).unwrap()
    }

    #[test]
    fn member_examples() {
        let p = Pencil::of_circles(&circle(0.0, 0.0, 1.0), &circle(0.0, 0.0, 3.0)).unwrap();
        match pencil_member(&p, 0.5, 1e-9).unwrap() {
            PencilMember::Circle { circle } => assert_relative_eq!(circle.radius, 5f64.sqrt(), epsilon = 1e-15),
            m => panic!("{m:?}"),
        }
        match pencil_member(&p, 0.0, 1e-9).unwrap() {
            PencilMember::Circle { circle } => assert_relative_eq!(circle.radius, 1.0),
            m => panic!("{m:?}"),
        }
        match pencil_member(&p, 1.0, 1e-9).unwrap() {
            PencilMember::Circle { circle } => assert_relative_eq!(circle.radius, 3.0),
            m => panic!("{m:?}"),
        }
        assert!(matches!(
            pencil_member(&p, -1.0, 1e-9),
            Err(Error::ImaginaryMember { .. })
        ));
        assert!(matches!(
            pencil_member(&p, -0.125, 1e-9),
            Ok(PencilMember::PointCircle { .. })
        ));

        let q = Pencil::of_circles(&circle(-1.0, 0.0, 1.0), &circle(1.0, 0.0, 1.0)).unwrap();
        match pencil_member(&q, f64::INFINITY, 1e-9).unwrap() {
            PencilMember::Line { line } => {
                assert_relative_eq!(line.normal.x.abs(), 1.0);
                assert_relative_eq!(line.offset, 0.0);
            }
            m => panic!("{m:?}"),
        }
    }

    #[test]
    fn member_parameter_round_trip() {
        let (a, b) = (circle(0.3, -0.2, 2.0), circle(0.1, 0.4, 0.5));
        let (c, r2) = circle_member(&a, &b, 0.7);
        let m = Circle::new(c, r2.sqrt()).unwrap();
        assert_relative_eq!(member_parameter(&a, &b, &m, 1e-9).unwrap(), 0.7, epsilon = 1e-12);
    }

    #[test]
    fn prop3_identity_and_degenerate_pair() {
        let delta = circle(0.2, 0.1, 2.0);
        let seq = PairSequence::new(
            delta,
            circle(0.0, 0.0, 0.7),
            circle(0.5, -0.3, 3.5),
            vec![1.0, 0.6, 1.1],
            vec![1.0, 1.3, 0.8],
        )
        .unwrap();
        let r = verify_prop3(&seq, 100).unwrap();
        assert!(r.max_spread <= 1e-10, "{r:?}");
        assert!(r.max_identity_error <= 1e-10, "{r:?}");

        let bad = PairSequence::new(
            delta,
            circle(0.0, 0.0, 0.7),
            circle(0.5, -0.3, 3.5),
            vec![0.0],
            vec![1.0],
        )
        .unwrap();
        assert!(matches!(verify_prop3(&bad, 10), Err(Error::DegeneratePair)));
    }

    fn concentric_pair(big_r: f64, psi: f64, r0: f64) -> (Circle, Circle) {
        let c = psi.cos() * big_r;
        let r1 = (big_r * big_r - c * r0) / (c - r0);
        (circle(0.0, 0.0, r0), circle(0.0, 0.0, r1))
    }

    #[test]
    fn generalized_series_closes_for_every_order() {
        let delta = circle(0.0, 0.0, 2.0);
        let pairs = [
            concentric_pair(2.0, PI / 4.0, 1.0),
            concentric_pair(2.0, PI / 3.0, 0.5),
            concentric_pair(2.0, 5.0 * PI / 12.0, 0.3),
        ];
        let seq = PairSequence::from_pairs(delta, &pairs, 1e-9).unwrap();
        let tol = Tolerances::default();
        for order in [[0, 1, 2], [2, 1, 0], [1, 0, 2]] {
            let first = pairs[order[0]];
            let omega =
                tangent_circles_through_point(&first.0, &first.1, delta.point_at(0.4), TangencyIndex::One, 1e-9)
                    .unwrap()[0];
            let (_, rep) = run_generalized_series(&seq, &omega, &order, Direction::Ccw, tol).unwrap();
            assert!(rep.closed, "{order:?} {rep:?}");
            assert_eq!(rep.winding, Some(1));
        }
    }

    #[test]
    fn diagonal_members_of_closing_scene() {
        let scene = Scene::new(
            circle(0.0, 0.0, 1.0),
            circle(0.0, 0.0, 3.0),
            circle(0.0, 0.0, 3f64.sqrt()),
            TangencyIndex::One,
            Tolerances::default(),
        )
        .unwrap();
        let omega = TangentCircle::from_circle(circle(2.0, 0.0, 1.0), &scene.alpha0, &scene.alpha1, 1e-9).unwrap();
        let (mut series, _) = run_series(scene, omega, Direction::Ccw, 6).unwrap();
        series.extend(6).unwrap();

        let d1 = diagonal_fixed_circle(&series, 1, None).unwrap();
        assert_relative_eq!(d1.parameter, 1.0, epsilon = 1e-10);

        let d2 = diagonal_fixed_circle(&series, 2, None).unwrap();
        assert!(d2.spread <= 1e-8, "{d2:?}");
        let PencilMember::Circle { circle: m } = d2.member else {
            panic!("{:?}", d2.member)
        };
        // the diagonal lies inside the concentric member and touches it
        let g = d2.circles[0];
        assert_relative_eq!(m.radius, g.center.norm() + g.radius, epsilon = 1e-9);

        let d3 = diagonal_fixed_circle(&series, 3, None).unwrap();
        assert!(d3.spread <= 1e-8, "{d3:?}");
        assert_relative_eq!(d3.parameter, 1.0, epsilon = 1e-9);
    }
}
