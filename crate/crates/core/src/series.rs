//! Emch circular series: construction, closure detection, rotation numbers
//! and the orientation-signed invariant.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{BlockReason, Error, Result};
use crate::geometry::{circle_circle_intersection, orientation, Circle, Curve, Inversion, Point};
use crate::measure::{spread_of, CarrierMeasure, Direction, PairDensity};
use crate::tangency::{
    classify_index, contact_kind, tangent_circles_through_point, ContactKind, TangencyIndex, TangentCircle,
};
use crate::Tolerances;

/// Base pair, carrier circle, tangency index and tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub alpha0: Circle,
    pub alpha1: Circle,
    pub delta: Circle,
    pub index: TangencyIndex,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl Scene {
    pub fn new(
        alpha0: Circle,
        alpha1: Circle,
        delta: Circle,
        index: TangencyIndex,
        tolerances: Tolerances,
    ) -> Result<Self> {
        tolerances.validate()?;
        if alpha0.parameter_distance(&alpha1) <= tolerances.geo {
            return Err(Error::CoincidentCircles);
        }
        if delta.parameter_distance(&alpha0) <= tolerances.geo || delta.parameter_distance(&alpha1) <= tolerances.geo {
            return Err(Error::InvalidInput(
                "carrier circle coincides with a base circle".into(),
            ));
        }
        Ok(Self {
            alpha0,
            alpha1,
            delta,
            index,
            tolerances,
        })
    }

    pub fn density(&self) -> PairDensity {
        PairDensity::pair(self.alpha0, self.alpha1)
    }

    pub fn measure(&self) -> Result<CarrierMeasure> {
        CarrierMeasure::new(self.density(), self.delta, self.tolerances)
    }

    /// Inner base circle strictly inside the carrier, carrier strictly inside
    /// the outer base circle, and index 1.
    pub fn is_nested(&self) -> bool {
        let eps = self.tolerances.geo;
        self.index == TangencyIndex::One
            && self.alpha0.inside(&self.delta, -eps)
            && self.delta.inside(&self.alpha1, -eps)
    }

    /// Circles of the scene's family through the point of the carrier at angle `theta`.
    pub fn circles_at(&self, theta: f64) -> Result<Vec<TangentCircle>> {
        tangent_circles_through_point(
            &self.alpha0,
            &self.alpha1,
            self.delta.point_at(theta),
            self.index,
            self.tolerances.geo,
        )
    }

    /// A start circle cutting the carrier twice, searched from angle `theta` on.
    pub fn start_circle_near(&self, theta: f64) -> Result<TangentCircle> {
        const TRIES: usize = 256;
        for k in 0..TRIES {
            let t = theta + k as f64 * TAU / TRIES as f64;
            let Ok(found) = self.circles_at(t) else { continue };
            for c in found {
                if !c.boundary && self.chord_points(&c.circle).is_ok() {
                    return Ok(c);
                }
            }
        }
        Err(Error::NoRealSolution)
    }

    pub(crate) fn chord_points(&self, omega: &Circle) -> std::result::Result<(Point, Point), BlockReason> {
        match circle_circle_intersection(&self.delta, omega, self.tolerances.geo) {
            Ok(p) if p.len() == 2 && p[0].distance(p[1]) > self.tolerances.geo => Ok((p[0], p[1])),
            _ => Err(BlockReason::NoSecondIntersection),
        }
    }
}

/// One circle of the series with the arc of the carrier it cuts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Step {
    pub omega: TangentCircle,
    /// `x_k`
    pub x: Point,
    /// `x_{k+1}`
    pub x_next: Point,
    /// Mass of the arc of the carrier inside `omega`, from `x` to `x_next`.
    pub mass: f64,
    pub mass_error: f64,
    /// `+1` if that arc runs counterclockwise from `x` to `x_next`.
    pub orientation: i8,
}

impl Step {
    pub fn signed_mass(&self) -> f64 {
        f64::from(self.orientation) * self.mass
    }
}

/// A circular series and its carrier measure.
#[derive(Debug, Clone, Serialize)]
pub struct CircularSeries {
    pub scene: Scene,
    pub direction: Direction,
    pub steps: Vec<Step>,
    #[serde(skip)]
    measure: CarrierMeasure,
}

fn block_reason(e: Error) -> Error {
    match e {
        Error::PointOnBaseCircle => Error::SeriesBlocked(BlockReason::PointOnBaseCircle),
        Error::NoRealSolution => Error::SeriesBlocked(BlockReason::MissingCandidate),
        other => other,
    }
}

impl CircularSeries {
    /// Series whose first circle is `omega1`, started at its intersection
    /// point `x1` with the carrier.
    pub fn from_point(scene: Scene, omega1: TangentCircle, x1: Point) -> Result<Self> {
        let measure = scene.measure()?;
        let eps = scene.tolerances.geo;
        let checked = TangentCircle::from_circle(omega1.circle, &scene.alpha0, &scene.alpha1, eps)?;
        if checked.index != scene.index {
            return Err(Error::InvalidInput(format!(
                "start circle has index {} but the scene asks for {}",
                checked.index.value(),
                scene.index.value()
            )));
        }
        let (p, q) = scene.chord_points(&checked.circle).map_err(Error::SeriesBlocked)?;
        let x1 = if p.distance(x1) <= q.distance(x1) { p } else { q };
        let x2 = if x1 == p { q } else { p };
        if x1.distance(x2) <= eps {
            return Err(Error::SeriesBlocked(BlockReason::NoSecondIntersection));
        }
        let first = make_step(&measure, checked, x1, x2)?;
        let direction = if first.orientation > 0 {
            Direction::Ccw
        } else {
            Direction::Cw
        };
        Ok(Self {
            scene,
            direction,
            steps: vec![first],
            measure,
        })
    }

    /// Series whose first cut arc runs from `x₁` to `x₂` in `direction`.
    pub fn start(scene: Scene, omega1: TangentCircle, direction: Direction) -> Result<Self> {
        let (p, q) = scene.chord_points(&omega1.circle).map_err(Error::SeriesBlocked)?;
        let mid = scene.delta.angle_of(p) + 0.5 * (scene.delta.angle_of(q) - scene.delta.angle_of(p)).rem_euclid(TAU);
        let ccw_inside = omega1.circle.power(scene.delta.point_at(mid)) < 0.0;
        let x1 = if ccw_inside == (direction == Direction::Ccw) {
            p
        } else {
            q
        };
        Self::from_point(scene, omega1, x1)
    }

    pub fn measure(&self) -> &CarrierMeasure {
        &self.measure
    }

    pub fn last(&self) -> &Step {
        self.steps.last().expect("a series has at least one step")
    }

    /// Points `x_1, …, x_{n+1}`.
    pub fn points(&self) -> Vec<Point> {
        let mut v: Vec<Point> = self.steps.iter().map(|s| s.x).collect();
        v.push(self.last().x_next);
        v
    }

    /// The circle following the last one, without appending it.
    pub fn peek_next(&self) -> Result<Step> {
        let eps = self.scene.tolerances.geo;
        let last = self.last();
        let at = last.x_next;
        let mut found =
            tangent_circles_through_point(&self.scene.alpha0, &self.scene.alpha1, at, self.scene.index, eps)
                .map_err(block_reason)?;
        if found.len() < 2 {
            let reason = if found.first().is_some_and(|c| c.boundary) {
                BlockReason::EnvelopeBoundary
            } else {
                BlockReason::MissingCandidate
            };
            return Err(Error::SeriesBlocked(reason));
        }
        found.sort_by(|a, b| {
            a.circle
                .parameter_distance(&last.omega.circle)
                .total_cmp(&b.circle.parameter_distance(&last.omega.circle))
        });
        let next = *found.last().expect("two candidates");
        if next.circle.parameter_distance(&last.omega.circle) <= eps {
            return Err(Error::SeriesBlocked(BlockReason::EnvelopeBoundary));
        }
        let (p, q) = self.scene.chord_points(&next.circle).map_err(Error::SeriesBlocked)?;
        let x_next = if p.distance(at) >= q.distance(at) { p } else { q };
        if x_next.distance(at) <= eps {
            return Err(Error::SeriesBlocked(BlockReason::NoSecondIntersection));
        }
        make_step(&self.measure, next, at, x_next)
    }

    /// Append the next circle of the series.
    pub fn next_step(&mut self) -> Result<&Step> {
        let step = self.peek_next()?;
        self.steps.push(step);
        Ok(self.last())
    }

    /// Append up to `count` circles, stopping at the first blocked step.
    pub fn extend(&mut self, count: usize) -> Result<()> {
        for _ in 0..count {
            self.next_step()?;
        }
        Ok(())
    }
}

pub(crate) fn make_step(measure: &CarrierMeasure, omega: TangentCircle, x: Point, x_next: Point) -> Result<Step> {
    let delta = measure.delta();
    let ccw = measure.sweep_between(x, x_next, Direction::Ccw);
    let mid = delta.point_at(delta.angle_of(x) + 0.5 * ccw);
    let (orientation, sweep) = if omega.circle.power(mid) < 0.0 {
        (1, ccw)
    } else {
        (-1, measure.sweep_between(x, x_next, Direction::Cw))
    };
    let est = measure.sweep_mass(delta.angle_of(x), sweep)?;
    Ok(Step {
        omega,
        x,
        x_next,
        mass: est.value,
        mass_error: est.error,
        orientation,
    })
}

/// Outcome of running a series for a bounded number of steps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureReport {
    pub closed: bool,
    /// Steps to closure.
    pub n: Option<usize>,
    /// Full turns of mass accumulated by a closed series.
    pub winding: Option<i64>,
    /// Closing residual when closed, else the smallest residual seen.
    pub residual: f64,
    /// Circles in the series (excluding the repeated closing circle).
    pub steps: usize,
    pub blocked: Option<BlockReason>,
    pub total_mass: f64,
    /// Mass of the first cut arc.
    pub step_mass: Option<f64>,
    pub signed_mass_sum: f64,
    /// `|Σ signed step masses - winding · m(δ)|` for a closed series.
    pub quantization_residual: Option<f64>,
}

fn closure_residual(first: &Step, candidate: &Step) -> f64 {
    first
        .omega
        .circle
        .parameter_distance(&candidate.omega.circle)
        .max(first.x.distance(candidate.x))
}

/// Iterate the series from `omega1` for at most `max_steps` circles and
/// detect closure.
pub fn run_series(
    scene: Scene,
    omega1: TangentCircle,
    direction: Direction,
    max_steps: usize,
) -> Result<(CircularSeries, ClosureReport)> {
    let mut series = CircularSeries::start(scene, omega1, direction)?;
    let total_mass = series.measure.total()?.value;
    if max_steps == 0 {
        series.steps.clear();
        let report = ClosureReport {
            closed: false,
            n: None,
            winding: None,
            residual: f64::INFINITY,
            steps: 0,
            blocked: None,
            total_mass,
            step_mass: None,
            signed_mass_sum: 0.0,
            quantization_residual: None,
        };
        return Ok((series, report));
    }
    let close = scene.tolerances.close;
    let mut best = f64::INFINITY;
    let mut closed_at = None;
    let mut blocked = None;
    while series.steps.len() <= max_steps {
        let next = match series.peek_next() {
            Ok(s) => s,
            Err(Error::SeriesBlocked(reason)) => {
                blocked = Some(reason);
                break;
            }
            Err(e) => return Err(e),
        };
        let residual = closure_residual(&series.steps[0], &next);
        if residual <= close {
            closed_at = Some(series.steps.len());
            best = residual;
            break;
        }
        best = best.min(residual);
        if series.steps.len() == max_steps {
            break;
        }
        series.steps.push(next);
    }
    let signed_mass_sum: f64 = series.steps.iter().map(Step::signed_mass).sum();
    let winding = closed_at.map(|_| (signed_mass_sum / total_mass).round() as i64);
    let report = ClosureReport {
        closed: closed_at.is_some(),
        n: closed_at,
        winding,
        residual: best,
        steps: series.steps.len(),
        blocked,
        total_mass,
        step_mass: series.steps.first().map(|s| s.mass),
        signed_mass_sum,
        quantization_residual: winding.map(|w| (signed_mass_sum - w as f64 * total_mass).abs()),
    };
    Ok((series, report))
}

/// Rotation number of a nested scene from one step, with the spread of the
/// step masses over the steps that were built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationEstimate {
    pub value: f64,
    pub step_mass: f64,
    pub total_mass: f64,
    /// `max_k |m̃_k - m̃₁| / m̃₁`.
    pub spread: f64,
}

pub fn rotation_number(scene: Scene, omega1: TangentCircle, steps: usize) -> Result<RotationEstimate> {
    if !scene.is_nested() {
        return Err(Error::NotNested);
    }
    let mut series = CircularSeries::start(scene, omega1, Direction::Ccw)?;
    series.extend(steps.saturating_sub(1))?;
    let total_mass = series.measure.total()?.value;
    let m1 = series.steps[0].mass;
    let spread = series
        .steps
        .iter()
        .map(|s| (s.mass - m1).abs() / m1)
        .fold(0.0, f64::max);
    Ok(RotationEstimate {
        value: m1 / total_mass,
        step_mass: m1,
        total_mass,
        spread,
    })
}

/// Orientation-signed differentials along a perturbed series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignedInvariantReport {
    pub epsilon: f64,
    pub steps: usize,
    /// `τ(x_k t₀ᵏ t₁ᵏ)` per step.
    pub taus: Vec<i8>,
    /// Relative spread of `τ ρ dx` at `epsilon` and `epsilon / 2`.
    pub signed_spread: f64,
    pub signed_spread_half: f64,
    /// Relative spread of `ρ dx` with signed `dx` and no orientation factor.
    pub plain_spread: f64,
    /// Relative spread of `ρ |dx|`.
    pub absolute_spread: f64,
}

fn perturbed_differentials(series: &CircularSeries, epsilon: f64) -> Result<Vec<f64>> {
    let scene = &series.scene;
    let delta = scene.delta;
    let first = &series.steps[0];
    let x1 = delta.point_at(delta.angle_of(first.x) + epsilon / delta.radius);
    let omega = tangent_circles_through_point(&scene.alpha0, &scene.alpha1, x1, scene.index, scene.tolerances.geo)?
        .into_iter()
        .min_by(|a, b| {
            a.circle
                .parameter_distance(&first.omega.circle)
                .total_cmp(&b.circle.parameter_distance(&first.omega.circle))
        })
        .ok_or(Error::NoRealSolution)?;
    let mut moved = CircularSeries::from_point(*scene, omega, x1)?;
    moved.extend(series.steps.len() - 1)?;
    Ok(series
        .steps
        .iter()
        .zip(&moved.steps)
        .map(|(a, b)| {
            let d = (delta.angle_of(b.x) - delta.angle_of(a.x) + PI).rem_euclid(TAU) - PI;
            d * delta.radius
        })
        .collect())
}

/// Move `x₁` by a signed arc `epsilon`, rebuild the series and compare
/// `τ(x_k t₀ᵏ t₁ᵏ) ρ(x_k) dx_k` across steps.
pub fn signed_invariant_check(series: &CircularSeries, epsilon: f64) -> Result<SignedInvariantReport> {
    let scene = &series.scene;
    if !series.steps[0].omega.circle.inside(&scene.alpha1, scene.tolerances.geo) {
        return Err(Error::AssumptionViolated);
    }
    let density = scene.density();
    let taus: Vec<i8> = series
        .steps
        .iter()
        .map(|s| orientation(s.x, s.omega.touch0, s.omega.touch1))
        .collect();
    let weights: Vec<f64> = series.steps.iter().map(|s| density.rho(s.x)).collect();
    let signed = |dx: &[f64]| {
        let v: Vec<Option<f64>> = dx
            .iter()
            .zip(&taus)
            .zip(&weights)
            .map(|((d, t), w)| Some(f64::from(*t) * w * d))
            .collect();
        spread_of(&v).spread
    };
    let dx = perturbed_differentials(series, epsilon)?;
    let dx_half = perturbed_differentials(series, 0.5 * epsilon)?;
    let plain: Vec<Option<f64>> = dx.iter().zip(&weights).map(|(d, w)| Some(w * d)).collect();
    let absolute: Vec<Option<f64>> = dx.iter().zip(&weights).map(|(d, w)| Some(w * d.abs())).collect();
    Ok(SignedInvariantReport {
        epsilon,
        steps: series.steps.len(),
        signed_spread: signed(&dx),
        signed_spread_half: signed(&dx_half),
        plain_spread: spread_of(&plain).spread,
        absolute_spread: spread_of(&absolute).spread,
        taus,
    })
}

/// Orientations `τ(m t₀ t₁)` and `τ(m s₀ s₁)` for every pair of circles
/// through `m` that touch `alpha0` with the same contact kind and `alpha1`
/// with the same contact kind.
pub fn same_contact_orientations(alpha0: &Circle, alpha1: &Circle, m: Point, eps: f64) -> Result<Vec<(i8, i8)>> {
    let all = crate::tangency::all_tangent_circles_through_point(alpha0, alpha1, m, eps)?;
    let kinds: Vec<_> = all
        .iter()
        .map(|c| {
            (
                contact_kind(&c.circle, alpha0, eps).ok(),
                contact_kind(&c.circle, alpha1, eps).ok(),
            )
        })
        .collect();
    let mut out = Vec::new();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if kinds[i] == kinds[j] && kinds[i].0.is_some() && kinds[i].1.is_some() {
                out.push((
                    orientation(m, all[i].touch0, all[i].touch1),
                    orientation(m, all[j].touch0, all[j].touch1),
                ));
            }
        }
    }
    Ok(out)
}

/// Image of a scene and start circle under an inversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Normalized {
    /// `None` when the configuration already satisfies the assumption.
    pub inversion: Option<Inversion>,
    pub scene: Scene,
    pub omega: TangentCircle,
}

fn image(inv: &Inversion, c: &Circle, margin: f64) -> Option<Circle> {
    if c.power(inv.center).abs() <= margin {
        return None;
    }
    match inv.invert_circle(c, 0.0) {
        Curve::Circle(img) => Some(img),
        Curve::Line(_) => None,
    }
}

/// Find an inversion taking `omega1` inside the outer base circle.
pub fn normalize_assumption1(scene: Scene, omega1: TangentCircle) -> Result<Normalized> {
    let eps = scene.tolerances.geo;
    match contact_kind(&omega1.circle, &scene.alpha1, eps) {
        Ok(_) => {}
        Err(_) => return Err(Error::NotTangentConfiguration),
    }
    if omega1.circle.inside(&scene.alpha1, eps) {
        return Ok(Normalized {
            inversion: None,
            scene,
            omega: omega1,
        });
    }
    let (c1, r1) = (scene.alpha1.center, scene.alpha1.radius);
    let mut centers = vec![c1];
    for ring in [0.25, 0.5, 0.75, 1.5, 3.0] {
        for k in 0..8 {
            centers.push(c1 + Point::unit(k as f64 * TAU / 8.0 + 0.3) * (ring * r1));
        }
    }
    let scale = r1.max(scene.delta.radius).max(scene.alpha0.radius);
    let margin = 1e-6 * scale * scale;
    for center in centers {
        let Ok(inv) = Inversion::new(center, r1 * r1) else {
            continue;
        };
        let imgs = (
            image(&inv, &scene.alpha0, margin),
            image(&inv, &scene.alpha1, margin),
            image(&inv, &scene.delta, margin),
            image(&inv, &omega1.circle, margin),
        );
        let (Some(a0), Some(a1), Some(d), Some(w)) = imgs else {
            continue;
        };
        if !w.inside(&a1, eps) || contact_kind(&w, &a1, eps).ok() != Some(ContactKind::Interior) {
            continue;
        }
        let Ok(index) = classify_index(&w, &a0, &a1, eps) else {
            continue;
        };
        let Ok(new_scene) = Scene::new(a0, a1, d, index, scene.tolerances) else {
            continue;
        };
        let Ok(omega) = TangentCircle::from_circle(w, &a0, &a1, eps) else {
            continue;
        };
        return Ok(Normalized {
            inversion: Some(inv),
            scene: new_scene,
            omega,
        });
    }
    Err(Error::NormalizationFailed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn circle(x: f64, y: f64, r: f64) -> Circle {
        Circle::new(Point::new(x, y), r).unwrap()
    }

    fn concentric(delta_radius: f64) -> Scene {
        Scene::new(
            circle(0.0, 0.0, 1.0),
            circle(0.0, 0.0, 3.0),
            circle(0.0, 0.0, delta_radius),
            TangencyIndex::One,
            Tolerances::default(),
        )
        .unwrap()
    }

    fn omega_at(scene: &Scene, c: Circle) -> TangentCircle {
        TangentCircle::from_circle(c, &scene.alpha0, &scene.alpha1, 1e-9).unwrap()
    }

    #[test]
    fn first_step_geometry() {
        let scene = concentric(3f64.sqrt());
        let omega = omega_at(&scene, circle(2.0, 0.0, 1.0));
        let s = CircularSeries::start(scene, omega, Direction::Ccw).unwrap();
        let st = &s.steps[0];
        assert_relative_eq!(st.x.angle(), -PI / 6.0, epsilon = 1e-14);
        assert_relative_eq!(st.x_next.angle(), PI / 6.0, epsilon = 1e-14);
        assert_relative_eq!(st.mass, PI / 6.0, epsilon = 1e-12);
        let mut s = s;
        let next = s.next_step().unwrap();
        assert_relative_eq!(next.omega.circle.center.angle(), PI / 3.0, epsilon = 1e-13);
    }

    #[test]
    fn closing_scene_closes_after_six() {
        let scene = concentric(3f64.sqrt());
        let omega = omega_at(&scene, circle(2.0, 0.0, 1.0));
        let (series, report) = run_series(scene, omega, Direction::Ccw, 50).unwrap();
        assert!(report.closed);
        assert_eq!(report.n, Some(6));
        assert_eq!(report.winding, Some(1));
        assert_eq!(series.steps.len(), 6);
        assert!(report.residual <= 1e-9);
        assert_relative_eq!(report.total_mass, PI, epsilon = 1e-12);
        assert!(report.quantization_residual.unwrap() <= 1e-10);
    }

    #[test]
    fn clockwise_direction_also_closes() {
        let scene = concentric(3f64.sqrt());
        let omega = omega_at(&scene, circle(2.0, 0.0, 1.0));
        let (series, report) = run_series(scene, omega, Direction::Cw, 50).unwrap();
        assert_eq!(report.n, Some(6));
        assert_eq!(report.winding, Some(-1));
        assert!(series.steps.iter().all(|s| s.orientation == -1));
    }

    #[test]
    fn irrational_scene_does_not_close() {
        let scene = concentric(2.0);
        let omega = omega_at(&scene, circle(2.0, 0.0, 1.0));
        let (_, report) = run_series(scene, omega, Direction::Ccw, 2000).unwrap();
        assert!(!report.closed);
        assert!(report.residual > scene.tolerances.close);
        let rot = rotation_number(scene, omega, 10).unwrap();
        assert_relative_eq!(rot.value, (7.0f64 / 8.0).acos() / PI, epsilon = 1e-12);
    }

    #[test]
    fn zero_steps_is_empty() {
        let scene = concentric(3f64.sqrt());
        let omega = omega_at(&scene, circle(2.0, 0.0, 1.0));
        let (series, report) = run_series(scene, omega, Direction::Ccw, 0).unwrap();
        assert!(series.steps.is_empty());
        assert!(!report.closed);
    }

    #[test]
    fn tangent_start_is_blocked() {
        // the carrier touches ω at (3, 0)
        let scene = Scene::new(
            circle(0.0, 0.0, 1.0),
            circle(0.0, 0.0, 3.0),
            circle(4.0, 0.0, 1.0),
            TangencyIndex::One,
            Tolerances::default(),
        )
        .unwrap();
        let omega = omega_at(&scene, circle(2.0, 0.0, 1.0));
        assert!(matches!(
            CircularSeries::start(scene, omega, Direction::Ccw),
            Err(Error::SeriesBlocked(BlockReason::NoSecondIntersection))
        ));
    }

    #[test]
    fn not_nested_rotation_number() {
        let scene = Scene::new(
            circle(0.0, 0.0, 1.0),
            circle(0.0, 0.0, 3.0),
            circle(1.0, 0.0, 1.0),
            TangencyIndex::One,
            Tolerances::default(),
        )
        .unwrap();
        let omega = scene.start_circle_near(0.5).unwrap();
        assert!(matches!(rotation_number(scene, omega, 3), Err(Error::NotNested)));
    }

    #[test]
    fn signed_invariant_on_nested_scene() {
        let scene = concentric(3f64.sqrt());
        let omega = omega_at(&scene, circle(2.0, 0.0, 1.0));
        let (series, _) = run_series(scene, omega, Direction::Ccw, 20).unwrap();
        let r = signed_invariant_check(&series, 1e-4).unwrap();
        assert!(r.taus.iter().all(|&t| t == r.taus[0]));
        assert!(r.signed_spread <= 1e-3, "{r:?}");
    }

    #[test]
    fn normalize_identity_and_inversion() {
        let scene = concentric(2.0);
        let inside = omega_at(&scene, circle(2.0, 0.0, 1.0));
        assert!(normalize_assumption1(scene, inside).unwrap().inversion.is_none());

        // separated base circles; the start circle touches both from outside
        let out_scene = Scene::new(
            circle(-2.0, 0.0, 1.0),
            circle(2.0, 0.0, 1.5),
            circle(0.0, 2.0, 1.5),
            TangencyIndex::Zero,
            Tolerances::default(),
        )
        .unwrap();
        let omega = tangent_circles_through_point(
            &out_scene.alpha0,
            &out_scene.alpha1,
            Point::new(0.0, 3.0),
            TangencyIndex::Zero,
            1e-9,
        )
        .unwrap()
        .into_iter()
        .find(|c| !c.circle.inside(&out_scene.alpha1, 1e-9))
        .unwrap();
        let n = normalize_assumption1(out_scene, omega).unwrap();
        assert!(n.inversion.is_some());
        assert!(n.omega.circle.inside(&n.scene.alpha1, 1e-9));

        let crossing = TangentCircle {
            circle: circle(3.0, 0.0, 1.0),
            ..inside
        };
        assert!(matches!(
            normalize_assumption1(scene, crossing),
            Err(Error::NotTangentConfiguration)
        ));
    }
}
