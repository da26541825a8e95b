//! Cyclics, δ-equivalent quadric pencils, and the quadric whose tangent
//! lines are the chords of an Emch series.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Circle, Line, Point, Quadric};
use crate::measure::{ratio_spread, spread_of};
use crate::pencils::Pencil;
use crate::series::{CircularSeries, Scene};
use crate::tangency::{TangencyIndex, TangentCircle};

/// Plane quartic `F(x) = λ s² + s ℓ(x) + Q(x)` with `s = x₁² + x₂²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cyclic {
    pub lambda: f64,
    /// Coefficients of the linear form ℓ.
    pub linear: Point,
    pub quadratic: Quadric,
}

impl Cyclic {
    pub fn new(lambda: f64, linear: Point, quadratic: Quadric) -> Result<Self> {
        let c = Self {
            lambda,
            linear,
            quadratic,
        };
        if lambda == 0.0 && linear == Point::ORIGIN && quadratic.is_zero() {
            return Err(Error::InvalidInput("cyclic is identically zero".into()));
        }
        Ok(c)
    }

    /// A quadric viewed as a cyclic with `λ = 0`, `ℓ = 0`.
    pub fn from_quadric(q: Quadric) -> Result<Self> {
        Self::new(0.0, Point::ORIGIN, q)
    }

    /// The product `f₀ f₁` of two circle powers.
    pub fn from_circles(a0: &Circle, a1: &Circle) -> Self {
        let (l0, b0) = (a0.linear_coefficients(), a0.constant_term());
        let (l1, b1) = (a1.linear_coefficients(), a1.constant_term());
        let s = Quadric::new(1.0, 0.0, 1.0, 0.0, 0.0, 0.0);
        let quadratic = Quadric::product_of_affine(l0, b0, l1, b1).add(&s.scale(b0 + b1));
        Self {
            lambda: 1.0,
            linear: l0 + l1,
            quadratic,
        }
    }

    pub fn eval(&self, p: Point) -> f64 {
        let s = p.norm_sq();
        self.lambda * s * s + s * self.linear.dot(p) + self.quadratic.eval(p)
    }

    pub fn gradient(&self, p: Point) -> Point {
        let s = p.norm_sq();
        p * (4.0 * self.lambda * s + 2.0 * self.linear.dot(p)) + self.linear * s + self.quadratic.gradient(p)
    }

    /// `Σ |terms| / |F|` at `p`: how much cancellation the value carries.
    pub fn condition(&self, p: Point) -> f64 {
        let s = p.norm_sq();
        let q = &self.quadratic;
        let (x, y) = (p.x, p.y);
        let terms = self.lambda.abs() * s * s
            + s * (self.linear.x * x).abs()
            + s * (self.linear.y * y).abs()
            + (q.a11 * x * x).abs()
            + (2.0 * q.a12 * x * y).abs()
            + (q.a22 * y * y).abs()
            + (q.b1 * x).abs()
            + (q.b2 * y).abs()
            + q.c.abs();
        terms / self.eval(p).abs()
    }

    /// Rescaled so that `λ = 1`, when `|λ| > eps`.
    pub fn normalized(&self, eps: f64) -> Result<Self> {
        if self.lambda.abs() <= eps {
            return Err(Error::LambdaZero);
        }
        let k = 1.0 / self.lambda;
        Ok(Self {
            lambda: 1.0,
            linear: self.linear * k,
            quadratic: self.quadratic.scale(k),
        })
    }
}

fn unit_s() -> Quadric {
    Quadric::new(1.0, 0.0, 1.0, 0.0, 0.0, 0.0)
}

/// Quadrics `F - p f_δ` with `p = λ s + ℓ_p + A_p`, `ℓ_p = ℓ - λ ℓ_δ`.
///
/// The pencil parameter is `A_p`; its member at `∞` is `δ` (up to sign).
/// For `λ = 0` the same construction applies with `p` affine.
pub fn equivalent_pencil(cyclic: &Cyclic, delta: &Circle) -> Result<Pencil> {
    let base = equivalent_member(cyclic, delta, 0.0);
    Pencil::new(base, base.sub_scaled(1.0, &delta.to_quadric()))
}

fn linear_p(cyclic: &Cyclic, delta: &Circle) -> Point {
    cyclic.linear - delta.linear_coefficients() * cyclic.lambda
}

fn equivalent_member(cyclic: &Cyclic, delta: &Circle, a_p: f64) -> Quadric {
    let (ld, ad) = (delta.linear_coefficients(), delta.constant_term());
    let lp = linear_p(cyclic, delta);
    cyclic
        .quadratic
        .sub_scaled(cyclic.lambda * ad + a_p, &unit_s())
        .sub_scaled(1.0, &Quadric::product_of_affine(lp, a_p, ld, ad))
}

/// Record of the δ-equivalence of a cyclic and one quadric of its pencil.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceWitness {
    /// `p = λ s + ℓ_p + A_p`.
    pub p: Quadric,
    pub linear_p: Point,
    pub a_p: f64,
    /// `F = μ q` on δ.
    pub mu: f64,
    /// Relative spread of `F / q` over the sampled points of δ.
    pub spread: f64,
    pub q: Quadric,
}

/// The member `q = F - p f_δ` at `a_p`, with `μ` and its spread sampled on δ.
pub fn equivalence_witness(cyclic: &Cyclic, delta: &Circle, a_p: f64, samples: usize) -> EquivalenceWitness {
    let lp = linear_p(cyclic, delta);
    let p = unit_s()
        .scale(cyclic.lambda)
        .add(&Quadric::new(0.0, 0.0, 0.0, lp.x, lp.y, a_p));
    let q = equivalent_member(cyclic, delta, a_p);
    let r = ratio_spread(delta, samples, |x| cyclic.eval(x), |x| q.eval(x));
    EquivalenceWitness {
        p,
        linear_p: lp,
        a_p,
        mu: r.mean,
        spread: r.spread,
        q,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prop1PrimeReport {
    pub mean: f64,
    pub max_relative_deviation: f64,
    pub used: usize,
    pub skipped: usize,
    pub passed: bool,
}

const DOUBLE_TANGENCY_TOL: f64 = 1e-8;

fn check_double_tangency(cyclic: &Cyclic, omega: &Circle, touches: [Point; 2]) -> Result<()> {
    for t in touches {
        let on_omega = (t.distance(omega.center) - omega.radius).abs() / omega.radius;
        let g = cyclic.gradient(t);
        let radial = t - omega.center;
        let (value, align) = if g.norm() > 0.0 {
            (
                cyclic.eval(t).abs() / g.norm(),
                g.cross(radial).abs() / (g.norm() * radial.norm()),
            )
        } else {
            (cyclic.eval(t).abs(), 0.0)
        };
        let residual = on_omega.max(value).max(align);
        if !(residual <= DOUBLE_TANGENCY_TOL) {
            return Err(Error::NotDoublyTangent { residual });
        }
    }
    Ok(())
}

/// Sample `F / h²` on `omega`, where `h` is the distance to the line
/// `t₀t₁`. Samples where [`Cyclic::condition`] exceeds `1e6`, or where moving
/// `omega` by one rounding unit moves `F` by more than `1e5` units, are skipped.
pub fn verify_prop1_prime(
    cyclic: &Cyclic,
    omega: &Circle,
    t0: Point,
    t1: Point,
    samples: usize,
) -> Result<Prop1PrimeReport> {
    check_double_tangency(cyclic, omega, [t0, t1])?;
    let line = Line::through(t0, t1)?;
    let scale = omega.center.norm() + omega.radius;
    let values: Vec<Option<f64>> = (0..samples)
        .map(|k| {
            let x = omega.point_at((k as f64 + 0.5) * TAU / samples as f64);
            let h = line.distance(x);
            let f = cyclic.eval(x);
            let placement = cyclic.gradient(x).norm() * scale / f.abs();
            (cyclic.condition(x) <= 1e6 && placement <= 1e5).then(|| f / (h * h))
        })
        .collect();
    let r = spread_of(&values);
    Ok(Prop1PrimeReport {
        mean: r.mean,
        max_relative_deviation: r.spread,
        used: r.used,
        skipped: r.skipped,
        passed: r.spread <= 1e-9,
    })
}

/// The member of the `ω`-equivalent pencil proportional to the double line `t₀t₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoubleLineMember {
    pub a_p: f64,
    /// `q(A_p) = μ h²` with `h` the unit-normal affine function of the line.
    pub mu: f64,
    /// Max coefficient residual of the least-squares fit, relative to `|q(A_p)|`.
    pub residual: f64,
    /// `det` of the quadratic part of the normalized member.
    pub discriminant: f64,
}

/// Fit `q(A_p) = μ h²` in the pencil of quadrics `ω`-equivalent to `Γ`.
pub fn double_line_member(cyclic: &Cyclic, omega: &Circle, t0: Point, t1: Point) -> Result<DoubleLineMember> {
    check_double_tangency(cyclic, omega, [t0, t1])?;
    let line = Line::through(t0, t1)?;
    let base = equivalent_member(cyclic, omega, 0.0).coefficients();
    let f = omega.to_quadric().coefficients();
    let h2 = Quadric::double_line(&line).coefficients();
    // base - A f - μ h² = 0, weighted so each coefficient counts once
    let w = [1.0, 2f64.sqrt(), 1.0, 1.0, 1.0, 1.0];
    let a = DMatrix::from_fn(6, 2, |i, j| w[i] * if j == 0 { f[i] } else { h2[i] });
    let b = DVector::from_fn(6, |i, _| w[i] * base[i]);
    let sol = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let (a_p, mu) = (sol[0], sol[1]);
    let q = equivalent_member(cyclic, omega, a_p);
    let residual = (a * &sol - &b).amax() / q.coefficient_norm().max(f64::MIN_POSITIVE);
    Ok(DoubleLineMember {
        a_p,
        mu,
        residual,
        discriminant: q.normalized().quadratic_discriminant(),
    })
}

/// Member of the equivalent pencil of `f₀ f₁` on `δ`, written in the
/// product form of two affine factors.
pub fn poncelet_member(alpha0: &Circle, alpha1: &Circle, delta: &Circle, a_p: f64) -> Quadric {
    equivalent_member(&Cyclic::from_circles(alpha0, alpha1), delta, a_p)
}

/// A quadric of the equivalent pencil touching Emch chords.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PonceletQuadric {
    pub a_p: f64,
    pub quadric: Quadric,
}

const DEGENERATE_LEAD: f64 = 1e-10;

/// Solve the tangency condition for `A_p` on one chord. Roots where the
/// member is constant or linear along the chord are discarded.
pub fn derive_poncelet_quadric(
    alpha0: &Circle,
    alpha1: &Circle,
    delta: &Circle,
    chord: &Line,
) -> Result<PonceletQuadric> {
    let roots = poncelet_roots(alpha0, alpha1, delta, chord);
    match roots.len() {
        0 => Err(Error::NoRealAp),
        1 => Ok(roots[0]),
        _ => Err(Error::AmbiguousAp(roots.iter().map(|r| (r.a_p, r.quadric)).collect())),
    }
}

fn poncelet_roots(alpha0: &Circle, alpha1: &Circle, delta: &Circle, chord: &Line) -> Vec<PonceletQuadric> {
    let base = poncelet_member(alpha0, alpha1, delta, 0.0);
    let (a0, b0, c0) = base.restrict_to_line(chord);
    let (a1, b1, c1) = delta.to_quadric().scale(-1.0).restrict_to_line(chord);
    // (b0 + A b1)² - 4 (a0 + A a1)(c0 + A c1)
    let k2 = b1 * b1 - 4.0 * a1 * c1;
    let k1 = 2.0 * b0 * b1 - 4.0 * (a0 * c1 + a1 * c0);
    let k0 = b0 * b0 - 4.0 * a0 * c0;
    let mut roots = real_roots(k2, k1, k0);
    roots.sort_by(f64::total_cmp);
    roots
        .into_iter()
        .filter_map(|a_p| {
            let quadric = poncelet_member(alpha0, alpha1, delta, a_p);
            let (a, _, _) = quadric.normalized().restrict_to_line(chord);
            (a.abs() > DEGENERATE_LEAD).then_some(PonceletQuadric { a_p, quadric })
        })
        .collect()
}

fn real_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if a.abs() <= 1e-14 * scale {
        return if b != 0.0 { vec![-c / b] } else { Vec::new() };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < -1e-14 * b * b.max(1.0) {
        return Vec::new();
    }
    let sq = disc.max(0.0).sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    if q == 0.0 {
        return vec![0.0];
    }
    let (r1, r2) = (q / a, c / q);
    if (r1 - r2).abs() <= 1e-14 * r1.abs().max(1.0) {
        vec![r1]
    } else {
        vec![r1, r2]
    }
}

/// Like [`derive_poncelet_quadric`], choosing among the roots of the first
/// chord by the largest tangency residual over the remaining chords.
pub fn resolve_poncelet_quadric(
    alpha0: &Circle,
    alpha1: &Circle,
    delta: &Circle,
    chords: &[Line],
) -> Result<PonceletQuadric> {
    let (first, rest) = chords
        .split_first()
        .ok_or_else(|| Error::InvalidInput("at least one chord is required".into()))?;
    let worst = |q: &Quadric| {
        rest.iter()
            .map(|l| q.line_tangency_residual(l).map_or(f64::INFINITY, f64::abs))
            .fold(0.0, f64::max)
    };
    poncelet_roots(alpha0, alpha1, delta, first)
        .into_iter()
        .min_by(|a, b| worst(&a.quadric).total_cmp(&worst(&b.quadric)))
        .ok_or(Error::NoRealAp)
}

/// Chord lines `x_k x_{k+1}` of a series.
pub fn series_chords(series: &CircularSeries) -> Result<Vec<Line>> {
    series.steps.iter().map(|s| Line::through(s.x, s.x_next)).collect()
}

/// The Poncelet quadric of a series, seeded by its first chord.
pub fn series_poncelet_quadric(series: &CircularSeries) -> Result<PonceletQuadric> {
    let s = &series.scene;
    resolve_poncelet_quadric(&s.alpha0, &s.alpha1, &s.delta, &series_chords(series)?)
}

/// Second endpoints on `delta` of the chords from `x` tangent to `gamma`.
pub fn tangent_chords_from(gamma: &Quadric, delta: &Circle, x: Point) -> Vec<Point> {
    let w = gamma.gradient(x);
    let c = gamma.eval(x);
    let h11 = w.x * w.x - 4.0 * c * gamma.a11;
    let h12 = w.x * w.y - 4.0 * c * gamma.a12;
    let h22 = w.y * w.y - 4.0 * c * gamma.a22;
    let dirs: Vec<Point> = if h11.abs() >= h22.abs() {
        real_roots(h11, 2.0 * h12, h22)
            .into_iter()
            .map(|k| Point::new(k, 1.0))
            .collect()
    } else {
        real_roots(h22, 2.0 * h12, h11)
            .into_iter()
            .map(|k| Point::new(1.0, k))
            .collect()
    };
    dirs.into_iter()
        .filter_map(|d| {
            let t = -2.0 * d.dot(x - delta.center) / d.norm_sq();
            let y = x + d * t;
            (y.distance(x) > 1e-9 * delta.radius).then_some(y)
        })
        .collect()
}

/// A nested pair whose Emch chords on `δ` touch a given quadric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CirclePairFit {
    pub alpha0: Circle,
    pub alpha1: Circle,
    pub a_p: f64,
    /// Coefficient distance, up to scale, between the input quadric and the
    /// one rebuilt from a series of the pair.
    pub round_trip: f64,
}

const PAIR_STARTS: usize = 96;
const ROUND_TRIP_TOL: f64 = 1e-8;
// relative to δ; smaller circles are treated as point-circle limits
const MIN_RADIUS: f64 = 1e-3;

/// Find circles `α₀ ⊂ δ ⊂ α₁` whose index-1 series chords on `δ` are
/// tangent to `gamma`.
///
/// Solved in the frame where `δ` is the unit circle. The unknowns are both
/// circles, `A_p`, the scale of `gamma`, and the circle through one tangent
/// chord touching both circles; Levenberg–Marquardt runs from deterministic
/// pseudo-random starts. Every candidate is checked by rebuilding `gamma`
/// from a series of the pair.
pub fn quadric_to_circle_pair(gamma: &Quadric, delta: &Circle) -> Result<CirclePairFit> {
    if gamma.is_zero() || !gamma.coefficients().iter().all(|k| k.is_finite()) {
        return Err(Error::InvalidInput("quadric must be finite and nonzero".into()));
    }
    let (c, r) = (delta.center, delta.radius);
    // γ'(u) = γ(c + r u)
    let g = Quadric::new(
        gamma.a11 * r * r,
        gamma.a12 * r * r,
        gamma.a22 * r * r,
        gamma.gradient(c).x * r,
        gamma.gradient(c).y * r,
        gamma.eval(c),
    )
    .normalized();
    let unit = Circle::new(Point::ORIGIN, 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut best: Option<CirclePairFit> = None;
    for start in 0..PAIR_STARTS {
        let x = unit.point_at(rng.gen_range(0.0..TAU));
        let ys = tangent_chords_from(&g, &unit, x);
        let Some(&y) = ys.get(start % 2).or(ys.first()) else {
            continue;
        };
        let z0 = initial_guess(&mut rng, &g, x, y);
        let Some(z) = levenberg_marquardt(|z| pair_residuals(z, &g, x, y), z0) else {
            continue;
        };
        let Some((a0, a1, a_p, omega)) = unpack(&z, x, y) else {
            continue;
        };
        if a0.radius < MIN_RADIUS || a1.radius < MIN_RADIUS {
            continue;
        }
        let map = |k: &Circle| Circle::new(c + k.center * r, k.radius * r);
        let (Ok(a0), Ok(a1), Ok(omega)) = (map(&a0), map(&a1), map(&omega)) else {
            continue;
        };
        let Ok(round_trip) = round_trip(gamma, &a0, &a1, delta, omega, c + x * r) else {
            continue;
        };
        if round_trip <= ROUND_TRIP_TOL {
            let fit = CirclePairFit {
                alpha0: a0,
                alpha1: a1,
                a_p: a_p * r * r,
                round_trip,
            };
            if best.as_ref().is_none_or(|b| round_trip < b.round_trip) {
                best = Some(fit);
            }
        }
    }
    best.ok_or(Error::NoRealPair)
}

// z = [c0x, c0y, ln r0, c1x, c1y, ln r1, A_p, κ, s]
fn unpack(z: &DVector<f64>, x: Point, y: Point) -> Option<(Circle, Circle, f64, Circle)> {
    let a0 = Circle::new(Point::new(z[0], z[1]), z[2].exp()).ok()?;
    let a1 = Circle::new(Point::new(z[3], z[4]), z[5].exp()).ok()?;
    let (center, radius) = chord_circle(x, y, z[8]);
    Some((a0, a1, z[6], Circle::new(center, radius).ok()?))
}

fn chord_circle(x: Point, y: Point, s: f64) -> (Point, f64) {
    let m = (x + y) * 0.5;
    let h = 0.5 * x.distance(y);
    let n = ((y - x) / (2.0 * h)).perp();
    (m + n * s, (s * s + h * h).sqrt())
}

fn pair_residuals(z: &DVector<f64>, g: &Quadric, x: Point, y: Point) -> DVector<f64> {
    let (c0, r0, c1, r1) = (Point::new(z[0], z[1]), z[2].exp(), Point::new(z[3], z[4]), z[5].exp());
    let unit = Circle {
        center: Point::ORIGIN,
        radius: 1.0,
    };
    let q = poncelet_member(
        &Circle { center: c0, radius: r0 },
        &Circle { center: c1, radius: r1 },
        &unit,
        z[6],
    );
    let (qk, gk) = (q.coefficients(), g.coefficients());
    let (center, rho) = chord_circle(x, y, z[8]);
    let mut out = DVector::zeros(8);
    for i in 0..6 {
        out[i] = qk[i] - z[7] * gk[i];
    }
    out[6] = center.distance(c0) - rho - r0;
    out[7] = r1 - center.distance(c1) - rho;
    out
}

fn initial_guess(rng: &mut ChaCha8Rng, g: &Quadric, x: Point, y: Point) -> DVector<f64> {
    let c0 = Point::unit(rng.gen_range(0.0..TAU)) * rng.gen_range(0.0..0.5);
    let r0 = rng.gen_range(0.05..0.95) * (1.0 - c0.norm());
    let c1 = Point::unit(rng.gen_range(0.0..TAU)) * rng.gen_range(0.0..0.5);
    let r1 = (1.0 + c1.norm()) * rng.gen_range(0.05f64..3.0).exp();
    let a0 = Circle { center: c0, radius: r0 };
    let a1 = Circle { center: c1, radius: r1 };
    let unit = Circle {
        center: Point::ORIGIN,
        radius: 1.0,
    };
    // q(A) = base - A f_δ = κ g is linear in (A, κ)
    let base = poncelet_member(&a0, &a1, &unit, 0.0).coefficients();
    let fd = unit.to_quadric().coefficients();
    let gk = g.coefficients();
    let m = DMatrix::from_fn(6, 2, |i, j| if j == 0 { fd[i] } else { gk[i] });
    let b = DVector::from_fn(6, |i, _| base[i]);
    let sol = m.svd(true, true).solve(&b, 1e-14).unwrap_or_else(|_| DVector::zeros(2));
    // circle through x, y on the side away from α₀
    let mid = (x + y) * 0.5;
    let n = ((y - x) / x.distance(y)).perp();
    let s = -n.dot(c0 - mid).signum() * rng.gen_range(0.0..1.0);
    DVector::from_vec(vec![c0.x, c0.y, r0.ln(), c1.x, c1.y, r1.ln(), sol[0], sol[1], s])
}

fn levenberg_marquardt<F: Fn(&DVector<f64>) -> DVector<f64>>(f: F, mut z: DVector<f64>) -> Option<DVector<f64>> {
    let n = z.len();
    let mut r = f(&z);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    for _ in 0..300 {
        if !cost.is_finite() {
            return None;
        }
        if cost <= 1e-28 {
            break;
        }
        let mut jac = DMatrix::zeros(r.len(), n);
        for j in 0..n {
            let h = 1e-7 * z[j].abs().max(1.0);
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[j] += h;
            zm[j] -= h;
            jac.set_column(j, &((f(&zp) - f(&zm)) / (2.0 * h)));
        }
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &r;
        let mut improved = false;
        while lambda < 1e12 {
            let mut a = jtj.clone();
            for i in 0..n {
                a[(i, i)] += lambda * (jtj[(i, i)] + 1e-12);
            }
            let Some(step) = a.cholesky().map(|ch| ch.solve(&(-&jtr))) else {
                lambda *= 10.0;
                continue;
            };
            let zn = &z + &step;
            let rn = f(&zn);
            let cn = rn.norm_squared();
            if cn.is_finite() && cn < cost {
                z = zn;
                r = rn;
                cost = cn;
                lambda = (lambda / 3.0).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    (cost <= 1e-24).then_some(z)
}

fn round_trip(gamma: &Quadric, a0: &Circle, a1: &Circle, delta: &Circle, omega: Circle, x: Point) -> Result<f64> {
    let tol = crate::Tolerances::default();
    let scene = Scene::new(*a0, *a1, *delta, TangencyIndex::One, tol)?;
    if !scene.is_nested() {
        return Err(Error::NotNested);
    }
    let omega = TangentCircle::from_circle(omega, a0, a1, 1e-7)?;
    let mut series = CircularSeries::from_point(scene, omega, x)?;
    series.extend(4)?;
    let rebuilt = series_poncelet_quadric(&series)?;
    Ok(rebuilt.quadric.distance_up_to_scale(gamma))
}
