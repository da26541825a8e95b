//! Plane primitives: points, circles with their power functions, lines in
//! normal form, general quadrics and inversions.
//!
//! Everything here is a plain value type. Classification into tangent,
//! coincident or "through the center" cases uses an explicit tolerance
//! passed by the caller (normally [`crate::Tolerances::geo`]).

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector at angle `theta` from the positive x axis.
    #[inline]
    pub fn unit(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { x: c, y: s }
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z component of the 3D cross product.
    #[inline]
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Rotation by +90 degrees.
    #[inline]
    pub fn perp(self) -> Self {
        Self { x: -self.y, y: self.x }
    }

    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        self + (other - self) * t
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl Div<f64> for Point {
    type Output = Point;
    #[inline]
    fn div(self, k: f64) -> Point {
        Point::new(self.x / k, self.y / k)
    }
}

/// A circle stored as center and radius.
///
/// The power function `f(x) = |x - c|^2 - r^2` is expanded on demand as
/// `x·x + ℓ(x) + A` with `ℓ(x) = -2 c·x` and `A = |c|^2 - r^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::InvalidInput("circle center must be finite".into()));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidInput(format!(
                "circle radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self { center, radius })
    }

    /// Recover a circle from its power coefficients: `x·x + linear·x + constant`.
    pub fn from_power_coefficients(linear: Point, constant: f64) -> Result<Self> {
        let center = linear * -0.5;
        let r2 = center.norm_sq() - constant;
        if !(r2 > 0.0) {
            return Err(Error::ImaginaryMember { squared_radius: r2 });
        }
        Circle::new(center, r2.sqrt())
    }

    /// Power of `p`: negative inside, zero on the circle, positive outside.
    #[inline]
    pub fn power(&self, p: Point) -> f64 {
        let d = p - self.center;
        // (|d| - r)(|d| + r) loses less than |d|^2 - r^2 close to the circle
        let n = d.norm();
        (n - self.radius) * (n + self.radius)
    }

    /// Coefficient vector of the linear form ℓ(x) = -2 c·x.
    #[inline]
    pub fn linear_coefficients(&self) -> Point {
        self.center * -2.0
    }

    /// Constant term A = |c|^2 - r^2.
    #[inline]
    pub fn constant_term(&self) -> f64 {
        self.center.norm_sq() - self.radius * self.radius
    }

    #[inline]
    pub fn point_at(&self, theta: f64) -> Point {
        self.center + Point::unit(theta) * self.radius
    }

    #[inline]
    pub fn angle_of(&self, p: Point) -> f64 {
        (p - self.center).angle()
    }

    pub fn to_quadric(&self) -> Quadric {
        let l = self.linear_coefficients();
        Quadric::new(1.0, 0.0, 1.0, l.x, l.y, self.constant_term())
    }

    /// Distance in (center, radius) space.
    pub fn parameter_distance(&self, other: &Circle) -> f64 {
        self.center
            .distance(other.center)
            .max((self.radius - other.radius).abs())
    }

    /// Whether the closed disk of `self` lies in the closed disk of `other`, up to `eps`.
    pub fn inside(&self, other: &Circle, eps: f64) -> bool {
        self.center.distance(other.center) + self.radius <= other.radius + eps
    }
}

/// A line `normal · x = offset` with a unit normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub normal: Point,
    pub offset: f64,
}

impl Line {
    pub fn new(normal: Point, offset: f64) -> Result<Self> {
        let n = normal.norm();
        if !(n > 0.0 && n.is_finite() && offset.is_finite()) {
            return Err(Error::InvalidInput("line normal must be nonzero and finite".into()));
        }
        Ok(Self {
            normal: normal / n,
            offset: offset / n,
        })
    }

    pub fn through(a: Point, b: Point) -> Result<Self> {
        let dir = b - a;
        if dir.norm() == 0.0 {
            return Err(Error::InvalidInput("line through two equal points".into()));
        }
        let normal = dir.perp() / dir.norm();
        Ok(Self {
            normal,
            offset: normal.dot(a),
        })
    }

    #[inline]
    pub fn signed_distance(&self, p: Point) -> f64 {
        self.normal.dot(p) - self.offset
    }

    #[inline]
    pub fn distance(&self, p: Point) -> f64 {
        self.signed_distance(p).abs()
    }

    /// Unit direction vector, the normal rotated by +90 degrees.
    #[inline]
    pub fn direction(&self) -> Point {
        self.normal.perp()
    }

    /// Orthogonal projection of `p` onto the line.
    pub fn foot(&self, p: Point) -> Point {
        p - self.normal * self.signed_distance(p)
    }

    /// Same line with the orientation of the normal flipped.
    pub fn flipped(&self) -> Line {
        Line {
            normal: -self.normal,
            offset: -self.offset,
        }
    }
}

/// General conic `a11 x² + 2 a12 x y + a22 y² + b1 x + b2 y + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadric {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
    pub b1: f64,
    pub b2: f64,
    pub c: f64,
}

impl Quadric {
    pub const fn new(a11: f64, a12: f64, a22: f64, b1: f64, b2: f64, c: f64) -> Self {
        Self {
            a11,
            a12,
            a22,
            b1,
            b2,
            c,
        }
    }

    pub fn from_coefficients(k: [f64; 6]) -> Self {
        Self::new(k[0], k[1], k[2], k[3], k[4], k[5])
    }

    pub fn coefficients(&self) -> [f64; 6] {
        [self.a11, self.a12, self.a22, self.b1, self.b2, self.c]
    }

    /// The square of the affine function `normal·x - offset` (a double line).
    pub fn double_line(l: &Line) -> Self {
        let (n, d) = (l.normal, l.offset);
        Self::new(n.x * n.x, n.x * n.y, n.y * n.y, -2.0 * d * n.x, -2.0 * d * n.y, d * d)
    }

    /// Product of two affine forms `(p·x + p0)(q·x + q0)`.
    pub fn product_of_affine(p: Point, p0: f64, q: Point, q0: f64) -> Self {
        Self::new(
            p.x * q.x,
            0.5 * (p.x * q.y + p.y * q.x),
            p.y * q.y,
            p.x * q0 + q.x * p0,
            p.y * q0 + q.y * p0,
            p0 * q0,
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients().iter().all(|&k| k == 0.0)
    }

    #[inline]
    pub fn eval(&self, p: Point) -> f64 {
        let (x, y) = (p.x, p.y);
        self.a11 * x * x + 2.0 * self.a12 * x * y + self.a22 * y * y + self.b1 * x + self.b2 * y + self.c
    }

    pub fn gradient(&self, p: Point) -> Point {
        Point::new(
            2.0 * self.a11 * p.x + 2.0 * self.a12 * p.y + self.b1,
            2.0 * self.a12 * p.x + 2.0 * self.a22 * p.y + self.b2,
        )
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::from_coefficients(self.coefficients().map(|v| v * k))
    }

    pub fn add(&self, other: &Quadric) -> Self {
        let (a, b) = (self.coefficients(), other.coefficients());
        Self::from_coefficients(std::array::from_fn(|i| a[i] + b[i]))
    }

    /// `self - k * other`
    pub fn sub_scaled(&self, k: f64, other: &Quadric) -> Self {
        let (a, b) = (self.coefficients(), other.coefficients());
        Self::from_coefficients(std::array::from_fn(|i| a[i] - k * b[i]))
    }

    pub fn coefficient_norm(&self) -> f64 {
        self.coefficients().iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Unit coefficient norm, sign fixed so the largest-magnitude coefficient is positive.
    pub fn normalized(&self) -> Self {
        let n = self.coefficient_norm();
        if n == 0.0 {
            return *self;
        }
        let k = self.coefficients();
        let lead = k
            .iter()
            .copied()
            .fold(0.0_f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
        self.scale(lead.signum() / n)
    }

    /// Distance between two quadrics viewed as projective points: the max
    /// coefficient difference after normalizing both.
    pub fn distance_up_to_scale(&self, other: &Quadric) -> f64 {
        let (a, b) = (self.normalized().coefficients(), other.normalized().coefficients());
        let plus = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let minus = a.iter().zip(&b).map(|(x, y)| (x + y).abs()).fold(0.0, f64::max);
        plus.min(minus)
    }

    /// Coefficients `(a, b, c)` of `s ↦ q(p0 + s u)` where `p0` is the foot of the
    /// origin on the line and `u` its unit direction.
    pub fn restrict_to_line(&self, l: &Line) -> (f64, f64, f64) {
        let p0 = l.normal * l.offset;
        let u = l.direction();
        let a = self.a11 * u.x * u.x + 2.0 * self.a12 * u.x * u.y + self.a22 * u.y * u.y;
        let b = self.gradient(p0).dot(u);
        let c = self.eval(p0);
        (a, b, c)
    }

    /// Discriminant `b² - 4ac` of the restriction to `l`, computed on the
    /// unit-norm representative of `self`. Zero iff the line is tangent,
    /// positive for a secant line, negative when the line misses the conic.
    pub fn line_tangency_residual(&self, l: &Line) -> Result<f64> {
        let (a, b, c) = self.normalized().restrict_to_line(l);
        if a == 0.0 && b == 0.0 {
            return Err(Error::DegenerateRestriction);
        }
        Ok(b * b - 4.0 * a * c)
    }

    /// Quadratic part is a nonzero multiple of `x² + y²`.
    pub fn is_circle_type(&self, eps: f64) -> bool {
        let scale = self.coefficient_norm().max(f64::MIN_POSITIVE);
        self.a12.abs() <= eps * scale && (self.a11 - self.a22).abs() <= eps * scale && self.a11.abs() > eps * scale
    }

    /// Discriminant of the quadratic part, `a11 a22 - a12²` (positive for ellipses).
    pub fn quadratic_discriminant(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    /// Center of a central conic, if the quadratic part is invertible.
    pub fn center(&self) -> Option<Point> {
        let det = self.quadratic_discriminant();
        if det == 0.0 {
            return None;
        }
        // 2 A x = -b
        let x = (-self.b1 * self.a22 + self.b2 * self.a12) / (2.0 * det);
        let y = (-self.b2 * self.a11 + self.b1 * self.a12) / (2.0 * det);
        Some(Point::new(x, y))
    }
}

/// Orientation of the triangle `a b c`: `+1` counterclockwise, `-1` clockwise,
/// `0` only for exactly collinear points (adaptive exact arithmetic).
pub fn orientation(a: Point, b: Point, c: Point) -> i8 {
    let det = robust::orient2d(
        robust::Coord { x: a.x, y: a.y },
        robust::Coord { x: b.x, y: b.y },
        robust::Coord { x: c.x, y: c.y },
    );
    if det > 0.0 {
        1
    } else if det < 0.0 {
        -1
    } else {
        0
    }
}

/// All real intersection points of two circles. Tangent circles (within
/// `eps`) yield a single point; coincident circles are an error.
///
/// For two points the first one lies to the left of the ray from `a`'s
/// center towards `b`'s center.
pub fn circle_circle_intersection(a: &Circle, b: &Circle, eps: f64) -> Result<Vec<Point>> {
    let delta = b.center - a.center;
    let d = delta.norm();
    if d <= eps {
        if (a.radius - b.radius).abs() <= eps {
            return Err(Error::CoincidentCircles);
        }
        return Ok(Vec::new());
    }
    let outer = d - (a.radius + b.radius);
    let inner = (a.radius - b.radius).abs() - d;
    if outer > eps || inner > eps {
        return Ok(Vec::new());
    }
    let e = delta / d;
    let along = (d * d + a.radius * a.radius - b.radius * b.radius) / (2.0 * d);
    if outer.abs() <= eps || inner.abs() <= eps {
        return Ok(vec![a.center + e * along]);
    }
    let h2 = a.radius * a.radius - along * along;
    let h = h2.max(0.0).sqrt();
    let base = a.center + e * along;
    Ok(vec![base + e.perp() * h, base - e.perp() * h])
}

/// Image of a circle under an inversion: a circle, or a line when the
/// circle passes through the inversion center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Curve {
    Circle(Circle),
    Line(Line),
}

/// Inversion `x ↦ c + k (x - c) / |x - c|²` with nonzero power `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inversion {
    pub center: Point,
    pub power: f64,
}

impl Inversion {
    pub fn new(center: Point, power: f64) -> Result<Self> {
        if !(power.is_finite() && power != 0.0 && center.is_finite()) {
            return Err(Error::InvalidInput("inversion power must be finite and nonzero".into()));
        }
        Ok(Self { center, power })
    }

    /// Image of a point; the center itself has no finite image.
    pub fn map_point(&self, p: Point) -> Option<Point> {
        let d = p - self.center;
        let n2 = d.norm_sq();
        if n2 == 0.0 {
            return None;
        }
        Some(self.center + d * (self.power / n2))
    }

    pub fn invert_circle(&self, c: &Circle, eps: f64) -> Curve {
        let d = c.center - self.center;
        let dn = d.norm();
        // power of the inversion center with respect to c
        let s = (dn - c.radius) * (dn + c.radius);
        if (dn - c.radius).abs() <= eps {
            let normal = d / dn;
            return Curve::Line(Line {
                normal,
                offset: normal.dot(self.center) + self.power / (2.0 * dn),
            });
        }
        Curve::Circle(Circle {
            center: self.center + d * (self.power / s),
            radius: (self.power * c.radius / s).abs(),
        })
    }

    pub fn invert_line(&self, l: &Line, eps: f64) -> Curve {
        let h = l.offset - l.normal.dot(self.center);
        if h.abs() <= eps {
            return Curve::Line(*l);
        }
        Curve::Circle(Circle {
            center: self.center + l.normal * (self.power / (2.0 * h)),
            radius: (self.power / (2.0 * h)).abs(),
        })
    }

    pub fn invert_curve(&self, curve: &Curve, eps: f64) -> Curve {
        match curve {
            Curve::Circle(c) => self.invert_circle(c, eps),
            Curve::Line(l) => self.invert_line(l, eps),
        }
    }
}
