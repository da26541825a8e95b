use emch::geometry::{circle_circle_intersection, orientation, Curve};
use emch::{Circle, Inversion, Point};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Point> {
    (-10.0f64..10.0, -10.0f64..10.0).prop_map(|(x, y)| Point::new(x, y))
}

fn circle() -> impl Strategy<Value = Circle> {
    (point(), 0.1f64..5.0).prop_map(|(c, r)| Circle::new(c, r).unwrap())
}

proptest! {
    #[test]
    fn power_vanishes_on_circle(c in circle(), theta in 0.0f64..std::f64::consts::TAU) {
        let p = c.point_at(theta);
        prop_assert!(c.power(p).abs() <= 1e-12 * (c.radius * c.radius + p.norm_sq()));
        let off = c.center + Point::unit(theta) * (1.5 * c.radius);
        prop_assert!(c.power(off) > 0.0);
    }

    #[test]
    fn inversion_is_involution(c in circle(), center in point(), k in 0.5f64..4.0) {
        prop_assume!((c.center.distance(center) - c.radius).abs() > 0.05);
        let inv = Inversion::new(center, k).unwrap();
        let Curve::Circle(once) = inv.invert_circle(&c, 1e-12) else { return Err(TestCaseError::fail("line image")) };
        let Curve::Circle(twice) = inv.invert_circle(&once, 1e-12) else { return Err(TestCaseError::fail("line image")) };
        let scale = 1.0 + c.center.norm() + c.radius;
        prop_assert!(twice.center.distance(c.center) <= 1e-10 * scale);
        prop_assert!((twice.radius - c.radius).abs() <= 1e-10 * scale);
    }

    #[test]
    fn intersections_lie_on_both(a in circle(), b in circle()) {
        if let Ok(points) = circle_circle_intersection(&a, &b, 1e-12) {
            for p in points {
                let s = 1.0 + p.norm_sq() + a.center.norm_sq() + b.center.norm_sq();
                prop_assert!(a.power(p).abs() <= 1e-10 * s);
                prop_assert!(b.power(p).abs() <= 1e-10 * s);
            }
        }
    }

    #[test]
    fn orientation_antisymmetric(a in point(), b in point(), c in point()) {
        let o = orientation(a, b, c);
        prop_assert_eq!(orientation(b, a, c), -o);
        prop_assert_eq!(orientation(a, c, b), -o);
        prop_assert_eq!(orientation(c, b, a), -o);
        prop_assert_eq!(orientation(b, c, a), o);
    }
}
