#![allow(dead_code)]

use emch::{Circle, Point, Scene, TangencyIndex, Tolerances};
use proptest::prelude::*;
use rand::Rng;

pub fn circle(x: f64, y: f64, r: f64) -> Circle {
    Circle::new(Point::new(x, y), r).unwrap()
}

/// α₀ inside δ inside α₁, with margins proportional to δ.
pub fn nested_from(u: [f64; 8]) -> (Circle, Circle, Circle) {
    let r = 1.0 + u[0];
    let delta = circle(4.0 * u[1] - 2.0, 4.0 * u[2] - 2.0, r);
    let c0 = delta.center + Point::unit(6.0 * u[3]) * (0.45 * r * u[4]);
    let r0 = (r - c0.distance(delta.center)) * (0.2 + 0.6 * u[5]);
    let c1 = delta.center + Point::unit(6.0 * u[6]) * (0.45 * r * u[7]);
    let r1 = (r + c1.distance(delta.center)) * (1.2 + 1.3 * u[5].mul_add(0.5, 0.5 * u[0]));
    (circle(c0.x, c0.y, r0), circle(c1.x, c1.y, r1), delta)
}

pub fn random_nested<R: Rng>(rng: &mut R) -> Scene {
    let u: [f64; 8] = std::array::from_fn(|_| rng.gen_range(0.0..1.0));
    let (a0, a1, d) = nested_from(u);
    Scene::new(a0, a1, d, TangencyIndex::One, Tolerances::default()).unwrap()
}

pub fn nested_strategy() -> impl Strategy<Value = Scene> {
    proptest::array::uniform8(0.0f64..1.0).prop_map(|u| {
        let (a0, a1, d) = nested_from(u);
        Scene::new(a0, a1, d, TangencyIndex::One, Tolerances::default()).unwrap()
    })
}

pub fn concentric_1_3() -> Scene {
    Scene::new(
        circle(0.0, 0.0, 1.0),
        circle(0.0, 0.0, 3.0),
        circle(0.0, 0.0, 3f64.sqrt()),
        TangencyIndex::One,
        Tolerances::default(),
    )
    .unwrap()
}
