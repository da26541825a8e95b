#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use emch::{Circle, Point, Scene, TangencyIndex, Tolerances};
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

pub fn concentric(r0: f64, r1: f64, r: f64) -> Scene {
    Scene::new(
        circle(0.0, 0.0, r0),
        circle(0.0, 0.0, r1),
        circle(0.0, 0.0, r),
        TangencyIndex::One,
        Tolerances::default(),
    )
    .unwrap()
}

pub const CLOSING_SCENE: &str = r#"{
  "alpha0": {"center": [0, 0], "radius": 1},
  "alpha1": {"center": [0, 0], "radius": 3},
  "delta": {"center": [0, 0], "radius": 1.7320508075688772},
  "start": {"angle": 0.3}
}"#;

pub const OFFSET_SCENE: &str = r#"{
  "alpha0": {"center": [0.4, 0.2], "radius": 1},
  "alpha1": {"center": [-0.3, 0], "radius": 12},
  "delta": {"center": [0, 0], "radius": 3},
  "start": {"angle": 1.1},
  "pencil": {"t0": [1, 0.8, 0.6], "t1": [1, 1.1, 0.9]}
}"#;

pub fn write_scene(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

pub fn emch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emch"))
        .args(args)
        .env_remove("EMCH_TOLERANCE_PROFILE")
        .output()
        .unwrap()
}
