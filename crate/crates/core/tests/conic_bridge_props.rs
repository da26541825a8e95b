mod common;

use common::{circle, nested_strategy, random_nested};
use emch::conic_bridge::{
    derive_poncelet_quadric, double_line_member, equivalence_witness, equivalent_pencil, quadric_to_circle_pair,
    resolve_poncelet_quadric, series_chords, series_poncelet_quadric, verify_prop1_prime, Cyclic,
};
use emch::measure::ratio_spread;
use emch::{CircularSeries, Direction, Point, Quadric, Scene, TangencyIndex, Tolerances};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

proptest! {
    #[test]
    fn product_cyclic_is_product_of_powers(scene in nested_strategy(), x in -5.0f64..5.0, y in -5.0f64..5.0) {
        let f = Cyclic::from_circles(&scene.alpha0, &scene.alpha1);
        let p = Point::new(x, y);
        let direct = scene.alpha0.power(p) * scene.alpha1.power(p);
        prop_assert!((f.eval(p) - direct).abs() <= 1e-12 * direct.abs().max(f.condition(p) * direct.abs()));
    }

    #[test]
    fn pencil_members_are_equivalent(scene in nested_strategy(), a_p in -20.0f64..20.0) {
        let f = Cyclic::from_circles(&scene.alpha0, &scene.alpha1);
        let w = equivalence_witness(&f, &scene.delta, a_p, 50);
        prop_assert!(w.spread <= 1e-10, "{w:?}");
        let pencil = equivalent_pencil(&f, &scene.delta).unwrap();
        prop_assert!(pencil.quadric(a_p).distance_up_to_scale(&w.q) <= 1e-14);
    }

    #[test]
    fn bridge_measures_agree(scene in nested_strategy(), a_p in -20.0f64..20.0) {
        let f = Cyclic::from_circles(&scene.alpha0, &scene.alpha1);
        let q = equivalent_pencil(&f, &scene.delta).unwrap().quadric(a_p);
        let r = ratio_spread(&scene.delta, 100, |x| 1.0 / f.eval(x).abs().sqrt(), |x| 1.0 / q.eval(x).abs().sqrt());
        prop_assert!(r.spread <= 1e-10, "{r:?}");
    }

    #[test]
    fn doubly_tangent_circles(scene in nested_strategy(), theta in 0.0f64..TAU) {
        let f = Cyclic::from_circles(&scene.alpha0, &scene.alpha1);
        let Ok(found) = scene.circles_at(theta) else { return Ok(()) };
        for omega in found {
            let r = verify_prop1_prime(&f, &omega.circle, omega.touch0, omega.touch1, 64).unwrap();
            prop_assert!(r.max_relative_deviation <= 1e-9, "{r:?}");
            let d = double_line_member(&f, &omega.circle, omega.touch0, omega.touch1).unwrap();
            prop_assert!(d.residual <= 1e-9, "{d:?}");
        }
    }
}

#[test]
fn lambda_zero_cyclic_still_gives_pencil() {
    let q = Quadric::new(1.0, 0.2, 2.0, -0.3, 0.1, -1.0);
    let f = Cyclic::from_quadric(q).unwrap();
    let delta = circle(0.1, -0.2, 1.3);
    for a_p in [-2.0, 0.0, 3.0] {
        assert!(equivalence_witness(&f, &delta, a_p, 50).spread <= 1e-10);
    }
}

fn nested_series(rng: &mut ChaCha8Rng, steps: usize) -> CircularSeries {
    let scene = random_nested(rng);
    let omega = scene.start_circle_near(rng.gen_range(0.0..TAU)).unwrap();
    let mut s = CircularSeries::start(scene, omega, Direction::Ccw).unwrap();
    s.extend(steps - 1).unwrap();
    s
}

#[test]
fn poncelet_quadric_touches_every_chord() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let series = nested_series(&mut rng, 40);
        let s = &series.scene;
        let g = series_poncelet_quadric(&series).unwrap();
        let chords = series_chords(&series).unwrap();
        for l in &chords {
            assert!(g.quadric.line_tangency_residual(l).unwrap().abs() <= 1e-8);
        }
        for k in [5, 17, 33] {
            let other = resolve_poncelet_quadric(&s.alpha0, &s.alpha1, &s.delta, &chords[k..]).unwrap();
            assert!(other.quadric.distance_up_to_scale(&g.quadric) <= 1e-8);
        }
    }
}

#[test]
fn steiner_scene_quadric_is_classified() {
    // δ in the pencil {α₀, α₁}: every member of the equivalent pencil is a circle
    let (a0, a1) = (circle(0.0, 0.0, 1.0), circle(0.0, 0.0, 3.0));
    let delta = circle(0.0, 0.0, 5f64.sqrt());
    let chord = emch::Line::new(Point::new(1.0, 0.0), 1.9).unwrap();
    match derive_poncelet_quadric(&a0, &a1, &delta, &chord) {
        Ok(p) => assert!(p.quadric.is_circle_type(1e-12)),
        Err(e) => panic!("{e:?}"),
    }
}

#[test]
fn round_trip_through_circle_pair() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..5 {
        let series = nested_series(&mut rng, 6);
        let g = series_poncelet_quadric(&series).unwrap();
        let fit = quadric_to_circle_pair(&g.quadric, &series.scene.delta).unwrap();
        assert!(fit.round_trip <= 1e-8);
    }
}

#[test]
fn ellipse_chords_after_two_hundred_steps() {
    let delta = circle(0.0, 0.0, 2.0);
    let (a, b, cx) = (0.9, 0.8, -0.2);
    let gamma = Quadric::new(
        1.0 / (a * a),
        0.0,
        1.0 / (b * b),
        -2.0 * cx / (a * a),
        0.0,
        cx * cx / (a * a) - 1.0,
    );
    let fit = quadric_to_circle_pair(&gamma, &delta).unwrap();
    let scene = Scene::new(fit.alpha0, fit.alpha1, delta, TangencyIndex::One, Tolerances::default()).unwrap();
    let omega = scene.start_circle_near(0.7).unwrap();
    let mut s = CircularSeries::start(scene, omega, Direction::Ccw).unwrap();
    s.extend(199).unwrap();
    for l in series_chords(&s).unwrap() {
        assert!(gamma.line_tangency_residual(&l).unwrap().abs() <= 1e-7);
    }
    assert!(matches!(
        quadric_to_circle_pair(&delta.to_quadric(), &delta),
        Err(emch::Error::NoRealPair)
    ));
}

#[test]
fn near_touch_samples_do_not_spoil_prop1_prime() {
    let scene = Scene::new(
        circle(0.4476415457304835, 1.261858045117508, 0.5852082114230123),
        circle(0.4855172218323105, 1.500259732721378, 3.2036571988485534),
        circle(0.6161502215525037, 1.7744881030137316, 1.2815723356504096),
        TangencyIndex::One,
        Tolerances::default(),
    )
    .unwrap();
    let f = Cyclic::from_circles(&scene.alpha0, &scene.alpha1);
    for omega in scene.circles_at(4.698301264920689).unwrap() {
        let r = verify_prop1_prime(&f, &omega.circle, omega.touch0, omega.touch1, 64).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.used >= 56, "{r:?}");
    }
}
