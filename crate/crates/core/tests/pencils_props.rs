mod common;

use std::f64::consts::{PI, TAU};

use common::{circle, concentric_1_3, nested_strategy, random_nested};
use emch::measure::CarrierMeasure;
use emch::pencils::{
    chord_fixed_member, diagonal_fixed_circle, parallel_fixed_circle, pencil_member, run_generalized_series,
    verify_prop3, PairSequence, Pencil, PencilMember,
};
use emch::series::run_series;
use emch::tangency::{contact_kind, tangent_circles_through_point};
use emch::{Circle, CircularSeries, Direction, Point, TangencyIndex, Tolerances};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn member_matches_combination(scene in nested_strategy(), t in -3.0f64..3.0, theta in 0.0f64..TAU) {
        let (a, b) = (scene.alpha0, scene.alpha1);
        let pencil = Pencil::of_circles(&a, &b).unwrap();
        let x = Point::new(theta.cos() * 3.0, theta.sin() * 2.0);
        let direct = (1.0 - t) * a.power(x) + t * b.power(x);
        match pencil_member(&pencil, t, 1e-12) {
            Ok(PencilMember::Circle { circle }) => {
                prop_assert!((circle.power(x) - direct).abs() <= 1e-12 * (1.0 + direct.abs() + x.norm_sq()));
            }
            Ok(PencilMember::PointCircle { point }) => {
                prop_assert!(((x - point).norm_sq() - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
            }
            Ok(other) => prop_assert!(false, "{other:?}"),
            Err(_) => {}
        }
    }

    #[test]
    fn prop3_ratio_is_constant(scene in nested_strategy(), t in proptest::array::uniform4(0.3f64..1.0)) {
        let seq = PairSequence::new(
            scene.delta,
            scene.alpha0,
            scene.alpha1,
            vec![1.0, t[0], t[1]],
            vec![1.0, 1.0 + t[2], 1.0 + t[3]],
        )
        .unwrap();
        let r = verify_prop3(&seq, 100).unwrap();
        prop_assert!(r.max_spread <= 1e-10, "{r:?}");
        prop_assert!(r.max_identity_error <= 1e-10, "{r:?}");
    }
}

fn concentric_pair(big_r: f64, psi: f64, r0: f64) -> (Circle, Circle) {
    let c = psi.cos() * big_r;
    let r1 = (big_r * big_r - c * r0) / (c - r0);
    (circle(0.0, 0.0, r0), circle(0.0, 0.0, r1))
}

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn verdicts(seq: &PairSequence, pairs: &[(Circle, Circle)], seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..10 {
        let theta = rng.gen_range(0.0..TAU);
        for order in PERMUTATIONS {
            let first = pairs[order[0]];
            let p = seq.delta.point_at(theta);
            let omega = tangent_circles_through_point(&first.0, &first.1, p, TangencyIndex::One, 1e-9).unwrap()[0];
            let (_, rep) = run_generalized_series(seq, &omega, &order, Direction::Ccw, Tolerances::default()).unwrap();
            out.push(rep.closed);
        }
    }
    out
}

#[test]
fn generalized_closure_is_order_free() {
    let delta = circle(0.0, 0.0, 2.0);
    // step angles π/2, 2π/3 and 5π/6 sum to 2π
    let closing = [
        concentric_pair(2.0, PI / 4.0, 1.0),
        concentric_pair(2.0, PI / 3.0, 0.5),
        concentric_pair(2.0, 5.0 * PI / 12.0, 0.3),
    ];
    let seq = PairSequence::from_pairs(delta, &closing, 1e-9).unwrap();
    assert!(verdicts(&seq, &closing, 1).iter().all(|&c| c));

    let open = [
        concentric_pair(2.0, PI / 4.0, 1.0),
        concentric_pair(2.0, 0.9, 0.5),
        concentric_pair(2.0, 5.0 * PI / 12.0, 0.3),
    ];
    let seq = PairSequence::from_pairs(delta, &open, 1e-9).unwrap();
    assert!(verdicts(&seq, &open, 2).iter().all(|&c| !c));
}

#[test]
fn identical_pairs_reduce_to_plain_series() {
    let scene = concentric_1_3();
    let pair = (scene.alpha0, scene.alpha1);
    let seq = PairSequence::from_pairs(scene.delta, &[pair; 6], 1e-9).unwrap();
    let omega = scene.start_circle_near(0.2).unwrap();
    let (steps, rep) =
        run_generalized_series(&seq, &omega, &[0, 1, 2, 3, 4, 5], Direction::Ccw, Tolerances::default()).unwrap();
    let (plain, _) = run_series(scene, omega, Direction::Ccw, 6).unwrap();
    assert!(rep.closed);
    for (a, b) in steps.iter().zip(&plain.steps) {
        assert!(a.omega.circle.parameter_distance(&b.omega.circle) <= 1e-9);
    }
}

#[test]
fn diagonals_touch_one_member() {
    let scene = concentric_1_3();
    let omega = scene.start_circle_near(0.4).unwrap();
    let (mut series, _) = run_series(scene, omega, Direction::Ccw, 6).unwrap();
    series.extend(6).unwrap();
    let d1 = diagonal_fixed_circle(&series, 1, None).unwrap();
    assert!((d1.parameter - 1.0).abs() <= 1e-9);
    for r in [2, 3] {
        let d = diagonal_fixed_circle(&series, r, None).unwrap();
        assert!(d.spread <= 1e-8, "{d:?}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let scene = random_nested(&mut rng);
        let omega = scene.start_circle_near(rng.gen_range(0.0..TAU)).unwrap();
        let mut series = CircularSeries::start(scene, omega, Direction::Ccw).unwrap();
        series.extend(9).unwrap();
        for r in [1, 2] {
            let d = diagonal_fixed_circle(&series, r, None).unwrap();
            assert!(d.spread <= 1e-8, "r={r} {d:?}");
        }
    }
}

#[test]
fn long_diagonals_use_the_complementary_arc() {
    // rotation number near 0.3, so second-order diagonals span more than half of δ
    let scene = emch::Scene::new(
        circle(0.4, 0.2, 1.0),
        circle(-0.3, 0.0, 12.0),
        circle(0.0, 0.0, 3.0),
        TangencyIndex::One,
        Tolerances::default(),
    )
    .unwrap();
    let omega = scene.start_circle_near(1.1).unwrap();
    let mut series = CircularSeries::start(scene, omega, Direction::Ccw).unwrap();
    series.extend(8).unwrap();
    for r in [2, 3, 4] {
        let d = diagonal_fixed_circle(&series, r, None).unwrap();
        let PencilMember::Circle { circle: member } = d.member else {
            panic!("r={r} {:?}", d.member);
        };
        for c in &d.circles {
            assert!(emch::tangency::tangency_residual(c, &member) <= 1e-9, "r={r}");
        }
    }
}

#[test]
fn parallel_series_chords_touch_one_member() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..5 {
        let scene = random_nested(&mut rng);
        let theta = rng.gen_range(0.0..TAU);
        let a0 = scene.start_circle_near(theta).unwrap();
        let mut a = CircularSeries::start(scene, a0, Direction::Ccw).unwrap();
        let b0 = scene.start_circle_near(theta + 0.3).unwrap();
        let mut b = CircularSeries::start(scene, b0, Direction::Ccw).unwrap();
        a.extend(7).unwrap();
        b.extend(7).unwrap();
        let fit = parallel_fixed_circle(&a, &b, None).unwrap();
        assert!(fit.spread <= 1e-8, "{fit:?}");
    }
}

#[test]
fn equal_mass_chords_touch_one_member() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let scene = random_nested(&mut rng);
    let measure = CarrierMeasure::new(scene.density(), scene.delta, scene.tolerances).unwrap();
    let mass = 0.3 * measure.total().unwrap().value;
    let chords: Vec<(Point, Point)> = (0..50)
        .map(|_| {
            let start = rng.gen_range(0.0..TAU);
            let end = measure.angle_at_mass(start, mass, Direction::Ccw).unwrap();
            (scene.delta.point_at(start), scene.delta.point_at(end))
        })
        .collect();
    let omega = scene.start_circle_near(0.0).unwrap();
    let kind = contact_kind(&omega.circle, &scene.alpha0, 1e-9).unwrap();
    let fit = chord_fixed_member(&scene, &chords, Direction::Ccw, kind, true, None).unwrap();
    assert!(fit.spread <= 1e-8, "{fit:?}");
}
