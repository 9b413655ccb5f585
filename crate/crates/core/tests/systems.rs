mod common;

use common::{cp, fx};
use ergolab::precision::{AngleSpec, CirclePoint, FixedReal, U192};
use ergolab::stats::{flattened_histogram_check, grid_counts, roof_cell_probabilities};
use ergolab::systems::{
    iet_apply, rotation_apply, special_flow_step, BaseMap, CircleRotation, IntervalExchange, Roof,
    SpecialFlowState,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn two_step_roof() -> Roof {
    Roof::new(
        vec![CirclePoint::ZERO, cp("0.5")],
        vec![fx("1"), fx("1.5")],
        BaseMap::rotation(AngleSpec::golden()),
    )
    .unwrap()
}

fn dyadic_time(k: u32) -> FixedReal {
    FixedReal::from_ratio_i64(k as i64, 1024).unwrap()
}

fn point(hi: u64, lo: u128) -> CirclePoint {
    CirclePoint::new(U192::from_parts(hi, lo), 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn flow_semigroup(hi in any::<u64>(), lo in any::<u128>(), b in 0u32..1024, t in 0u32..20_000, u in 0u32..20_000) {
        let roof = two_step_roof();
        let a = point(hi, lo);
        let s = SpecialFlowState::new(a, dyadic_time(b));
        let (t, u) = (dyadic_time(t), dyadic_time(u));
        let (whole, n_whole) = special_flow_step(&roof, &s, &(&t + &u)).unwrap();
        let (mid, n1) = special_flow_step(&roof, &s, &t).unwrap();
        let (end, n2) = special_flow_step(&roof, &mid, &u).unwrap();
        prop_assert_eq!(n_whole, n1 + n2);
        prop_assert_eq!(whole.a.bits(), end.a.bits());
        prop_assert_eq!(whole.b.mantissa(), end.b.mantissa());
    }

    #[test]
    fn swap_exchange_is_a_rotation(hi in any::<u64>(), lo in any::<u128>(), k in 1u32..1024) {
        let beta = FixedReal::from_ratio_i64(k as i64, 1024).unwrap();
        let iet = IntervalExchange::two_interval_swap(beta.clone()).unwrap();
        let rot = CircleRotation::new(AngleSpec::rational(1024 - k as i64, 1024).unwrap_or_else(|_| {
            let g = num_integer::gcd(1024 - k as i64, 1024);
            AngleSpec::rational((1024 - k as i64) / g, 1024 / g).unwrap()
        }));
        let p = point(hi, lo);
        prop_assert_eq!(iet_apply(&iet, &p).unwrap().bits(), rotation_apply(&rot, &p).unwrap().bits());
    }
}

const SAMPLES: usize = 100_000;
const CONFIDENCE: f64 = 0.999;

fn uniform(rng: &mut ChaCha8Rng) -> CirclePoint {
    CirclePoint::random(rng)
}

fn circle_histogram(map: &BaseMap, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<CirclePoint> = (0..SAMPLES).map(|_| uniform(&mut rng)).collect();
    let ys: Vec<CirclePoint> = xs.iter().map(|x| map.apply(x).unwrap()).collect();
    let expected = vec![1.0 / 20.0; 20];
    for pts in [&xs, &ys] {
        let counts = grid_counts(pts.iter().map(|p| (p.to_f64(), 0.0)), 20, 1, 1.0);
        let check = flattened_histogram_check(&counts, &expected, CONFIDENCE);
        assert!(check.passed, "{check:?}");
    }
}

#[test]
fn rotation_preserves_lebesgue() {
    circle_histogram(&BaseMap::rotation(AngleSpec::golden()), 1);
}

#[test]
fn exchange_preserves_lebesgue() {
    let iet = IntervalExchange::new(vec![fx("0.25"), fx("0.375"), fx("0.375")], vec![2, 0, 1]).unwrap();
    circle_histogram(&BaseMap::Exchange(iet), 2);
}

#[test]
fn special_flow_preserves_area() {
    let roof = two_step_roof();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let y_max = 1.5;
    let t = fx("0.75");
    let mut images = Vec::with_capacity(SAMPLES);
    while images.len() < SAMPLES {
        let a = uniform(&mut rng);
        let b = uniform(&mut rng).to_fixed().mul(&fx("1.5"));
        let s = SpecialFlowState::new(a, b);
        if !roof.contains(&s).unwrap() {
            continue;
        }
        let (img, _) = special_flow_step(&roof, &s, &t).unwrap();
        images.push((img.a.to_f64(), img.b.to_f64()));
    }
    let counts = grid_counts(images, 20, 20, y_max);
    let expected = roof_cell_probabilities(&roof, 20, 20, y_max);
    let check = flattened_histogram_check(&counts, &expected, CONFIDENCE);
    assert!(check.passed, "{check:?}");
}

#[test]
fn histogram_rejects_a_non_preserving_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let squashed = (0..SAMPLES).map(|_| {
        let x = uniform(&mut rng).to_f64();
        (x * x, 0.0)
    });
    let counts = grid_counts(squashed, 20, 1, 1.0);
    assert!(!flattened_histogram_check(&counts, &vec![0.05; 20], CONFIDENCE).passed);
}
