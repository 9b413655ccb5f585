mod common;

use common::*;
use ergolab::cocycles::{birkhoff_sum, sigma_eval, sigma_trig, PhaseFunction, StepCocycle, TrigPolynomial};
use ergolab::precision::{AngleSpec, CirclePoint, FixedReal};
use ergolab::recurrence::{
    find_zero_sums, flow_zero_near_returns, flow_zero_set_returns, joint_zero_returns,
    weiss_estimate, winding_zero_near_returns, EventTime, TargetSet,
};
use ergolab::systems::{BaseMap, Roof, SpecialFlowState, TorusPoint, TorusWinding};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn golden() -> BaseMap {
    BaseMap::rotation(AngleSpec::golden())
}

#[test]
fn detectors_agree_with_orbit_tables() {
    let bad = rational_oracle_mismatches(12, 2_000, 2, 21);
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn zero_sum_records_reverify_and_close_under_the_cocycle() {
    let s = golden();
    let f = StepCocycle::plus_minus_half();
    let x = cp("0.1");
    let recs = find_zero_sums(&s, &f, x, 600).unwrap();
    assert!(recs.len() > 10);
    let times: Vec<u64> = recs.iter().map(|r| r.time.as_step().unwrap()).collect();
    for &n in &times {
        assert_eq!(birkhoff_sum(&s, &f, x, n).unwrap(), 0);
    }
    let orbit: Vec<CirclePoint> = s.orbit(x).take(601).map(|p| p.unwrap()).collect();
    for (i, &n1) in times.iter().enumerate() {
        for &n2 in &times[i + 1..] {
            assert_eq!(birkhoff_sum(&s, &f, orbit[n1 as usize], n2 - n1).unwrap(), 0, "{n1} {n2}");
        }
    }
}

#[test]
fn longer_runs_only_add_records() {
    let s = golden();
    let f = StepCocycle::plus_minus_half();
    let short = find_zero_sums(&s, &f, cp("0.3"), 10_000).unwrap();
    let long = find_zero_sums(&s, &f, cp("0.3"), 100_000).unwrap();
    assert_eq!(&long[..short.len()], &short[..]);

    let roof = Roof::constant(fx("1"), golden()).unwrap();
    let pf = PhaseFunction::plus_minus_half(&roof).unwrap();
    let x = SpecialFlowState::new(cp("0.1"), fx("0"));
    let short = flow_zero_near_returns(&roof, &pf, &x, &fx("1000"), &fx("0.2")).unwrap();
    let long = flow_zero_near_returns(&roof, &pf, &x, &fx("5000"), &fx("0.2")).unwrap();
    assert!(!short.is_empty());
    assert_eq!(&long[..short.len()], &short[..]);
}

#[test]
fn flow_records_reverify() {
    let roof = Roof::new(vec![CirclePoint::ZERO, cp("0.5")], vec![fx("1"), fx("2")], golden()).unwrap();
    let pf = PhaseFunction::base_step(&roof, vec![CirclePoint::ZERO, cp("0.5")], vec![fx("2"), fx("-1")]).unwrap();
    let x = SpecialFlowState::new(cp("0.1"), fx("0"));
    let target = TargetSet::intervals(vec![(fx("0"), fx("0.5"))]).unwrap();
    let recs = flow_zero_set_returns(&roof, &pf, &x, &fx("2000"), &target).unwrap();
    assert!(!recs.is_empty());
    for r in &recs {
        let EventTime::Flow(t) = &r.time else { panic!("flow time expected") };
        assert!(sigma_eval(&roof, &pf, &x, t).unwrap().is_certainly_zero());
        let (state, _) = roof.flow(&x, t).unwrap();
        assert!(target.contains_state(&state).unwrap());
    }
}

#[test]
fn winding_records_reverify() {
    let w = TorusWinding::new(AngleSpec::sqrt2());
    let f = TrigPolynomial::cos_x();
    let p = TorusPoint::new(cp("0.1"), cp("0.2"));
    let recs = winding_zero_near_returns(&w, &f, &p, 500.0, &fx("0.1"), None).unwrap();
    assert!(!recs.is_empty());
    for r in &recs {
        let t = r.time.to_fixed().to_f64();
        assert!(sigma_trig(&w, &f, &p, t).unwrap().abs() <= 1e-9);
    }
}

#[test]
fn joint_return_distances_shrink() {
    let s = golden();
    let f = StepCocycle::plus_minus_half();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let x = CirclePoint::random(&mut rng);
        let recs = joint_zero_returns(&s, &f, x, 1_000_000, &fx("0.5")).unwrap();
        let mut last: Option<FixedReal> = None;
        for n in [10_000u64, 100_000, 1_000_000] {
            let best = recs
                .iter()
                .filter(|r| r.time.as_step().unwrap() <= n)
                .filter_map(|r| r.distance.clone())
                .min_by(|a, b| a.mantissa().cmp(b.mantissa()));
            if let (Some(prev), Some(cur)) = (&last, &best) {
                assert!(cur.mantissa() <= prev.mantissa());
            }
            if best.is_some() {
                last = best;
            }
        }
        assert!(last.is_some());
    }
}

#[test]
fn weiss_is_non_increasing_for_golden() {
    let pts = weiss_estimate(&golden(), &StepCocycle::plus_minus_half(), &[100, 1000, 10_000], 0.05, 300, 2).unwrap();
    for w in pts.windows(2) {
        assert!(w[1].probability <= w[0].probability);
    }
    assert_eq!(pts.last().unwrap().probability, 0.0);
}
