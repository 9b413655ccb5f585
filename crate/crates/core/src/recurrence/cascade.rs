use crate::cocycles::{birkhoff_scan, StepCocycle};
use crate::error::{LabError, Result};
use crate::precision::{CirclePoint, FixedReal, Threshold};
use crate::systems::BaseMap;

use super::records::{EventTime, ReturnRecord};

fn zero_record(n: u64, point: &CirclePoint, x: &CirclePoint) -> ReturnRecord {
    ReturnRecord {
        time: EventTime::Step(n),
        value: FixedReal::zero(),
        distance: Some(point.distance(x).to_fixed()),
        in_set: None,
    }
}

/// `find_zero_sums`: every `n <= n_max` with `S_n(x) = 0`.
pub fn find_zero_sums(
    s: &BaseMap,
    f: &StepCocycle,
    x: CirclePoint,
    n_max: u64,
) -> Result<Vec<ReturnRecord>> {
    let mut out = Vec::new();
    for step in birkhoff_scan(s, f, x, n_max)? {
        let step = step?;
        if step.sum == 0 {
            out.push(zero_record(step.n, &step.point, &x));
        }
    }
    Ok(out)
}

/// `near_returns`: every `n <= n_max` with `d(S^n x, x) < eps`.
pub fn near_returns(s: &BaseMap, x: CirclePoint, n_max: u64, eps: &FixedReal) -> Result<Vec<u64>> {
    let threshold = Threshold::new(eps)?;
    let mut out = Vec::new();
    for (n, p) in s.orbit(x).enumerate().skip(1).take(n_max as usize) {
        let n = n as u64;
        match p?.distance(&x).below(&threshold) {
            Some(true) => out.push(n),
            Some(false) => {}
            None => return Err(LabError::PrecisionExhausted { step: Some(n) }),
        }
    }
    Ok(out)
}

/// `joint_zero_returns`: zero sums that are also `eps`-near returns.
pub fn joint_zero_returns(
    s: &BaseMap,
    f: &StepCocycle,
    x: CirclePoint,
    n_max: u64,
    eps: &FixedReal,
) -> Result<Vec<ReturnRecord>> {
    let threshold = Threshold::new(eps)?;
    let mut out = Vec::new();
    for step in birkhoff_scan(s, f, x, n_max)? {
        let step = step?;
        if step.sum != 0 {
            continue;
        }
        match step.point.distance(&x).below(&threshold) {
            Some(true) => out.push(zero_record(step.n, &step.point, &x)),
            Some(false) => {}
            None => return Err(LabError::PrecisionExhausted { step: Some(step.n) }),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::AngleSpec;

    fn rot(p: i64, q: i64) -> BaseMap {
        BaseMap::rotation(AngleSpec::rational(p, q).unwrap())
    }

    fn times(r: &[ReturnRecord]) -> Vec<u64> {
        r.iter().map(|r| r.time.as_step().unwrap()).collect()
    }

    fn fx(s: &str) -> FixedReal {
        s.parse().unwrap()
    }

    #[test]
    fn zero_sum_examples() {
        let f = StepCocycle::plus_minus_half();
        let r = find_zero_sums(&rot(1, 2), &f, CirclePoint::ZERO, 10).unwrap();
        assert_eq!(times(&r), [2, 4, 6, 8, 10]);
        assert!(r.iter().all(|r| r.distance == Some(FixedReal::zero())));
        let r = find_zero_sums(&rot(1, 2), &StepCocycle::zero(), CirclePoint::ZERO, 5).unwrap();
        assert_eq!(times(&r), [1, 2, 3, 4, 5]);
        let r = find_zero_sums(&rot(1, 3), &f, CirclePoint::ZERO, 100).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn near_return_examples() {
        let x = CirclePoint::parse("0.2").unwrap();
        assert_eq!(near_returns(&rot(1, 3), x, 10, &fx("1e-9")).unwrap(), [3, 6, 9]);
        let golden = BaseMap::rotation(AngleSpec::golden());
        let n = near_returns(&golden, CirclePoint::ZERO, 100, &fx("0.01")).unwrap();
        assert!(n.contains(&55) && n.contains(&89));
        assert_eq!(near_returns(&golden, x, 7, &fx("1")).unwrap(), [1, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn joint_examples() {
        let f = StepCocycle::plus_minus_half();
        let r = joint_zero_returns(&rot(1, 2), &f, CirclePoint::ZERO, 10, &fx("1e-9")).unwrap();
        assert_eq!(times(&r), [2, 4, 6, 8, 10]);
        let r = joint_zero_returns(&rot(1, 3), &StepCocycle::zero(), CirclePoint::ZERO, 10, &fx("1e-9"))
            .unwrap();
        assert_eq!(times(&r), [3, 6, 9]);
    }
}
