use std::io::Write;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cocycles::{birkhoff_scan, StepCocycle};
use crate::error::{LabError, Result};
use crate::precision::{CirclePoint, FixedReal, SCALE_BITS};
use crate::systems::BaseMap;

#[derive(Clone, Debug, PartialEq)]
pub struct WeissPoint {
    pub n: u64,
    pub exceed: u64,
    pub samples: u64,
    pub probability: f64,
}

/// Largest integer `k` with `k <= eps·n`, exact for the binary value of
/// `eps`.
fn floor_threshold(eps: &FixedReal, n: u64) -> Result<i64> {
    let v: BigInt = (eps.mantissa() * BigInt::from(n)) >> SCALE_BITS;
    v.to_i64().ok_or_else(|| LabError::invalid("threshold out of range"))
}

/// `weiss_estimate`: for each `n`, the share of uniform starting points with
/// `|S_n(x)| > eps·n`.
pub fn weiss_estimate(
    s: &BaseMap,
    f: &StepCocycle,
    n_list: &[u64],
    eps: f64,
    samples: u64,
    seed: u64,
) -> Result<Vec<WeissPoint>> {
    if samples < 100 {
        return Err(LabError::invalid("at least 100 samples required"));
    }
    if !(eps > 0.0) {
        return Err(LabError::invalid("eps must be positive"));
    }
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(LabError::invalid("n values must be positive"));
    }
    s.warn_if_not_ergodic("Weiss estimate");
    let eps = FixedReal::from_f64(eps)?;
    let mut ns: Vec<u64> = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let thresholds = ns
        .iter()
        .map(|&n| floor_threshold(&eps, n))
        .collect::<Result<Vec<_>>>()?;
    let n_max = *ns.last().unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut exceed = vec![0u64; ns.len()];
    for _ in 0..samples {
        let x = CirclePoint::random(&mut rng);
        let mut k = 0;
        for step in birkhoff_scan(s, f, x, n_max)? {
            let step = step?;
            if step.n == ns[k] {
                if step.sum.unsigned_abs() > thresholds[k].unsigned_abs() {
                    exceed[k] += 1;
                }
                k += 1;
            }
        }
    }
    Ok(ns
        .iter()
        .zip(exceed)
        .map(|(&n, e)| WeissPoint {
            n,
            exceed: e,
            samples,
            probability: e as f64 / samples as f64,
        })
        .collect())
}

/// CSV `n,probability`.
pub fn write_weiss<W: Write>(w: W, points: &[WeissPoint]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let io = |e: csv::Error| LabError::Invalid(format!("csv: {e}"));
    out.write_record(["n", "probability"]).map_err(io)?;
    for p in points {
        // exceed/samples as an exact decimal ratio
        let prob = FixedReal::from_ratio_i64(p.exceed as i64, p.samples as i64)?.to_decimal(12);
        out.write_record([p.n.to_string(), prob]).map_err(io)?;
    }
    out.flush().map_err(|e| LabError::Invalid(format!("csv: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::AngleSpec;

    #[test]
    fn zero_observable_never_exceeds() {
        let s = BaseMap::rotation(AngleSpec::golden());
        let w = weiss_estimate(&s, &StepCocycle::zero(), &[10, 100], 0.05, 100, 1).unwrap();
        assert!(w.iter().all(|p| p.probability == 0.0));
    }

    #[test]
    fn thresholds_are_exact() {
        let half = FixedReal::from_f64(0.5).unwrap();
        assert_eq!(floor_threshold(&half, 7).unwrap(), 3);
        assert_eq!(floor_threshold(&half, 8).unwrap(), 4);
        let eps = FixedReal::from_f64(0.05).unwrap();
        assert_eq!(floor_threshold(&eps, 1000).unwrap(), 50);
    }

    #[test]
    fn deterministic_and_sorted() {
        let s = BaseMap::rotation(AngleSpec::golden());
        let f = StepCocycle::plus_minus_half();
        let a = weiss_estimate(&s, &f, &[50, 10], 0.05, 200, 9).unwrap();
        let b = weiss_estimate(&s, &f, &[10, 50], 0.05, 200, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].n, 10);
        let mut buf = Vec::new();
        write_weiss(&mut buf, &a).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("n,probability\n10,"));
    }

    #[test]
    fn third_rotation_sums_grow_linearly() {
        let s = BaseMap::rotation(AngleSpec::rational(1, 3).unwrap());
        let f = StepCocycle::plus_minus_half();
        let w = weiss_estimate(&s, &f, &[300], 0.05, 300, 3).unwrap();
        assert_eq!(w[0].probability, 1.0);
    }
}
