//! First-return maps of a cascade to a set `A`, the induced cocycle and the
//! Kac and zero-mean checks.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cocycles::StepCocycle;
use crate::error::{LabError, Result};
use crate::precision::CirclePoint;
use crate::recurrence::TargetSet;
use crate::stats::MeanAccumulator;
use crate::systems::BaseMap;

pub const DEFAULT_RETURN_BUDGET: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InducedSample {
    pub x: CirclePoint,
    /// First return time `n(x)`.
    pub n: u64,
    pub return_point: CirclePoint,
    /// `Σ_{i<n(x)} f(S^i x)`.
    pub f_tilde: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InducedStats {
    pub samples: u64,
    /// Samples without a return inside the budget; excluded from the means.
    pub censored: u64,
    pub measure: f64,
    pub mean_return_time: f64,
    pub return_time_se: f64,
    pub mean_f_tilde: f64,
    pub f_tilde_se: f64,
    /// `E[n]·μ(A)`, which Kac's formula puts at 1.
    pub kac_ratio: f64,
    pub kac_ratio_se: f64,
}

/// `induce_point`: the first return of `x ∈ A` to `A` and the induced
/// cocycle value.
pub fn induce_point(
    s: &BaseMap,
    f: &StepCocycle,
    a: &TargetSet,
    x: CirclePoint,
    budget: u64,
) -> Result<InducedSample> {
    if budget == 0 {
        return Err(LabError::invalid("return budget must be positive"));
    }
    if !a.contains_point(&x)? {
        return Err(LabError::OutsideTarget);
    }
    let mut sum = 0i64;
    let mut orbit = s.orbit(x);
    let mut current = orbit.next().expect("orbit is infinite")?;
    for n in 1..=budget {
        sum += f.eval_int(&current).map_err(|e| e.at_step(n - 1))?;
        current = orbit.next().expect("orbit is infinite")?;
        if a.contains_point(&current).map_err(|e| e.at_step(n))? {
            return Ok(InducedSample {
                x,
                n,
                return_point: current,
                f_tilde: sum,
            });
        }
    }
    Err(LabError::ReturnBudgetExceeded)
}

/// Monte Carlo over uniform points of `A`, keeping the raw samples.
pub fn induced_sampling(
    s: &BaseMap,
    f: &StepCocycle,
    a: &TargetSet,
    samples: u64,
    seed: u64,
    budget: u64,
) -> Result<(InducedStats, Vec<InducedSample>)> {
    if samples < 100 {
        return Err(LabError::invalid("at least 100 samples required"));
    }
    s.warn_if_not_ergodic("induced map");
    let measure = a.base_measure().to_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n_acc = MeanAccumulator::default();
    let mut f_acc = MeanAccumulator::default();
    let mut censored = 0;
    let mut raw = Vec::with_capacity(samples as usize);
    for _ in 0..samples {
        let x = loop {
            let x = CirclePoint::random(&mut rng);
            if a.contains_point(&x)? {
                break x;
            }
        };
        match induce_point(s, f, a, x, budget) {
            Ok(sample) => {
                n_acc.push(sample.n as f64);
                f_acc.push(sample.f_tilde as f64);
                raw.push(sample);
            }
            Err(LabError::ReturnBudgetExceeded) => censored += 1,
            Err(e) => return Err(e),
        }
    }
    if n_acc.count() == 0 {
        return Err(LabError::ReturnBudgetExceeded);
    }
    let stats = InducedStats {
        samples,
        censored,
        measure,
        mean_return_time: n_acc.mean(),
        return_time_se: n_acc.standard_error(),
        mean_f_tilde: f_acc.mean(),
        f_tilde_se: f_acc.standard_error(),
        kac_ratio: n_acc.mean() * measure,
        kac_ratio_se: n_acc.standard_error() * measure,
    };
    Ok((stats, raw))
}

/// `induced_checks` with the default return budget.
pub fn induced_checks(
    s: &BaseMap,
    f: &StepCocycle,
    a: &TargetSet,
    samples: u64,
    seed: u64,
) -> Result<InducedStats> {
    Ok(induced_sampling(s, f, a, samples, seed, DEFAULT_RETURN_BUDGET)?.0)
}

/// CSV `x,n,return_point,f_tilde`.
pub fn write_induced_samples<W: Write>(w: W, samples: &[InducedSample], digits: u32) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let io = |e: csv::Error| LabError::Invalid(format!("csv: {e}"));
    out.write_record(["x", "n", "return_point", "f_tilde"]).map_err(io)?;
    for s in samples {
        out.write_record([
            s.x.to_fixed().to_decimal(digits),
            s.n.to_string(),
            s.return_point.to_fixed().to_decimal(digits),
            s.f_tilde.to_string(),
        ])
        .map_err(io)?;
    }
    out.flush().map_err(|e| LabError::Invalid(format!("csv: {e}")))?;
    Ok(())
}
