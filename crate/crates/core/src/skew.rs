//! Skew products `R(x, y) = (Sx, T^{n(x)} y)` over a zero-mean integer
//! cocycle `n`.

use serde::Serialize;

use crate::cocycles::StepCocycle;
use crate::error::{LabError, Result};
use crate::precision::{CirclePoint, FixedReal};
use crate::recurrence::TargetSet;
use crate::stats::MeanAccumulator;
use crate::systems::BaseMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewSystem {
    base: BaseMap,
    fiber: BaseMap,
    n: StepCocycle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ProductState {
    pub x: CirclePoint,
    pub y: CirclePoint,
}

impl ProductState {
    pub fn new(x: CirclePoint, y: CirclePoint) -> Self {
        ProductState { x, y }
    }
}

/// The indicator of `X × Y` for unions of half-open intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rectangle {
    pub x: TargetSet,
    pub y: TargetSet,
}

impl Rectangle {
    pub fn new(x: (FixedReal, FixedReal), y: (FixedReal, FixedReal)) -> Result<Self> {
        Ok(Rectangle {
            x: TargetSet::intervals(vec![x])?,
            y: TargetSet::intervals(vec![y])?,
        })
    }

    pub fn whole() -> Self {
        Rectangle {
            x: TargetSet::whole(),
            y: TargetSet::whole(),
        }
    }

    pub fn contains(&self, s: &ProductState) -> Result<bool> {
        Ok(self.x.contains_point(&s.x)? && self.y.contains_point(&s.y)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeAverage {
    pub mean: f64,
    pub standard_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkewStats {
    pub steps: u64,
    pub averages: Vec<TimeAverage>,
    /// `Σ n(x_i)` over the orbit: the net number of fiber steps.
    pub displacement: i64,
    pub final_state: ProductState,
}

impl SkewSystem {
    pub fn new(base: BaseMap, fiber: BaseMap, n: StepCocycle) -> Result<Self> {
        if !n.is_integer() {
            return Err(LabError::invalid("the fiber exponent must be integer-valued"));
        }
        base.warn_if_not_ergodic("skew product base");
        Ok(SkewSystem { base, fiber, n })
    }

    pub fn base(&self) -> &BaseMap {
        &self.base
    }

    pub fn fiber(&self) -> &BaseMap {
        &self.fiber
    }

    pub fn exponent(&self) -> &StepCocycle {
        &self.n
    }

    fn fiber_move(&self, x: &CirclePoint, y: &CirclePoint) -> Result<(i64, CirclePoint)> {
        let k = self.n.eval_int(x)?;
        Ok((k, self.fiber.apply_power(y, k)?))
    }
}

/// `skew_step`: `(Sx, T^{n(x)} y)`.
pub fn skew_step(r: &SkewSystem, s: &ProductState) -> Result<ProductState> {
    let (_, y) = r.fiber_move(&s.x, &s.y)?;
    Ok(ProductState::new(r.base.apply(&s.x)?, y))
}

/// `skew_orbit_stats`: time averages of indicator observables over
/// `s0, R s0, ..., R^{N−1} s0`, with i.i.d. standard errors.
pub fn skew_orbit_stats(
    r: &SkewSystem,
    s0: &ProductState,
    steps: u64,
    observables: &[Rectangle],
) -> Result<SkewStats> {
    if steps == 0 {
        return Err(LabError::invalid("at least one step required"));
    }
    let mut acc = vec![MeanAccumulator::default(); observables.len()];
    let mut base = r.base.orbit(s0.x);
    let mut x = base.next().expect("orbit is infinite")?;
    let mut y = s0.y;
    let mut displacement = 0i64;
    for i in 0..steps {
        let s = ProductState::new(x, y);
        for (a, obs) in acc.iter_mut().zip(observables) {
            let hit = obs.contains(&s).map_err(|e| e.at_step(i))?;
            a.push(if hit { 1.0 } else { 0.0 });
        }
        let (k, ny) = r.fiber_move(&x, &y).map_err(|e| e.at_step(i))?;
        displacement += k;
        y = ny;
        x = base.next().expect("orbit is infinite")?;
    }
    Ok(SkewStats {
        steps,
        averages: acc
            .iter()
            .map(|a| TimeAverage {
                mean: a.mean(),
                standard_error: a.standard_error(),
            })
            .collect(),
        displacement,
        final_state: ProductState::new(x, y),
    })
}
