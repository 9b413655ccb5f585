//! The special flow under a piecewise-constant roof.
//!
//! A phase point `(a, b)` rises with unit speed; on reaching the roof
//! `(a, r(a))` it is glued to `(P(a), 0)`. Heights follow the half-open
//! convention `0 <= b < r(a)`, so a point arriving exactly at the roof is
//! already on the next floor.

use std::cmp::Ordering;

use super::BaseMap;
use crate::error::{LabError, Result};
use crate::precision::{CircleDistance, CirclePoint, FixedReal};

/// Default cap on roof crossings within a single evolution.
pub const DEFAULT_CROSSING_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Roof {
    starts: Vec<CirclePoint>,
    heights: Vec<FixedReal>,
    base: BaseMap,
    crossing_budget: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpecialFlowState {
    pub a: CirclePoint,
    pub b: FixedReal,
}

impl SpecialFlowState {
    pub fn new(a: CirclePoint, b: FixedReal) -> Self {
        SpecialFlowState { a, b }
    }

    pub fn floor(a: CirclePoint) -> Self {
        SpecialFlowState::new(a, FixedReal::zero())
    }

    /// Product-chart distance `max(circle distance of bases, |Δheight|)`.
    pub fn distance(&self, other: &SpecialFlowState) -> FixedReal {
        let base = self.a.distance(&other.a).to_fixed();
        let height = (&self.b - &other.b).abs();
        match height.certain_cmp(&base) {
            Some(Ordering::Greater) => height,
            Some(_) => base,
            None => {
                // Take the larger stored value with the combined error.
                let err = base.err_ulps().max(height.err_ulps());
                if height.mantissa() > base.mantissa() {
                    height.with_err(err)
                } else {
                    base.with_err(err)
                }
            }
        }
    }

    pub fn base_distance(&self, other: &SpecialFlowState) -> CircleDistance {
        self.a.distance(&other.a)
    }
}

impl Roof {
    /// `starts` are the left ends of the base cells (first must be 0),
    /// `heights` the positive roof value on each cell.
    pub fn new(starts: Vec<CirclePoint>, heights: Vec<FixedReal>, base: BaseMap) -> Result<Self> {
        validate_partition(&starts)?;
        if heights.len() != starts.len() {
            return Err(LabError::invalid("one roof height per cell required"));
        }
        if heights
            .iter()
            .any(|h| h.certain_sign() != Some(Ordering::Greater))
        {
            return Err(LabError::invalid("roof heights must be positive"));
        }
        base.warn_if_not_ergodic("special flow base");
        Ok(Roof {
            starts,
            heights,
            base,
            crossing_budget: DEFAULT_CROSSING_BUDGET,
        })
    }

    /// Roof of constant height over the whole base.
    pub fn constant(height: FixedReal, base: BaseMap) -> Result<Self> {
        Roof::new(vec![CirclePoint::ZERO], vec![height], base)
    }

    pub fn with_crossing_budget(mut self, budget: u64) -> Self {
        self.crossing_budget = budget;
        self
    }

    pub fn crossing_budget(&self) -> u64 {
        self.crossing_budget
    }

    pub fn cell_starts(&self) -> &[CirclePoint] {
        &self.starts
    }

    pub fn heights(&self) -> &[FixedReal] {
        &self.heights
    }

    pub fn base(&self) -> &BaseMap {
        &self.base
    }

    pub fn height_at(&self, a: &CirclePoint) -> Result<&FixedReal> {
        Ok(&self.heights[a.locate(&self.starts)?])
    }

    /// Cell lengths, the last one closing the circle at 1.
    pub fn cell_lengths(&self) -> Vec<FixedReal> {
        cell_lengths(&self.starts)
    }

    /// `∫ r`, the total area under the roof.
    pub fn area(&self) -> FixedReal {
        self.cell_lengths()
            .iter()
            .zip(&self.heights)
            .fold(FixedReal::zero(), |acc, (l, h)| &acc + &l.mul(h))
    }

    /// Checks `0 <= b < r(a)`.
    pub fn contains(&self, s: &SpecialFlowState) -> Result<bool> {
        let h = self.height_at(&s.a)?;
        let nonneg = match s.b.certain_sign() {
            Some(o) => o != Ordering::Less,
            None => return Err(LabError::precision()),
        };
        let below = match s.b.certain_cmp(h) {
            Some(o) => o == Ordering::Less,
            None => return Err(LabError::precision()),
        };
        Ok(nonneg && below)
    }

    /// Flow `s` for time `t`, returning the new state and the number of roof
    /// crossings.
    pub fn flow(&self, s: &SpecialFlowState, t: &FixedReal) -> Result<(SpecialFlowState, u64)> {
        if t.certain_sign() == Some(Ordering::Less) {
            return Err(LabError::invalid("flow time must be non-negative"));
        }
        let mut a = s.a;
        let mut b = s.b.clone();
        let mut remaining = t.clone();
        let mut crossings = 0u64;
        loop {
            let h = self.height_at(&a).map_err(|e| e.at_step(crossings))?;
            let to_roof = h - &b;
            match remaining.certain_cmp(&to_roof) {
                Some(Ordering::Less) => {
                    b = (&b + &remaining).checked()?;
                    return Ok((SpecialFlowState { a, b }, crossings));
                }
                Some(_) => {
                    if crossings >= self.crossing_budget {
                        return Err(LabError::CrossingBudgetExceeded);
                    }
                    remaining = (&remaining - &to_roof).checked()?;
                    a = self.base.apply(&a).map_err(|e| e.at_step(crossings))?;
                    b = FixedReal::zero();
                    crossings += 1;
                }
                None => return Err(LabError::PrecisionExhausted { step: Some(crossings) }),
            }
        }
    }
}

/// `special_flow_step`: evolve `s` for time `t` under the roof.
pub fn special_flow_step(
    roof: &Roof,
    s: &SpecialFlowState,
    t: &FixedReal,
) -> Result<(SpecialFlowState, u64)> {
    roof.flow(s, t)
}

pub(crate) fn validate_partition(starts: &[CirclePoint]) -> Result<()> {
    match starts.first() {
        Some(first) if *first == CirclePoint::ZERO => {}
        _ => return Err(LabError::invalid("cell starts must begin with an exact 0")),
    }
    for w in starts.windows(2) {
        if w[0].certain_cmp(&w[1]) != Some(Ordering::Less) {
            return Err(LabError::invalid("cell starts must be strictly increasing"));
        }
    }
    Ok(())
}

pub(crate) fn cell_lengths(starts: &[CirclePoint]) -> Vec<FixedReal> {
    let one = FixedReal::one();
    starts
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let end = starts.get(i + 1).map(|e| e.to_fixed()).unwrap_or_else(|| one.clone());
            &end - &s.to_fixed()
        })
        .collect()
}
