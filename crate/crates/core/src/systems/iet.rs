use std::cmp::Ordering;

use num_traits::Zero;

use crate::error::{LabError, Result};
use crate::precision::{CirclePoint, FixedReal};

/// An interval exchange on `[0,1)`.
///
/// Interval `i` (in left-to-right order) is translated so that it occupies
/// position `permutation[i]` in the exchanged order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalExchange {
    lengths: Vec<FixedReal>,
    permutation: Vec<usize>,
    starts: Vec<CirclePoint>,
    shifts: Vec<CirclePoint>,
    image_starts: Vec<CirclePoint>,
    inverse_shifts: Vec<CirclePoint>,
}

impl IntervalExchange {
    /// `permutation` is 0-based: `permutation[i]` is the position of
    /// interval `i` after the exchange.
    pub fn new(lengths: Vec<FixedReal>, permutation: Vec<usize>) -> Result<Self> {
        let m = lengths.len();
        if m == 0 {
            return Err(LabError::invalid("interval exchange needs at least one interval"));
        }
        if permutation.len() != m {
            return Err(LabError::invalid("permutation length differs from interval count"));
        }
        let mut seen = vec![false; m];
        for &p in &permutation {
            if p >= m || seen[p] {
                return Err(LabError::invalid("permutation is not a bijection"));
            }
            seen[p] = true;
        }
        if lengths
            .iter()
            .any(|l| l.certain_sign() != Some(Ordering::Greater))
        {
            return Err(LabError::invalid("interval lengths must be positive"));
        }
        let total = lengths.iter().fold(FixedReal::zero(), |acc, l| &acc + l);
        if total.mantissa() != FixedReal::one().mantissa() {
            return Err(LabError::invalid("interval lengths must sum to exactly 1"));
        }

        let mut starts = Vec::with_capacity(m);
        let mut acc = FixedReal::zero();
        for l in &lengths {
            starts.push(acc.clone());
            acc = &acc + l;
        }
        // Position order: which interval sits at each slot after exchange.
        let mut by_position = vec![0usize; m];
        for (i, &p) in permutation.iter().enumerate() {
            by_position[p] = i;
        }
        let mut new_starts = vec![FixedReal::zero(); m];
        let mut acc = FixedReal::zero();
        for &i in &by_position {
            new_starts[i] = acc.clone();
            acc = &acc + &lengths[i];
        }
        let shifts = (0..m)
            .map(|i| CirclePoint::from_fixed(&(&new_starts[i] - &starts[i])))
            .collect();
        let image_starts = by_position
            .iter()
            .map(|&i| CirclePoint::from_fixed(&new_starts[i]))
            .collect();
        let inverse_shifts = by_position
            .iter()
            .map(|&i| CirclePoint::from_fixed(&(&starts[i] - &new_starts[i])))
            .collect();
        Ok(IntervalExchange {
            lengths,
            permutation,
            starts: starts.iter().map(CirclePoint::from_fixed).collect(),
            shifts,
            image_starts,
            inverse_shifts,
        })
    }

    /// Two intervals of lengths `(β, 1−β)` swapped.
    pub fn two_interval_swap(beta: FixedReal) -> Result<Self> {
        let rest = &FixedReal::one() - &beta;
        if beta.mantissa().is_zero() {
            return Err(LabError::invalid("beta must be positive"));
        }
        IntervalExchange::new(vec![beta, rest], vec![1, 0])
    }

    pub fn lengths(&self) -> &[FixedReal] {
        &self.lengths
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn cell_starts(&self) -> &[CirclePoint] {
        &self.starts
    }

    pub fn apply(&self, p: &CirclePoint) -> Result<CirclePoint> {
        let i = p.locate(&self.starts)?;
        p.add(&self.shifts[i])
    }

    pub fn apply_inverse(&self, p: &CirclePoint) -> Result<CirclePoint> {
        let i = p.locate(&self.image_starts)?;
        p.add(&self.inverse_shifts[i])
    }
}

/// `iet_apply`: translate `p` by the offset of its interval.
pub fn iet_apply(map: &IntervalExchange, p: &CirclePoint) -> Result<CirclePoint> {
    map.apply(p)
}
