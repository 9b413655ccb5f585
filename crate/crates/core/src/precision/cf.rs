//! Continued fractions of resolved angles.
//!
//! Partial quotients are read off the error interval of the resolved value:
//! a quotient is emitted only when both interval endpoints agree on it, so
//! every emitted quotient is correct for the true angle. The expansion stops
//! with "precision exhausted" once the interval becomes too wide.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::angle::AngleSpec;
use super::fixed::{unit, FixedReal, SCALE_BITS};
use crate::error::{LabError, Result};

/// A convergent `p/q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Convergent {
    pub p: BigInt,
    pub q: BigInt,
}

impl Convergent {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Self {
        Convergent {
            p: p.into(),
            q: q.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    partial_quotients: Vec<BigInt>,
    convergents: Vec<Convergent>,
}

impl ContinuedFraction {
    /// Builds convergents from partial quotients `a0, a1, ...` with the
    /// recurrence `p_k = a_k p_{k-1} + p_{k-2}`.
    pub fn from_quotients(partial_quotients: Vec<BigInt>) -> Self {
        let mut convergents = Vec::with_capacity(partial_quotients.len());
        let (mut p2, mut q2) = (BigInt::zero(), BigInt::one());
        let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
        for a in &partial_quotients {
            let p = a * &p1 + &p2;
            let q = a * &q1 + &q2;
            convergents.push(Convergent::new(p.clone(), q.clone()));
            p2 = std::mem::replace(&mut p1, p);
            q2 = std::mem::replace(&mut q1, q);
        }
        ContinuedFraction {
            partial_quotients,
            convergents,
        }
    }

    /// Expansion of `x` up to `k` terms, reading quotients off its error
    /// interval.
    pub fn of_interval(x: &FixedReal, k: usize) -> Result<Self> {
        let e = BigInt::from(x.err_ulps());
        // Endpoints as fractions num/den with den > 0.
        let mut lo = (x.mantissa() - &e, unit().clone());
        let mut hi = (x.mantissa() + &e, unit().clone());
        let mut quotients = Vec::with_capacity(k);
        while quotients.len() < k {
            let (a_lo, r_lo) = lo.0.div_mod_floor(&lo.1);
            let (a_hi, r_hi) = hi.0.div_mod_floor(&hi.1);
            if a_lo != a_hi || r_lo.is_zero() || r_hi.is_zero() {
                return Err(LabError::precision());
            }
            quotients.push(a_lo);
            // x -> 1/(x - a) reverses the order of the endpoints.
            let new_lo = (hi.1.clone(), r_hi);
            let new_hi = (lo.1.clone(), r_lo);
            lo = new_lo;
            hi = new_hi;
        }
        Ok(ContinuedFraction::from_quotients(quotients))
    }

    pub fn partial_quotients(&self) -> &[BigInt] {
        &self.partial_quotients
    }

    pub fn convergents(&self) -> &[Convergent] {
        &self.convergents
    }

    /// `p_k q_{k-1} - p_{k-1} q_k == (-1)^{k-1}` for every `k >= 1`.
    pub fn determinant_identity_holds(&self) -> bool {
        self.convergents.windows(2).enumerate().all(|(i, w)| {
            let k = i + 1;
            let det = &w[1].p * &w[0].q - &w[0].p * &w[1].q;
            let expected = if k % 2 == 1 { BigInt::one() } else { -BigInt::one() };
            det == expected
        })
    }
}

/// The first `k` convergents of an irrational angle.
pub fn cf_convergents(alpha: &AngleSpec, k: usize) -> Result<Vec<Convergent>> {
    if alpha.is_rational() {
        return Err(LabError::Terminates);
    }
    if k == 0 {
        return Err(LabError::invalid("need at least one convergent"));
    }
    let cf = ContinuedFraction::of_interval(alpha.resolved(), k)?;
    debug_assert!(cf.determinant_identity_holds());
    Ok(cf.convergents)
}

/// `|q·α − p|` evaluated in fixed point, with its error bound.
pub fn convergent_gap(alpha: &FixedReal, c: &Convergent) -> FixedReal {
    let gap = (alpha.mantissa() * &c.q - (&c.p << SCALE_BITS)).abs();
    let err = BigInt::from(alpha.err_ulps()) * c.q.abs();
    FixedReal::new(gap, err.to_u64().unwrap_or(u64::MAX))
}
