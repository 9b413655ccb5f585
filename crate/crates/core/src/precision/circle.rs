//! Points of the circle `[0,1)` stored as 192-bit fractions.
//!
//! Addition modulo one is plain wrapping addition of the fraction bits, which
//! keeps long orbit scans allocation free.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;

use super::fixed::{unit, FixedReal, MAX_ERR_ULPS};
use crate::error::{LabError, Result};

/// Unsigned 192-bit integer, ordered by value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct U192 {
    hi: u64,
    lo: u128,
}

impl U192 {
    pub const ZERO: U192 = U192 { hi: 0, lo: 0 };
    pub const MAX: U192 = U192 {
        hi: u64::MAX,
        lo: u128::MAX,
    };
    /// 2^191, the value one half.
    pub const HALF: U192 = U192 {
        hi: 1 << 63,
        lo: 0,
    };

    pub const fn from_parts(hi: u64, lo: u128) -> Self {
        U192 { hi, lo }
    }

    pub fn wrapping_add(self, o: U192) -> U192 {
        let (lo, carry) = self.lo.overflowing_add(o.lo);
        U192 {
            hi: self.hi.wrapping_add(o.hi).wrapping_add(carry as u64),
            lo,
        }
    }

    pub fn wrapping_sub(self, o: U192) -> U192 {
        let (lo, borrow) = self.lo.overflowing_sub(o.lo);
        U192 {
            hi: self.hi.wrapping_sub(o.hi).wrapping_sub(borrow as u64),
            lo,
        }
    }

    pub fn wrapping_neg(self) -> U192 {
        U192::ZERO.wrapping_sub(self)
    }

    pub fn checked_add_small(self, e: u64) -> Option<U192> {
        let (lo, carry) = self.lo.overflowing_add(e as u128);
        let hi = self.hi.checked_add(carry as u64)?;
        Some(U192 { hi, lo })
    }

    pub fn checked_sub_small(self, e: u64) -> Option<U192> {
        let (lo, borrow) = self.lo.overflowing_sub(e as u128);
        let hi = self.hi.checked_sub(borrow as u64)?;
        Some(U192 { hi, lo })
    }

    pub fn saturating_add_small(self, e: u64) -> U192 {
        self.checked_add_small(e).unwrap_or(U192::MAX)
    }

    pub fn saturating_sub_small(self, e: u64) -> U192 {
        self.checked_sub_small(e).unwrap_or(U192::ZERO)
    }

    /// Residue of `v` modulo 2^192.
    pub fn from_bigint_mod(v: &BigInt) -> U192 {
        let r = v.mod_floor(unit());
        let lo_mask = (BigInt::from(1u8) << 128u32) - 1u8;
        let lo = (&r & &lo_mask).to_u128().unwrap_or(0);
        let hi = (r >> 128u32).to_u64().unwrap_or(0);
        U192 { hi, lo }
    }

    pub fn to_bigint(self) -> BigInt {
        (BigInt::from(self.hi) << 128u32) + BigInt::from(self.lo)
    }

    /// Value as a fraction of one.
    pub fn to_f64(self) -> f64 {
        self.hi as f64 * 2f64.powi(-64) + self.lo as f64 * 2f64.powi(-192)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> U192 {
        U192 {
            hi: rng.gen(),
            lo: rng.gen(),
        }
    }
}

/// Order of two error intervals `[a-ea, a+ea]` and `[b-eb, b+eb]` on the
/// non-wrapping line; `Equal` only for identical exact values.
pub(crate) fn interval_cmp(a: U192, ea: u64, b: U192, eb: u64) -> Option<Ordering> {
    if ea == 0 && eb == 0 {
        return Some(a.cmp(&b));
    }
    match (a.checked_add_small(ea), b.checked_sub_small(eb)) {
        (Some(a_hi), Some(b_lo)) if a_hi < b_lo => return Some(Ordering::Less),
        _ => {}
    }
    match (a.checked_sub_small(ea), b.checked_add_small(eb)) {
        (Some(a_lo), Some(b_hi)) if a_lo > b_hi => Some(Ordering::Greater),
        _ => None,
    }
}

/// A point of the circle `[0,1)` with an additive error bound in ulps of
/// 2^-192.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CirclePoint {
    bits: U192,
    err_ulps: u64,
}

impl CirclePoint {
    pub const ZERO: CirclePoint = CirclePoint {
        bits: U192::ZERO,
        err_ulps: 0,
    };

    pub fn new(bits: U192, err_ulps: u64) -> Self {
        CirclePoint { bits, err_ulps }
    }

    pub fn bits(&self) -> U192 {
        self.bits
    }

    pub fn err_ulps(&self) -> u64 {
        self.err_ulps
    }

    pub fn is_exact(&self) -> bool {
        self.err_ulps == 0
    }

    /// Reduce a real modulo one.
    pub fn from_fixed(x: &FixedReal) -> Self {
        CirclePoint {
            bits: U192::from_bigint_mod(x.mantissa()),
            err_ulps: x.err_ulps(),
        }
    }

    pub fn to_fixed(&self) -> FixedReal {
        FixedReal::new(self.bits.to_bigint(), self.err_ulps)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let x: FixedReal = s.parse()?;
        if x.certain_sign() == Some(Ordering::Less) || x.certain_cmp(&FixedReal::one()) != Some(Ordering::Less)
        {
            return Err(LabError::invalid(format!("circle point {s} not in [0,1)")));
        }
        Ok(CirclePoint::from_fixed(&x))
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        Ok(CirclePoint::from_fixed(&FixedReal::from_ratio_i64(num, den)?))
    }

    pub fn to_f64(&self) -> f64 {
        self.bits.to_f64()
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        CirclePoint::new(U192::random(rng), 0)
    }

    fn combine_err(a: u64, b: u64) -> Result<u64> {
        match a.checked_add(b) {
            Some(e) if e <= MAX_ERR_ULPS => Ok(e),
            _ => Err(LabError::precision()),
        }
    }

    /// `{self + other}`.
    pub fn add(&self, other: &CirclePoint) -> Result<CirclePoint> {
        Ok(CirclePoint {
            bits: self.bits.wrapping_add(other.bits),
            err_ulps: Self::combine_err(self.err_ulps, other.err_ulps)?,
        })
    }

    /// `{self - other}`.
    pub fn sub(&self, other: &CirclePoint) -> Result<CirclePoint> {
        Ok(CirclePoint {
            bits: self.bits.wrapping_sub(other.bits),
            err_ulps: Self::combine_err(self.err_ulps, other.err_ulps)?,
        })
    }

    /// Circle distance `min(|a-b|, 1-|a-b|)`, a value in `[0, 1/2]`.
    pub fn distance(&self, other: &CirclePoint) -> CircleDistance {
        let d = self.bits.wrapping_sub(other.bits);
        let nd = d.wrapping_neg();
        CircleDistance {
            bits: d.min(nd),
            err_ulps: self.err_ulps.saturating_add(other.err_ulps),
        }
    }

    /// Index of the half-open cell `[starts[i], starts[i+1])` holding this
    /// point, where `starts[0]` is zero and the last cell ends at one.
    ///
    /// Fails with "precision exhausted" when the error interval of the point
    /// straddles a cell boundary, including the wrap point 0 ≡ 1.
    pub fn locate(&self, starts: &[CirclePoint]) -> Result<usize> {
        let cells = starts.len();
        if cells <= 1 {
            return Ok(0);
        }
        let i = starts.partition_point(|s| s.bits <= self.bits).saturating_sub(1);
        // Lower edge: certain p >= starts[i].
        let lower_ok = if i == 0 {
            self.bits.checked_sub_small(self.err_ulps).is_some()
        } else {
            matches!(
                interval_cmp(self.bits, self.err_ulps, starts[i].bits, starts[i].err_ulps),
                Some(Ordering::Greater | Ordering::Equal)
            )
        };
        let upper_ok = if i + 1 == cells {
            self.bits.checked_add_small(self.err_ulps).is_some()
        } else {
            interval_cmp(self.bits, self.err_ulps, starts[i + 1].bits, starts[i + 1].err_ulps)
                == Some(Ordering::Less)
        };
        if lower_ok && upper_ok {
            Ok(i)
        } else {
            Err(LabError::precision())
        }
    }

    /// Certain comparison on `[0,1)` (no wrap-around).
    pub fn certain_cmp(&self, other: &CirclePoint) -> Option<Ordering> {
        interval_cmp(self.bits, self.err_ulps, other.bits, other.err_ulps)
    }
}

/// Circle distance with its error bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CircleDistance {
    bits: U192,
    err_ulps: u64,
}

impl CircleDistance {
    pub fn new(bits: U192, err_ulps: u64) -> Self {
        CircleDistance { bits, err_ulps }
    }

    pub fn to_fixed(&self) -> FixedReal {
        FixedReal::new(self.bits.to_bigint(), self.err_ulps)
    }

    pub fn to_f64(&self) -> f64 {
        self.bits.to_f64()
    }

    pub fn bits(&self) -> U192 {
        self.bits
    }

    pub fn err_ulps(&self) -> u64 {
        self.err_ulps
    }

    /// Larger of two distances by stored value, with the larger error.
    pub fn max(self, other: CircleDistance) -> CircleDistance {
        CircleDistance {
            bits: self.bits.max(other.bits),
            err_ulps: self.err_ulps.max(other.err_ulps),
        }
    }

    /// Certainly below `eps`; `None` when the intervals overlap.
    pub fn below(&self, eps: &Threshold) -> Option<bool> {
        match eps {
            Threshold::AboveHalf => Some(true),
            Threshold::NonPositive => Some(false),
            Threshold::Value(b, e) => match interval_cmp(self.bits, self.err_ulps, *b, *e)? {
                Ordering::Less => Some(true),
                _ => Some(false),
            },
        }
    }
}

/// A distance threshold prepared for fast comparison against circle
/// distances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Threshold {
    /// Every circle distance is below it.
    AboveHalf,
    /// No distance is below it.
    NonPositive,
    Value(U192, u64),
}

impl Threshold {
    pub fn new(eps: &FixedReal) -> Result<Self> {
        let half = FixedReal::from_ratio_i64(1, 2)?;
        if eps.certain_cmp(&half) == Some(Ordering::Greater) {
            return Ok(Threshold::AboveHalf);
        }
        match eps.certain_sign() {
            Some(Ordering::Greater) => Ok(Threshold::Value(
                U192::from_bigint_mod(eps.mantissa()),
                eps.err_ulps(),
            )),
            Some(_) => Ok(Threshold::NonPositive),
            None => Err(LabError::precision()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(s: &str) -> CirclePoint {
        CirclePoint::parse(s).unwrap()
    }

    #[test]
    fn wrapping_arithmetic() {
        let p = cp("7/8").add(&cp("1/4")).unwrap();
        assert_eq!(p, cp("1/8"));
        let q = cp("1/8").sub(&cp("1/4")).unwrap();
        assert_eq!(q, cp("7/8"));
    }

    #[test]
    fn distance_is_symmetric_and_short_way_round() {
        let d = cp("0.05").distance(&cp("0.95"));
        assert_eq!(d.to_fixed().to_decimal(20), "0.1");
        assert_eq!(d.err_ulps(), 2);
        assert_eq!(d, cp("0.95").distance(&cp("0.05")));
    }

    #[test]
    fn locate_half_open() {
        let starts = [CirclePoint::ZERO, cp("0.5")];
        assert_eq!(cp("0.25").locate(&starts).unwrap(), 0);
        assert_eq!(cp("0.5").locate(&starts).unwrap(), 1);
        assert_eq!(cp("0.999").locate(&starts).unwrap(), 1);
        let fuzzy = CirclePoint::new(cp("0.5").bits(), 3);
        assert!(fuzzy.locate(&starts).is_err());
        // Straddles the wrap point.
        let near_zero = CirclePoint::new(U192::from_parts(0, 1), 3);
        assert!(near_zero.locate(&starts).is_err());
        assert_eq!(near_zero.locate(&starts[..1]).unwrap(), 0);
    }

    #[test]
    fn thresholds() {
        let d = cp("0.3").distance(&CirclePoint::ZERO);
        assert_eq!(d.below(&Threshold::new(&"1".parse().unwrap()).unwrap()), Some(true));
        assert_eq!(d.below(&Threshold::new(&"0.31".parse().unwrap()).unwrap()), Some(true));
        assert_eq!(d.below(&Threshold::new(&"0.29".parse().unwrap()).unwrap()), Some(false));
        assert_eq!(d.below(&Threshold::new(&"0.3".parse().unwrap()).unwrap()), None);
        let exact = cp("0.25").distance(&CirclePoint::ZERO);
        assert_eq!(exact.below(&Threshold::new(&"0.25".parse().unwrap()).unwrap()), Some(false));
    }
}
