use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{LabError, Result};

/// Number of fractional bits carried by every [`FixedReal`].
pub const SCALE_BITS: u32 = 192;

/// Error bounds above this many ulps (about 2^-130 absolute) are treated as
/// exhausted precision.
pub const MAX_ERR_ULPS: u64 = 1 << 62;

pub(crate) fn unit() -> &'static BigInt {
    static UNIT: OnceLock<BigInt> = OnceLock::new();
    UNIT.get_or_init(|| BigInt::one() << SCALE_BITS)
}

/// Outcome of a comparison between two values carrying error bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    Less,
    Greater,
    Ambiguous,
}

/// A fixed-point real `mantissa * 2^-192` known to lie within
/// `err_ulps` units of the last place of the stored mantissa.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FixedReal {
    mantissa: BigInt,
    err_ulps: u64,
}

fn clamp_err(e: &BigInt) -> u64 {
    e.to_u64().unwrap_or(u64::MAX)
}

/// Round `num / den` to the nearest integer (ties away from zero) and report
/// whether the division was exact.
fn round_div(num: &BigInt, den: &BigInt) -> (BigInt, bool) {
    let (q, r) = num.div_mod_floor(den);
    if r.is_zero() {
        return (q, true);
    }
    // den may be negative; compare 2|r| with |den|.
    let twice = (&r * 2u32).abs();
    let q = match twice.cmp(&den.abs()) {
        Ordering::Less => q,
        Ordering::Greater => q + 1,
        Ordering::Equal => {
            // Tie: round away from zero on the true quotient.
            let exact_sign = num.sign() == den.sign();
            if exact_sign {
                q + 1
            } else {
                q
            }
        }
    };
    (q, false)
}

impl FixedReal {
    pub fn new(mantissa: BigInt, err_ulps: u64) -> Self {
        FixedReal { mantissa, err_ulps }
    }

    pub fn exact(mantissa: BigInt) -> Self {
        FixedReal::new(mantissa, 0)
    }

    pub fn zero() -> Self {
        FixedReal::exact(BigInt::zero())
    }

    pub fn one() -> Self {
        FixedReal::exact(unit().clone())
    }

    pub fn from_int(n: i64) -> Self {
        FixedReal::exact(BigInt::from(n) << SCALE_BITS)
    }

    /// The rational `num/den`, rounded to nearest; exact when `den` divides
    /// `num * 2^192`.
    pub fn from_ratio(num: &BigInt, den: &BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(LabError::invalid("zero denominator"));
        }
        let (q, exact) = round_div(&(num << SCALE_BITS), den);
        Ok(FixedReal::new(q, if exact { 0 } else { 1 }))
    }

    pub fn from_ratio_i64(num: i64, den: i64) -> Result<Self> {
        FixedReal::from_ratio(&BigInt::from(num), &BigInt::from(den))
    }

    /// Exact conversion of a finite binary64 value (values below 2^-192 are
    /// rounded).
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(LabError::invalid("non-finite value"));
        }
        if x == 0.0 {
            return Ok(FixedReal::zero());
        }
        let bits = x.abs().to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        let mut mant = BigInt::from(m);
        let shift = e + SCALE_BITS as i64;
        let mut err = 0;
        if shift >= 0 {
            mant <<= shift as usize;
        } else {
            let (q, exact) = round_div(&mant, &(BigInt::one() << (-shift) as usize));
            mant = q;
            err = if exact { 0 } else { 1 };
        }
        if x < 0.0 {
            mant = -mant;
        }
        Ok(FixedReal::new(mant, err))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn err_ulps(&self) -> u64 {
        self.err_ulps
    }

    pub fn is_exact(&self) -> bool {
        self.err_ulps == 0
    }

    pub fn with_err(mut self, err_ulps: u64) -> Self {
        self.err_ulps = err_ulps;
        self
    }

    /// Fails with "precision exhausted" once the error bound passes the
    /// safety margin.
    pub fn checked(self) -> Result<Self> {
        if self.err_ulps > MAX_ERR_ULPS {
            Err(LabError::precision())
        } else {
            Ok(self)
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.mantissa.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(SCALE_BITS as i32))
    }

    pub fn abs(&self) -> Self {
        FixedReal::new(self.mantissa.abs(), self.err_ulps)
    }

    pub fn mul_int(&self, n: i64) -> Self {
        let err = (n.unsigned_abs() as u128) * (self.err_ulps as u128);
        FixedReal::new(&self.mantissa * n, u64::try_from(err).unwrap_or(u64::MAX))
    }

    /// Product rounded to the nearest ulp; the error bound covers both
    /// operand uncertainties and the rounding.
    pub fn mul(&self, other: &FixedReal) -> Self {
        let raw = &self.mantissa * &other.mantissa;
        let (q, exact) = round_div(&raw, unit());
        let ea = BigInt::from(self.err_ulps);
        let eb = BigInt::from(other.err_ulps);
        let spread = self.mantissa.abs() * &eb + other.mantissa.abs() * &ea + &ea * &eb;
        let mut err = spread.div_ceil(unit());
        if !exact {
            err += 1;
        }
        FixedReal::new(q, clamp_err(&err))
    }

    /// Quotient rounded to the nearest ulp. Fails when the divisor's error
    /// interval contains zero.
    pub fn div(&self, other: &FixedReal) -> Result<Self> {
        let eb = BigInt::from(other.err_ulps);
        let denom_floor = other.mantissa.abs() - &eb;
        if denom_floor <= BigInt::zero() {
            return Err(LabError::precision());
        }
        let (q, exact) = round_div(&(&self.mantissa << SCALE_BITS), &other.mantissa);
        let ea = BigInt::from(self.err_ulps);
        let spread = (ea << SCALE_BITS) + q.abs() * &eb;
        let mut err = spread.div_ceil(&denom_floor);
        if !exact {
            err += 1;
        }
        Ok(FixedReal::new(q, clamp_err(&err)))
    }

    /// Integer part of the stored mantissa (floor).
    pub fn floor_int(&self) -> BigInt {
        self.mantissa.div_floor(unit())
    }

    /// Fractional part `{x}` of the stored mantissa, keeping the error bound.
    pub fn frac(&self) -> Self {
        FixedReal::new(self.mantissa.mod_floor(unit()), self.err_ulps)
    }

    fn lo(&self) -> BigInt {
        &self.mantissa - self.err_ulps
    }

    fn hi(&self) -> BigInt {
        &self.mantissa + self.err_ulps
    }

    /// Three-way comparison that only answers when it is certain: disjoint
    /// error intervals, or two exact values.
    pub fn certain_cmp(&self, other: &FixedReal) -> Option<Ordering> {
        if self.is_exact() && other.is_exact() {
            return Some(self.mantissa.cmp(&other.mantissa));
        }
        if self.hi() < other.lo() {
            Some(Ordering::Less)
        } else if self.lo() > other.hi() {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    /// Sign of the value when certain.
    pub fn certain_sign(&self) -> Option<Ordering> {
        self.certain_cmp(&FixedReal::zero())
    }

    pub fn is_certainly_zero(&self) -> bool {
        self.is_exact() && self.mantissa.is_zero()
    }

    /// Round to `digits` decimal places; trailing zeros are trimmed.
    pub fn to_decimal(&self, digits: u32) -> String {
        let pow = BigInt::from(10u32).pow(digits);
        let (scaled, _) = round_div(&(&self.mantissa * &pow), unit());
        let negative = scaled.is_negative();
        let (int, frac) = scaled.abs().div_mod_floor(&pow);
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        out.push_str(&int.to_string());
        if digits > 0 && !frac.is_zero() {
            let s = format!("{:0>width$}", frac.to_string(), width = digits as usize);
            out.push('.');
            out.push_str(s.trim_end_matches('0'));
        }
        out
    }
}

/// Compare `a` and `b`, answering `Less`/`Greater` only when their error
/// intervals are disjoint.
pub fn guarded_compare(a: &FixedReal, b: &FixedReal) -> Comparison {
    if a.hi() < b.lo() {
        Comparison::Less
    } else if a.lo() > b.hi() {
        Comparison::Greater
    } else {
        Comparison::Ambiguous
    }
}

impl Add for &FixedReal {
    type Output = FixedReal;
    fn add(self, rhs: &FixedReal) -> FixedReal {
        FixedReal::new(
            &self.mantissa + &rhs.mantissa,
            self.err_ulps.saturating_add(rhs.err_ulps),
        )
    }
}

impl Add for FixedReal {
    type Output = FixedReal;
    fn add(self, rhs: FixedReal) -> FixedReal {
        &self + &rhs
    }
}

impl Sub for &FixedReal {
    type Output = FixedReal;
    fn sub(self, rhs: &FixedReal) -> FixedReal {
        FixedReal::new(
            &self.mantissa - &rhs.mantissa,
            self.err_ulps.saturating_add(rhs.err_ulps),
        )
    }
}

impl Sub for FixedReal {
    type Output = FixedReal;
    fn sub(self, rhs: FixedReal) -> FixedReal {
        &self - &rhs
    }
}

impl Neg for &FixedReal {
    type Output = FixedReal;
    fn neg(self) -> FixedReal {
        FixedReal::new(-&self.mantissa, self.err_ulps)
    }
}

impl Neg for FixedReal {
    type Output = FixedReal;
    fn neg(self) -> FixedReal {
        -&self
    }
}

impl fmt::Display for FixedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(30))?;
        if self.err_ulps > 0 {
            write!(f, "±{}ulp", self.err_ulps)?;
        }
        Ok(())
    }
}

/// Parses integers (`-3`), decimals (`0.25`, `1e-3`) and ratios (`1/3`).
impl FromStr for FixedReal {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || LabError::Parse(format!("not a number: {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            return FixedReal::from_ratio(&n, &d);
        }
        let (body, exp) = match s.find(['e', 'E']) {
            Some(i) => {
                let e: i32 = s[i + 1..].parse().map_err(|_| bad())?;
                (&s[..i], e)
            }
            None => (s, 0),
        };
        let (sign, body) = match body.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, body.strip_prefix('+').unwrap_or(body)),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let digits = digits * sign;
        let pow10 = exp - frac.len() as i32;
        let ten = BigInt::from(10u32);
        if pow10 >= 0 {
            FixedReal::from_ratio(&(digits * ten.pow(pow10 as u32)), &BigInt::one())
        } else {
            FixedReal::from_ratio(&digits, &ten.pow((-pow10) as u32))
        }
    }
}
