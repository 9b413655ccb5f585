use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::circle::CirclePoint;
use super::fixed::{FixedReal, SCALE_BITS};
use crate::error::{LabError, Result};

/// Guard bits used while resolving quadratic surds.
const GUARD_BITS: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// (√5 − 1)/2
    Golden,
    /// √2
    Sqrt2,
}

impl Preset {
    fn surd(self) -> (i64, i64, i64, i64) {
        match self {
            Preset::Golden => (-1, 1, 5, 2),
            Preset::Sqrt2 => (0, 1, 2, 1),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Preset::Golden => "golden",
            Preset::Sqrt2 => "sqrt2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AngleKind {
    Rational { p: i64, q: i64 },
    /// `(a + b·√c) / d`
    Surd { a: i64, b: i64, c: i64, d: i64 },
    Preset(Preset),
}

/// A rotation number or winding slope, resolved once from its symbolic form.
///
/// `value` is the full real number; `resolved` is its fractional part, the
/// quantity a circle rotation actually adds. Both carry at most one ulp of
/// error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AngleSpec {
    kind: AngleKind,
    value: FixedReal,
    resolved: FixedReal,
}

fn resolve_surd(a: i64, b: i64, c: i64, d: i64) -> Result<FixedReal> {
    if d == 0 {
        return Err(LabError::invalid("surd denominator is zero"));
    }
    if b == 0 || c < 2 {
        return Err(LabError::invalid("surd needs b != 0 and c >= 2"));
    }
    let c_big = BigInt::from(c);
    let r = c_big.sqrt();
    if &r * &r == c_big {
        return Err(LabError::invalid(format!(
            "sqrt({c}) is rational; use a rational angle"
        )));
    }
    let bits = SCALE_BITS + GUARD_BITS;
    let radicand = BigInt::from(b) * BigInt::from(b) * c_big << (2 * bits);
    let root = radicand.sqrt();
    let root = if b < 0 { -root } else { root };
    let num = (BigInt::from(a) << bits) + root;
    let den = BigInt::from(d) << GUARD_BITS;
    // The guard bits keep the truncation of the root far below half an ulp,
    // so nearest rounding lands within one ulp of the true value.
    let (q, r) = num.div_mod_floor(&den);
    let q = if (&r * 2u8).abs() >= den.abs() { q + 1 } else { q };
    Ok(FixedReal::new(q, 1))
}

impl AngleSpec {
    pub fn rational(p: i64, q: i64) -> Result<Self> {
        if q < 1 {
            return Err(LabError::invalid("rational angle needs q >= 1"));
        }
        if p.gcd(&q) != 1 && !(p == 0 && q == 1) {
            return Err(LabError::invalid(format!("{p}/{q} is not in lowest terms")));
        }
        if p < 0 || p >= q {
            return Err(LabError::invalid(format!("{p}/{q} not in [0,1)")));
        }
        let value = FixedReal::from_ratio_i64(p, q)?;
        Ok(AngleSpec {
            kind: AngleKind::Rational { p, q },
            resolved: value.clone(),
            value,
        })
    }

    pub fn surd(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let value = resolve_surd(a, b, c, d)?;
        Ok(AngleSpec {
            kind: AngleKind::Surd { a, b, c, d },
            resolved: value.frac(),
            value,
        })
    }

    pub fn preset(p: Preset) -> Self {
        let (a, b, c, d) = p.surd();
        let value = resolve_surd(a, b, c, d).expect("preset surds are valid");
        AngleSpec {
            kind: AngleKind::Preset(p),
            resolved: value.frac(),
            value,
        }
    }

    pub fn golden() -> Self {
        AngleSpec::preset(Preset::Golden)
    }

    pub fn sqrt2() -> Self {
        AngleSpec::preset(Preset::Sqrt2)
    }

    pub fn kind(&self) -> AngleKind {
        self.kind
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.kind, AngleKind::Rational { .. })
    }

    /// `(p, q)` for rational angles.
    pub fn as_rational(&self) -> Option<(i64, i64)> {
        match self.kind {
            AngleKind::Rational { p, q } => Some((p, q)),
            _ => None,
        }
    }

    /// Integer surd coefficients `(a, b, c, d)` for irrational angles.
    pub fn surd_coefficients(&self) -> Option<(i64, i64, i64, i64)> {
        match self.kind {
            AngleKind::Surd { a, b, c, d } => Some((a, b, c, d)),
            AngleKind::Preset(p) => Some(p.surd()),
            AngleKind::Rational { .. } => None,
        }
    }

    /// The full real value (a winding slope may exceed one).
    pub fn value(&self) -> &FixedReal {
        &self.value
    }

    /// Fractional part of the value, in `[0,1)`.
    pub fn resolved(&self) -> &FixedReal {
        &self.resolved
    }

    pub fn as_circle_point(&self) -> CirclePoint {
        CirclePoint::from_fixed(&self.resolved)
    }
}

impl fmt::Display for AngleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            AngleKind::Rational { p, q } => write!(f, "rational:{p}/{q}"),
            AngleKind::Surd { a, b, c, d } => {
                let sign = if b < 0 { '-' } else { '+' };
                write!(f, "surd:({a}{sign}{}*sqrt({c}))/{d}", b.abs())
            }
            AngleKind::Preset(p) => write!(f, "preset:{}", p.name()),
        }
    }
}

fn surd_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"^\(\s*(-?\d+)\s*([+-])\s*(\d+)\s*\*\s*sqrt\(\s*(\d+)\s*\)\s*\)\s*(?:/\s*(-?\d+))?$",
        )
        .expect("valid regex")
    })
}

/// Text forms: `rational:p/q`, `surd:(a+b*sqrt(c))/d`, `preset:golden|sqrt2`.
impl FromStr for AngleSpec {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |why: &str| LabError::Parse(format!("angle {s:?}: {why}"));
        let (tag, body) = s.split_once(':').ok_or_else(|| bad("missing kind prefix"))?;
        match tag {
            "rational" => {
                let (p, q) = body.split_once('/').ok_or_else(|| bad("expected p/q"))?;
                let p: i64 = p.trim().parse().map_err(|_| bad("bad numerator"))?;
                let q: i64 = q.trim().parse().map_err(|_| bad("bad denominator"))?;
                AngleSpec::rational(p, q)
            }
            "surd" => {
                let caps = surd_pattern()
                    .captures(body.trim())
                    .ok_or_else(|| bad("expected (a+b*sqrt(c))/d"))?;
                let num = |i: usize| -> Result<i64> {
                    caps[i].parse().map_err(|_| bad("integer out of range"))
                };
                let a = num(1)?;
                let mut b = num(3)?;
                if &caps[2] == "-" {
                    b = -b;
                }
                let c = num(4)?;
                let d = match caps.get(5) {
                    Some(m) => m.as_str().parse().map_err(|_| bad("bad denominator"))?,
                    None => 1,
                };
                AngleSpec::surd(a, b, c, d)
            }
            "preset" => match body.trim() {
                "golden" => Ok(AngleSpec::golden()),
                "sqrt2" => Ok(AngleSpec::sqrt2()),
                other => Err(bad(&format!("unknown preset {other:?}"))),
            },
            _ => Err(bad("unknown kind")),
        }
    }
}

impl Serialize for AngleSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AngleSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Residue `n·p mod q` used by exact rational orbits.
pub(crate) fn rational_residue(n: u64, p: i64, q: i64) -> u64 {
    let q = q as u128;
    ((n as u128 * p as u128) % q) as u64
}
