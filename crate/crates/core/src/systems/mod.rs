//! Measure-preserving systems: circle rotations, interval exchanges, torus
//! windings and special flows under piecewise-constant roofs.

mod iet;
mod rotation;
mod special_flow;
mod torus;

pub use iet::{iet_apply, IntervalExchange};
pub use rotation::{rotation_apply, CircleRotation};
pub(crate) use special_flow::{cell_lengths, validate_partition};
pub use special_flow::{special_flow_step, Roof, SpecialFlowState, DEFAULT_CROSSING_BUDGET};
pub use torus::{torus_flow, TorusPoint, TorusWinding};

use crate::error::Result;
use crate::precision::{rational_residue, AngleSpec, CirclePoint};

/// An invertible map of the circle used as a base automorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseMap {
    Rotation(CircleRotation),
    Exchange(IntervalExchange),
}

impl BaseMap {
    pub fn rotation(alpha: AngleSpec) -> Self {
        BaseMap::Rotation(CircleRotation::new(alpha))
    }

    pub fn apply(&self, p: &CirclePoint) -> Result<CirclePoint> {
        match self {
            BaseMap::Rotation(r) => r.apply(p),
            BaseMap::Exchange(t) => t.apply(p),
        }
    }

    pub fn apply_inverse(&self, p: &CirclePoint) -> Result<CirclePoint> {
        match self {
            BaseMap::Rotation(r) => r.apply_inverse(p),
            BaseMap::Exchange(t) => t.apply_inverse(p),
        }
    }

    /// Apply the map `k` times; negative `k` applies the inverse.
    pub fn apply_power(&self, p: &CirclePoint, k: i64) -> Result<CirclePoint> {
        let mut y = *p;
        for _ in 0..k.unsigned_abs() {
            y = if k > 0 {
                self.apply(&y)?
            } else {
                self.apply_inverse(&y)?
            };
        }
        Ok(y)
    }

    /// `(p, q)` when the map is a rotation by a rational angle.
    pub fn rational_angle(&self) -> Option<(i64, i64)> {
        match self {
            BaseMap::Rotation(r) => r.alpha().as_rational(),
            BaseMap::Exchange(_) => None,
        }
    }

    /// Rational rotations have periodic orbits; they drive exact oracles
    /// but do not satisfy ergodicity hypotheses.
    pub fn oracle_only(&self) -> bool {
        self.rational_angle().is_some()
    }

    pub fn warn_if_not_ergodic(&self, context: &str) {
        if let Some((p, q)) = self.rational_angle() {
            log::warn!("{context}: rotation by {p}/{q} is periodic (oracle mode, not ergodic)");
        }
    }

    /// The forward orbit `x, Sx, S²x, ...`.
    ///
    /// Rational rotations are evaluated as `x + {k·p/q}` from an exact
    /// residue, so periodic returns are exact instead of accumulating one
    /// ulp per step.
    pub fn orbit(&self, x: CirclePoint) -> Orbit<'_> {
        let rational = self.rational_angle().map(|(p, q)| {
            let table = (0..q)
                .map(|k| CirclePoint::from_ratio(k, q).expect("q >= 1"))
                .collect();
            RationalSteps {
                table,
                p,
                q,
                residue: 0,
            }
        });
        Orbit {
            map: self,
            start: x,
            current: Ok(x),
            index: 0,
            rational,
        }
    }
}

#[derive(Clone, Debug)]
struct RationalSteps {
    table: Vec<CirclePoint>,
    p: i64,
    q: i64,
    residue: u64,
}

/// Iterator over `S^n x` for `n = 0, 1, 2, ...`; stops after the first
/// error, which carries the failing step index.
#[derive(Clone, Debug)]
pub struct Orbit<'a> {
    map: &'a BaseMap,
    start: CirclePoint,
    current: Result<CirclePoint>,
    index: u64,
    rational: Option<RationalSteps>,
}

impl Orbit<'_> {
    /// Index of the point the next call to `next` returns.
    pub fn index(&self) -> u64 {
        self.index
    }

    /// The starting point `x`.
    pub fn start(&self) -> CirclePoint {
        self.start
    }
}

impl Iterator for Orbit<'_> {
    type Item = Result<CirclePoint>;

    fn next(&mut self) -> Option<Self::Item> {
        let point = match &self.current {
            Ok(p) => *p,
            Err(e) => {
                if self.index == u64::MAX {
                    return None;
                }
                let e = e.clone();
                self.index = u64::MAX;
                return Some(Err(e));
            }
        };
        let n = self.index;
        self.index += 1;
        self.current = match &mut self.rational {
            Some(steps) => {
                steps.residue = rational_residue(self.index, steps.p, steps.q);
                self.start.add(&steps.table[steps.residue as usize])
            }
            None => self.map.apply(&point),
        }
        .map_err(|e| e.at_step(n + 1));
        Some(Ok(point))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_orbit_is_exactly_periodic() {
        let s = BaseMap::rotation(AngleSpec::rational(1, 3).unwrap());
        let pts: Vec<_> = s.orbit(CirclePoint::ZERO).take(7).map(|p| p.unwrap()).collect();
        assert_eq!(pts[3], CirclePoint::ZERO);
        assert_eq!(pts[6], CirclePoint::ZERO);
        assert_eq!(pts[1], pts[4]);
        assert!(pts[1].err_ulps() <= 1);
    }

    #[test]
    fn irrational_orbit_matches_repeated_apply() {
        let s = BaseMap::rotation(AngleSpec::golden());
        let x = CirclePoint::parse("0.1").unwrap();
        let mut y = x;
        for (n, p) in s.orbit(x).take(50).enumerate() {
            assert_eq!(p.unwrap(), y, "step {n}");
            y = s.apply(&y).unwrap();
        }
    }

    #[test]
    fn power_and_inverse() {
        let s = BaseMap::rotation(AngleSpec::rational(1, 4).unwrap());
        let x = CirclePoint::parse("0.1").unwrap();
        assert_eq!(s.apply_power(&x, -1).unwrap(), CirclePoint::parse("0.85").unwrap());
        assert_eq!(s.apply_power(&x, 4).unwrap(), x);
        assert_eq!(s.apply_power(&x, 0).unwrap(), x);
    }
}
