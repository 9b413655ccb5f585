use std::cmp::Ordering;

use crate::error::{LabError, Result};
use crate::precision::{AngleSpec, CircleDistance, CirclePoint, FixedReal};

/// The linear flow `(x, y) ↦ ({x + t}, {y + γt})` on the two-torus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusWinding {
    gamma: AngleSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TorusPoint {
    pub x: CirclePoint,
    pub y: CirclePoint,
}

impl TorusPoint {
    pub fn new(x: CirclePoint, y: CirclePoint) -> Self {
        TorusPoint { x, y }
    }

    pub fn origin() -> Self {
        TorusPoint::new(CirclePoint::ZERO, CirclePoint::ZERO)
    }

    /// Max of the two circle distances.
    pub fn distance(&self, other: &TorusPoint) -> CircleDistance {
        self.x.distance(&other.x).max(self.y.distance(&other.y))
    }
}

impl TorusWinding {
    pub fn new(gamma: AngleSpec) -> Self {
        if gamma.is_rational() {
            log::warn!("rational winding slope {gamma}: orbits are closed, not ergodic");
        }
        TorusWinding { gamma }
    }

    pub fn gamma(&self) -> &AngleSpec {
        &self.gamma
    }

    /// The slope as a float, for closed-form integrals.
    pub fn slope_f64(&self) -> f64 {
        self.gamma.value().to_f64()
    }

    pub fn flow(&self, p: &TorusPoint, t: &FixedReal) -> Result<TorusPoint> {
        if t.certain_sign() == Some(Ordering::Less) {
            return Err(LabError::invalid("flow time must be non-negative"));
        }
        let x = p.x.add(&CirclePoint::from_fixed(t))?;
        let shift = self.gamma.value().mul(t).checked()?;
        let y = p.y.add(&CirclePoint::from_fixed(&shift))?;
        Ok(TorusPoint { x, y })
    }
}

/// `torus_flow`: `({x+t}, {y+γt})`.
pub fn torus_flow(w: &TorusWinding, p: &TorusPoint, t: &FixedReal) -> Result<TorusPoint> {
    w.flow(p, t)
}
