use crate::error::Result;
use crate::precision::{AngleSpec, CirclePoint};

/// The rotation `x ↦ {x + α}` of the circle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircleRotation {
    alpha: AngleSpec,
    step: CirclePoint,
}

impl CircleRotation {
    pub fn new(alpha: AngleSpec) -> Self {
        let step = alpha.as_circle_point();
        CircleRotation { alpha, step }
    }

    pub fn alpha(&self) -> &AngleSpec {
        &self.alpha
    }

    pub fn step(&self) -> CirclePoint {
        self.step
    }

    pub fn apply(&self, p: &CirclePoint) -> Result<CirclePoint> {
        p.add(&self.step)
    }

    pub fn apply_inverse(&self, p: &CirclePoint) -> Result<CirclePoint> {
        p.sub(&self.step)
    }
}

/// `rotation_apply`: `{p + α}`.
pub fn rotation_apply(map: &CircleRotation, p: &CirclePoint) -> Result<CirclePoint> {
    map.apply(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(s: &str) -> CirclePoint {
        CirclePoint::parse(s).unwrap()
    }

    #[test]
    fn wraps_around() {
        let r = CircleRotation::new(AngleSpec::rational(1, 4).unwrap());
        assert_eq!(rotation_apply(&r, &cp("7/8")).unwrap(), cp("1/8"));
    }

    #[test]
    fn zero_angle_is_identity() {
        let r = CircleRotation::new(AngleSpec::rational(0, 1).unwrap());
        assert_eq!(rotation_apply(&r, &cp("0.3")).unwrap(), cp("0.3"));
    }

    #[test]
    fn golden_step_from_zero() {
        let r = CircleRotation::new(AngleSpec::golden());
        let p = rotation_apply(&r, &CirclePoint::ZERO).unwrap();
        assert_eq!(p.to_fixed().to_decimal(10), "0.6180339887");
        assert!(r.apply_inverse(&p).unwrap().to_fixed().to_decimal(40) == "0");
    }
}
