use std::cmp::Ordering;

use crate::error::{LabError, Result};
use crate::precision::{CirclePoint, FixedReal};
use crate::systems::{Roof, SpecialFlowState};

/// A rectangle `[lo, hi) × [h_lo, h_hi)`; without a height range it spans
/// the full height under the roof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetPiece {
    pub lo: FixedReal,
    pub hi: FixedReal,
    pub height: Option<(FixedReal, FixedReal)>,
}

impl TargetPiece {
    pub fn interval(lo: FixedReal, hi: FixedReal) -> Self {
        TargetPiece {
            lo,
            hi,
            height: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bounds {
    lo: CirclePoint,
    /// `None` for an interval closing at 1.
    hi: Option<CirclePoint>,
}

/// A finite disjoint union of half-open base intervals or phase-space
/// rectangles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetSet {
    pieces: Vec<TargetPiece>,
    bounds: Vec<Bounds>,
}

fn less(a: &FixedReal, b: &FixedReal) -> bool {
    a.certain_cmp(b) == Some(Ordering::Less)
}

fn overlaps(a: (&FixedReal, &FixedReal), b: (&FixedReal, &FixedReal)) -> bool {
    !(a.1.certain_cmp(b.0).is_some_and(|o| o != Ordering::Greater)
        || b.1.certain_cmp(a.0).is_some_and(|o| o != Ordering::Greater))
}

impl TargetSet {
    pub fn new(pieces: Vec<TargetPiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(LabError::invalid("target set needs at least one piece"));
        }
        let zero = FixedReal::zero();
        let one = FixedReal::one();
        for p in &pieces {
            if less(&p.lo, &zero) || less(&one, &p.hi) || !less(&p.lo, &p.hi) {
                return Err(LabError::invalid("target intervals must satisfy 0 <= lo < hi <= 1"));
            }
            if let Some((h0, h1)) = &p.height {
                if less(h0, &zero) || !less(h0, h1) {
                    return Err(LabError::invalid("target heights must satisfy 0 <= lo < hi"));
                }
            }
        }
        for (i, p) in pieces.iter().enumerate() {
            for q in &pieces[i + 1..] {
                if !overlaps((&p.lo, &p.hi), (&q.lo, &q.hi)) {
                    continue;
                }
                let separated = match (&p.height, &q.height) {
                    (Some((a0, a1)), Some((b0, b1))) => !overlaps((a0, a1), (b0, b1)),
                    _ => false,
                };
                if !separated {
                    return Err(LabError::invalid("target pieces must be disjoint"));
                }
            }
        }
        let bounds = pieces
            .iter()
            .map(|p| Bounds {
                lo: CirclePoint::from_fixed(&p.lo),
                hi: if p.hi.certain_cmp(&one) == Some(Ordering::Equal) {
                    None
                } else {
                    Some(CirclePoint::from_fixed(&p.hi))
                },
            })
            .collect();
        Ok(TargetSet { pieces, bounds })
    }

    /// A union of full-height base intervals.
    pub fn intervals(iv: Vec<(FixedReal, FixedReal)>) -> Result<Self> {
        TargetSet::new(iv.into_iter().map(|(lo, hi)| TargetPiece::interval(lo, hi)).collect())
    }

    pub fn whole() -> Self {
        TargetSet::intervals(vec![(FixedReal::zero(), FixedReal::one())]).unwrap()
    }

    pub fn pieces(&self) -> &[TargetPiece] {
        &self.pieces
    }

    pub fn is_full_height(&self) -> bool {
        self.pieces.iter().all(|p| p.height.is_none())
    }

    /// Lebesgue measure of the base intervals.
    pub fn base_measure(&self) -> FixedReal {
        self.pieces
            .iter()
            .fold(FixedReal::zero(), |acc, p| &acc + &(&p.hi - &p.lo))
    }

    /// Share of the area under the roof.
    pub fn flow_measure(&self, roof: &Roof) -> Result<FixedReal> {
        let lengths = roof.cell_lengths();
        let mut area = FixedReal::zero();
        for p in &self.pieces {
            for (i, c0) in roof.cell_starts().iter().enumerate() {
                let c0 = c0.to_fixed();
                let c1 = &c0 + &lengths[i];
                let lo = max(&p.lo, &c0);
                let hi = min(&p.hi, &c1);
                if !less(lo, hi) {
                    continue;
                }
                let r = &roof.heights()[i];
                let h = match &p.height {
                    None => r.clone(),
                    Some((h0, h1)) => {
                        let top = min(h1, r);
                        if !less(h0, top) {
                            continue;
                        }
                        top - h0
                    }
                };
                area = &area + &(hi - lo).mul(&h);
            }
        }
        area.div(&roof.area())
    }

    fn base_hit(&self, i: usize, p: &CirclePoint) -> Result<bool> {
        let b = &self.bounds[i];
        let above = match b.lo.certain_cmp(p) {
            Some(o) => o != Ordering::Greater,
            None => return Err(LabError::precision()),
        };
        let below = match &b.hi {
            None => true,
            Some(hi) => match p.certain_cmp(hi) {
                Some(o) => o == Ordering::Less,
                None => return Err(LabError::precision()),
            },
        };
        Ok(above && below)
    }

    /// Membership of a base point; only for full-height sets.
    pub fn contains_point(&self, p: &CirclePoint) -> Result<bool> {
        if !self.is_full_height() {
            return Err(LabError::invalid("target set restricts heights"));
        }
        for i in 0..self.pieces.len() {
            if self.base_hit(i, p)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Membership of a phase point under the roof.
    pub fn contains_state(&self, s: &SpecialFlowState) -> Result<bool> {
        for (i, piece) in self.pieces.iter().enumerate() {
            if !self.base_hit(i, &s.a)? {
                continue;
            }
            match &piece.height {
                None => return Ok(true),
                Some((h0, h1)) => {
                    let lo = s.b.certain_cmp(h0).ok_or_else(LabError::precision)?;
                    let hi = s.b.certain_cmp(h1).ok_or_else(LabError::precision)?;
                    if lo != Ordering::Less && hi == Ordering::Less {
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }
}

fn max<'a>(a: &'a FixedReal, b: &'a FixedReal) -> &'a FixedReal {
    if a.mantissa() >= b.mantissa() {
        a
    } else {
        b
    }
}

fn min<'a>(a: &'a FixedReal, b: &'a FixedReal) -> &'a FixedReal {
    if a.mantissa() <= b.mantissa() {
        a
    } else {
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::AngleSpec;
    use crate::systems::BaseMap;

    fn fx(s: &str) -> FixedReal {
        s.parse().unwrap()
    }

    fn cp(s: &str) -> CirclePoint {
        CirclePoint::parse(s).unwrap()
    }

    #[test]
    fn half_open_membership() {
        let a = TargetSet::intervals(vec![(fx("0"), fx("0.5")), (fx("0.75"), fx("1"))]).unwrap();
        assert!(a.contains_point(&cp("0")).unwrap());
        assert!(!a.contains_point(&cp("0.5")).unwrap());
        assert!(a.contains_point(&cp("0.75")).unwrap());
        assert!(a.contains_point(&cp("0.99")).unwrap());
        assert_eq!(a.base_measure(), fx("0.75"));
    }

    #[test]
    fn rectangles_and_measure() {
        let roof = Roof::new(
            vec![CirclePoint::ZERO, cp("0.5")],
            vec![fx("1"), fx("3")],
            BaseMap::rotation(AngleSpec::golden()),
        )
        .unwrap();
        let a = TargetSet::new(vec![
            TargetPiece::interval(fx("0"), fx("0.5")),
            TargetPiece {
                lo: fx("0.5"),
                hi: fx("1"),
                height: Some((fx("1"), fx("2"))),
            },
        ])
        .unwrap();
        // (0.5·1 + 0.5·1) / (0.5·1 + 0.5·3)
        assert_eq!(a.flow_measure(&roof).unwrap(), fx("0.5"));
        assert!(a.contains_state(&SpecialFlowState::new(cp("0.75"), fx("1"))).unwrap());
        assert!(!a.contains_state(&SpecialFlowState::new(cp("0.75"), fx("2"))).unwrap());
        assert!(a.contains_point(&cp("0.1")).is_err());
    }

    #[test]
    fn rejects_overlap() {
        assert!(TargetSet::intervals(vec![(fx("0"), fx("0.5")), (fx("0.25"), fx("0.75"))]).is_err());
        assert!(TargetSet::intervals(vec![(fx("0"), fx("0.5")), (fx("0.5"), fx("0.75"))]).is_ok());
        assert!(TargetSet::intervals(vec![(fx("0.5"), fx("0.5"))]).is_err());
        assert!(TargetSet::intervals(vec![]).is_err());
    }
}
