use std::cmp::Ordering;

use super::step::contains_zero;
use crate::error::{LabError, Result};
use crate::precision::{CirclePoint, FixedReal};
use crate::systems::{cell_lengths, validate_partition, Roof, SpecialFlowState};

/// A horizontal band `[from, next band)` with a constant value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Band {
    pub from: FixedReal,
    pub value: FixedReal,
}

/// One base cell of a phase function and its stack of bands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseCell {
    pub start: CirclePoint,
    pub bands: Vec<Band>,
}

/// A zero-mean function on the phase space of a special flow, constant on
/// rectangles.
///
/// Base cells refine the partition of the roof, so each cell sits under a
/// single roof height.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseFunction {
    roof: Roof,
    starts: Vec<CirclePoint>,
    bands: Vec<Vec<Band>>,
    heights: Vec<FixedReal>,
}

impl PhaseFunction {
    pub fn new(roof: &Roof, cells: Vec<PhaseCell>) -> Result<Self> {
        let starts: Vec<CirclePoint> = cells.iter().map(|c| c.start).collect();
        validate_partition(&starts)?;

        let roof_starts = roof.cell_starts();
        let mut j = 0;
        let mut heights = Vec::with_capacity(cells.len());
        for s in &starts {
            if j + 1 < roof_starts.len() && *s == roof_starts[j + 1] {
                j += 1;
            }
            heights.push(roof.heights()[j].clone());
        }
        if j + 1 != roof_starts.len() {
            return Err(LabError::invalid(
                "phase cells must refine the roof partition (every roof cell start must be a phase cell start)",
            ));
        }

        for (cell, h) in cells.iter().zip(&heights) {
            let bands = &cell.bands;
            match bands.first() {
                Some(b) if b.from.is_exact() && b.from.mantissa() == FixedReal::zero().mantissa() => {}
                _ => return Err(LabError::invalid("the first band must start at height 0")),
            }
            for w in bands.windows(2) {
                if w[0].from.certain_cmp(&w[1].from) != Some(Ordering::Less) {
                    return Err(LabError::invalid("band heights must be strictly increasing"));
                }
            }
            if bands.last().unwrap().from.certain_cmp(h) != Some(Ordering::Less) {
                return Err(LabError::invalid("bands must start below the roof"));
            }
        }

        let lengths = cell_lengths(&starts);
        let mut mean = FixedReal::zero();
        for ((cell, h), len) in cells.iter().zip(&heights).zip(&lengths) {
            for (k, band) in cell.bands.iter().enumerate() {
                let top = cell.bands.get(k + 1).map(|b| &b.from).unwrap_or(h);
                let area = len.mul(&(top - &band.from));
                mean = &mean + &area.mul(&band.value);
            }
        }
        if !contains_zero(&mean) {
            return Err(LabError::invalid(format!(
                "phase function mean is {}, not zero",
                mean.to_decimal(12)
            )));
        }

        Ok(PhaseFunction {
            roof: roof.clone(),
            starts,
            bands: cells.into_iter().map(|c| c.bands).collect(),
            heights,
        })
    }

    /// A function of the base coordinate alone: one full-height band per
    /// cell.
    pub fn base_step(roof: &Roof, starts: Vec<CirclePoint>, values: Vec<FixedReal>) -> Result<Self> {
        if starts.len() != values.len() {
            return Err(LabError::invalid("one value per cell required"));
        }
        let cells = starts
            .into_iter()
            .zip(values)
            .map(|(start, value)| PhaseCell {
                start,
                bands: vec![Band {
                    from: FixedReal::zero(),
                    value,
                }],
            })
            .collect();
        PhaseFunction::new(roof, cells)
    }

    /// `+1` over base `[0, ½)`, `−1` over `[½, 1)`; zero mean when the roof
    /// is constant on each half.
    pub fn plus_minus_half(roof: &Roof) -> Result<Self> {
        PhaseFunction::base_step(
            roof,
            vec![CirclePoint::ZERO, CirclePoint::parse("0.5")?],
            vec![FixedReal::from_int(1), FixedReal::from_int(-1)],
        )
    }

    pub fn zero(roof: &Roof) -> Self {
        let starts = roof.cell_starts().to_vec();
        let values = vec![FixedReal::zero(); starts.len()];
        PhaseFunction::base_step(roof, starts, values).expect("zero function is valid")
    }

    pub fn roof(&self) -> &Roof {
        &self.roof
    }

    pub fn cell_starts(&self) -> &[CirclePoint] {
        &self.starts
    }

    pub fn bands(&self, cell: usize) -> &[Band] {
        &self.bands[cell]
    }

    pub fn cell_height(&self, cell: usize) -> &FixedReal {
        &self.heights[cell]
    }

    pub fn is_identically_zero(&self) -> bool {
        self.bands.iter().flatten().all(|b| b.value.is_certainly_zero())
    }

    pub fn cell_of(&self, a: &CirclePoint) -> Result<usize> {
        a.locate(&self.starts)
    }

    /// `(cell, band)` holding a phase point.
    pub fn locate(&self, s: &SpecialFlowState) -> Result<(usize, usize)> {
        let cell = self.cell_of(&s.a)?;
        let bands = &self.bands[cell];
        let mut k = 0;
        while k + 1 < bands.len() {
            match s.b.certain_cmp(&bands[k + 1].from) {
                Some(Ordering::Less) => break,
                Some(_) => k += 1,
                None => return Err(LabError::precision()),
            }
        }
        Ok((cell, k))
    }

    pub fn value_at(&self, s: &SpecialFlowState) -> Result<FixedReal> {
        let (cell, band) = self.locate(s)?;
        Ok(self.bands[cell][band].value.clone())
    }

    /// Upper edge of a band: the next band start, or the roof.
    pub(crate) fn band_top(&self, cell: usize, band: usize) -> (&FixedReal, bool) {
        match self.bands[cell].get(band + 1) {
            Some(b) => (&b.from, false),
            None => (&self.heights[cell], true),
        }
    }
}
