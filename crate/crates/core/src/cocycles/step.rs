use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::{LabError, Result};
use crate::precision::{CirclePoint, FixedReal};
use crate::systems::{cell_lengths, validate_partition, BaseMap, Orbit};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CellValues {
    /// Cascade mode: exact integer values.
    Integer(Vec<i64>),
    /// Flow mode.
    Real(Vec<FixedReal>),
}

impl CellValues {
    fn len(&self) -> usize {
        match self {
            CellValues::Integer(v) => v.len(),
            CellValues::Real(v) => v.len(),
        }
    }
}

/// A zero-mean step function on the circle, constant on half-open cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepCocycle {
    starts: Vec<CirclePoint>,
    values: CellValues,
}

/// True when the error interval of `x` contains zero.
pub(crate) fn contains_zero(x: &FixedReal) -> bool {
    x.mantissa().abs() <= BigInt::from(x.err_ulps())
}

impl StepCocycle {
    pub fn new(starts: Vec<CirclePoint>, values: CellValues) -> Result<Self> {
        validate_partition(&starts)?;
        if values.len() != starts.len() {
            return Err(LabError::invalid("one value per cell required"));
        }
        let lengths = cell_lengths(&starts);
        let mean = match &values {
            CellValues::Integer(v) => lengths
                .iter()
                .zip(v)
                .fold(FixedReal::zero(), |acc, (l, &x)| &acc + &l.mul_int(x)),
            CellValues::Real(v) => lengths
                .iter()
                .zip(v)
                .fold(FixedReal::zero(), |acc, (l, x)| &acc + &l.mul(x)),
        };
        if !contains_zero(&mean) {
            return Err(LabError::invalid(format!(
                "cocycle mean is {}, not zero",
                mean.to_decimal(12)
            )));
        }
        Ok(StepCocycle { starts, values })
    }

    pub fn integer(starts: Vec<CirclePoint>, values: Vec<i64>) -> Result<Self> {
        StepCocycle::new(starts, CellValues::Integer(values))
    }

    pub fn real(starts: Vec<CirclePoint>, values: Vec<FixedReal>) -> Result<Self> {
        StepCocycle::new(starts, CellValues::Real(values))
    }

    /// `+1` on `[0, ½)`, `−1` on `[½, 1)`.
    pub fn plus_minus_half() -> Self {
        StepCocycle::integer(vec![CirclePoint::ZERO, CirclePoint::parse("0.5").unwrap()], vec![1, -1])
            .expect("balanced step")
    }

    pub fn zero() -> Self {
        StepCocycle {
            starts: vec![CirclePoint::ZERO],
            values: CellValues::Integer(vec![0]),
        }
    }

    pub fn cell_starts(&self) -> &[CirclePoint] {
        &self.starts
    }

    pub fn values(&self) -> &CellValues {
        &self.values
    }

    pub fn is_integer(&self) -> bool {
        matches!(self.values, CellValues::Integer(_))
    }

    pub fn integer_values(&self) -> Option<&[i64]> {
        match &self.values {
            CellValues::Integer(v) => Some(v),
            CellValues::Real(_) => None,
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match &self.values {
            CellValues::Integer(v) => v.iter().all(|&x| x == 0),
            CellValues::Real(v) => v.iter().all(|x| x.is_certainly_zero()),
        }
    }

    pub fn cell_of(&self, p: &CirclePoint) -> Result<usize> {
        p.locate(&self.starts)
    }

    pub fn eval(&self, p: &CirclePoint) -> Result<FixedReal> {
        let i = self.cell_of(p)?;
        Ok(match &self.values {
            CellValues::Integer(v) => FixedReal::from_int(v[i]),
            CellValues::Real(v) => v[i].clone(),
        })
    }

    pub fn eval_int(&self, p: &CirclePoint) -> Result<i64> {
        match &self.values {
            CellValues::Integer(v) => Ok(v[self.cell_of(p)?]),
            CellValues::Real(_) => Err(LabError::invalid("cocycle is not integer-valued")),
        }
    }
}

/// `step_eval`: value of the cell holding `p`.
pub fn step_eval(f: &StepCocycle, p: &CirclePoint) -> Result<FixedReal> {
    f.eval(p)
}

/// One partial sum of a Birkhoff scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BirkhoffStep {
    pub n: u64,
    /// `S_n = Σ_{i<n} f(S^i x)`.
    pub sum: i64,
    /// `S^n x`.
    pub point: CirclePoint,
}

/// Streaming partial sums `S_1, S_2, ...` with an exact integer
/// accumulator.
pub struct BirkhoffScan<'a> {
    f: &'a StepCocycle,
    values: &'a [i64],
    orbit: Orbit<'a>,
    current: Option<CirclePoint>,
    n: u64,
    limit: u64,
    sum: i64,
    failed: bool,
}

impl Iterator for BirkhoffScan<'_> {
    type Item = Result<BirkhoffStep>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.n >= self.limit {
            return None;
        }
        let step = (|| {
            let x = match self.current.take() {
                Some(x) => x,
                None => self.orbit.next().expect("orbit is infinite")?,
            };
            let v = self.values[self.f.cell_of(&x).map_err(|e| e.at_step(self.n))?];
            self.sum = self
                .sum
                .checked_add(v)
                .ok_or_else(|| LabError::invalid("Birkhoff sum overflows i64"))?;
            let next = self.orbit.next().expect("orbit is infinite")?;
            self.current = Some(next);
            self.n += 1;
            Ok(BirkhoffStep {
                n: self.n,
                sum: self.sum,
                point: next,
            })
        })();
        if step.is_err() {
            self.failed = true;
        }
        Some(step)
    }
}

/// `birkhoff_scan`: the partial sums `S_n(x)` for `n = 1..=n_max`.
pub fn birkhoff_scan<'a>(
    s: &'a BaseMap,
    f: &'a StepCocycle,
    x: CirclePoint,
    n_max: u64,
) -> Result<BirkhoffScan<'a>> {
    let values = f
        .integer_values()
        .ok_or_else(|| LabError::invalid("Birkhoff scans need an integer cocycle"))?;
    Ok(BirkhoffScan {
        f,
        values,
        orbit: s.orbit(x),
        current: None,
        n: 0,
        limit: n_max,
        sum: 0,
        failed: false,
    })
}

/// `S_n(x)` alone.
pub fn birkhoff_sum(s: &BaseMap, f: &StepCocycle, x: CirclePoint, n: u64) -> Result<i64> {
    let mut last = 0;
    for step in birkhoff_scan(s, f, x, n)? {
        last = step?.sum;
    }
    Ok(last)
}
