use std::fmt;
use std::io::Write;

use crate::error::{LabError, Result};
use crate::precision::FixedReal;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventTime {
    Step(u64),
    Flow(FixedReal),
}

impl EventTime {
    pub fn as_step(&self) -> Option<u64> {
        match self {
            EventTime::Step(n) => Some(*n),
            EventTime::Flow(_) => None,
        }
    }

    pub fn to_fixed(&self) -> FixedReal {
        match self {
            EventTime::Step(n) => FixedReal::from_int(*n as i64),
            EventTime::Flow(t) => t.clone(),
        }
    }

    pub fn to_decimal(&self, digits: u32) -> String {
        match self {
            EventTime::Step(n) => n.to_string(),
            EventTime::Flow(t) => t.to_decimal(digits),
        }
    }
}

impl fmt::Display for EventTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(30))
    }
}

/// One detected event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReturnRecord {
    pub time: EventTime,
    /// The Birkhoff sum or σ at `time`.
    pub value: FixedReal,
    /// Distance from the starting point.
    pub distance: Option<FixedReal>,
    pub in_set: Option<bool>,
}

/// CSV with columns `time,value,distance,in_set`; absent fields are left
/// empty.
pub fn write_records<W: Write>(w: W, records: &[ReturnRecord], digits: u32) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let io = |e: csv::Error| LabError::Invalid(format!("csv: {e}"));
    out.write_record(["time", "value", "distance", "in_set"]).map_err(io)?;
    for r in records {
        out.write_record([
            r.time.to_decimal(digits),
            r.value.to_decimal(digits),
            r.distance.as_ref().map(|d| d.to_decimal(digits)).unwrap_or_default(),
            r.in_set.map(|b| u8::from(b).to_string()).unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    out.flush().map_err(|e| LabError::Invalid(format!("csv: {e}")))?;
    Ok(())
}
