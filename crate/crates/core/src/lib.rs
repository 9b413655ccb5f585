pub mod cocycles;
pub mod error;
pub mod experiments;
pub mod induced;
pub mod precision;
pub mod recurrence;
pub mod skew;
pub mod stats;
pub mod systems;

pub use error::{LabError, Result};
