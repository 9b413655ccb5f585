//! Recurrence detectors: zero times of Birkhoff sums, near-returns, zeros of
//! σ with simultaneous set-returns or near-returns, and the Weiss condition
//! estimator.

mod cascade;
mod flow;
mod records;
mod target;
mod weiss;

pub use cascade::{find_zero_sums, joint_zero_returns, near_returns};
pub use flow::{
    default_trig_grid, flow_zero_near_returns, flow_zero_set_returns, trig_zeros,
    winding_zero_near_returns, TRIG_TIME_TOLERANCE,
};
pub use records::{write_records, EventTime, ReturnRecord};
pub use target::{TargetPiece, TargetSet};
pub use weiss::{weiss_estimate, write_weiss, WeissPoint};
