//! Zero-mean observables and their sums along orbits: integer Birkhoff sums
//! for cascades, exact piecewise-linear σ profiles for special flows, and
//! closed-form σ for trigonometric polynomials on torus windings.

mod phase;
mod profile;
mod step;
mod trig;

pub use phase::{Band, PhaseCell, PhaseFunction};
pub use profile::{sigma_eval, sigma_profile, ProfileNode, ProfileZero, SigmaProfile};
pub use step::{birkhoff_scan, birkhoff_sum, step_eval, BirkhoffScan, BirkhoffStep, CellValues, StepCocycle};
pub use trig::{sigma_trig, TrigMode, TrigPolynomial};

