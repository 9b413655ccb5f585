use std::cmp::Ordering;

use crate::cocycles::{sigma_profile, sigma_trig, PhaseFunction, ProfileZero, TrigPolynomial};
use crate::error::{LabError, Result};
use crate::precision::{FixedReal, Threshold};
use crate::systems::{torus_flow, Roof, SpecialFlowState, TorusPoint, TorusWinding};

use super::records::{EventTime, ReturnRecord};
use super::target::TargetSet;

/// Bisection stops once the bracket is this narrow.
pub const TRIG_TIME_TOLERANCE: f64 = 1e-12;

/// Grid values this small count as zeros.
const TRIG_ZERO: f64 = 1e-13;

fn check_start(f: &PhaseFunction, x: &SpecialFlowState) -> Result<()> {
    if !f.is_identically_zero() && f.value_at(x)?.is_certainly_zero() {
        return Err(LabError::ZeroAtStart);
    }
    Ok(())
}

fn profile_zeros(
    roof: &Roof,
    f: &PhaseFunction,
    x: &SpecialFlowState,
    t_max: &FixedReal,
) -> Result<Vec<ProfileZero>> {
    sigma_profile(roof, f, x, t_max)?.zeros(f.is_identically_zero())
}

/// `flow_zero_set_returns`: zeros of σ at which the flow is inside `target`.
pub fn flow_zero_set_returns(
    roof: &Roof,
    f: &PhaseFunction,
    x: &SpecialFlowState,
    t_max: &FixedReal,
    target: &TargetSet,
) -> Result<Vec<ReturnRecord>> {
    if !target.contains_state(x)? {
        return Err(LabError::OutsideTarget);
    }
    check_start(f, x)?;
    let mut out = Vec::new();
    for z in profile_zeros(roof, f, x, t_max)? {
        if target.contains_state(&z.state)? {
            out.push(ReturnRecord {
                distance: Some(z.state.distance(x)),
                time: EventTime::Flow(z.t),
                value: z.sigma,
                in_set: Some(true),
            });
        }
    }
    Ok(out)
}

/// `flow_zero_near_returns` for a special flow: zeros of σ at which the
/// product-chart distance to `x` is below `eps`.
pub fn flow_zero_near_returns(
    roof: &Roof,
    f: &PhaseFunction,
    x: &SpecialFlowState,
    t_max: &FixedReal,
    eps: &FixedReal,
) -> Result<Vec<ReturnRecord>> {
    check_start(f, x)?;
    let mut out = Vec::new();
    for z in profile_zeros(roof, f, x, t_max)? {
        let d = z.state.distance(x);
        match d.certain_cmp(eps) {
            Some(Ordering::Less) => out.push(ReturnRecord {
                time: EventTime::Flow(z.t),
                value: z.sigma,
                distance: Some(d),
                in_set: None,
            }),
            Some(_) => {}
            None => return Err(LabError::precision()),
        }
    }
    Ok(out)
}

/// Default bracketing step `1/(8·max frequency·(1+|γ|))`.
pub fn default_trig_grid(w: &TorusWinding, f: &TrigPolynomial) -> f64 {
    let m = f.max_frequency().max(1) as f64;
    1.0 / (8.0 * m * (1.0 + w.slope_f64().abs()))
}

/// Zeros of `t ↦ σ(t, p)` in `(0, t_max]` by sign changes on a grid,
/// refined by bisection. Tangential zeros between grid points are missed.
pub fn trig_zeros(
    w: &TorusWinding,
    f: &TrigPolynomial,
    p: &TorusPoint,
    t_max: f64,
    grid: Option<f64>,
) -> Result<Vec<f64>> {
    f.check_resonance(w)?;
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(LabError::invalid("t_max must be positive"));
    }
    let h = grid.unwrap_or_else(|| default_trig_grid(w, f));
    if !(h > 0.0) {
        return Err(LabError::invalid("grid step must be positive"));
    }
    let steps = (t_max / h).ceil().max(1.0) as u64;
    let sigma = |t: f64| sigma_trig(w, f, p, t);
    let mut out = Vec::new();
    let (mut t0, mut s0) = (0.0f64, 0.0f64);
    let mut prev_zero = true;
    for i in 1..=steps {
        let t1 = if i == steps {
            t_max
        } else {
            t_max * i as f64 / steps as f64
        };
        let s1 = sigma(t1)?;
        if s1.abs() <= TRIG_ZERO {
            if !prev_zero {
                out.push(t1);
            }
            prev_zero = true;
        } else {
            if !prev_zero && s0.signum() != s1.signum() {
                let (mut lo, mut hi, mut slo) = (t0, t1, s0);
                while hi - lo > TRIG_TIME_TOLERANCE {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let sm = sigma(mid)?;
                    if sm == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if sm.signum() == slo.signum() {
                        lo = mid;
                        slo = sm;
                    } else {
                        hi = mid;
                    }
                }
                out.push(0.5 * (lo + hi));
            }
            prev_zero = false;
        }
        t0 = t1;
        s0 = s1;
    }
    Ok(out)
}

/// `flow_zero_near_returns` for a torus winding.
pub fn winding_zero_near_returns(
    w: &TorusWinding,
    f: &TrigPolynomial,
    p: &TorusPoint,
    t_max: f64,
    eps: &FixedReal,
    grid: Option<f64>,
) -> Result<Vec<ReturnRecord>> {
    if !f.is_identically_zero() && f.eval(p).abs() <= TRIG_ZERO {
        return Err(LabError::ZeroAtStart);
    }
    let threshold = Threshold::new(eps)?;
    let mut out = Vec::new();
    for t in trig_zeros(w, f, p, t_max, grid)? {
        let tf = FixedReal::from_f64(t)?;
        let d = torus_flow(w, p, &tf)?.distance(p);
        match d.below(&threshold) {
            Some(true) => out.push(ReturnRecord {
                time: EventTime::Flow(tf),
                value: FixedReal::from_f64(sigma_trig(w, f, p, t)?)?,
                distance: Some(d.to_fixed()),
                in_set: None,
            }),
            Some(false) => {}
            None => return Err(LabError::precision()),
        }
    }
    Ok(out)
}
