use std::cmp::Ordering;
use std::io::Write;

use num_traits::Zero;

use super::phase::PhaseFunction;
use crate::error::{LabError, Result};
use crate::precision::FixedReal;
use crate::systems::{Roof, SpecialFlowState};

/// A node of a σ profile; `state` is the phase point at time `t`, taken
/// after gluing when `t` is a roof crossing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileNode {
    pub t: FixedReal,
    pub sigma: FixedReal,
    pub state: SpecialFlowState,
}

/// The piecewise-linear graph of `t ↦ σ(t, x)` on `[0, t_max]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaProfile {
    nodes: Vec<ProfileNode>,
    slopes: Vec<FixedReal>,
    crossings: u64,
}

/// A zero of σ found on a profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileZero {
    pub t: FixedReal,
    pub sigma: FixedReal,
    pub state: SpecialFlowState,
}

impl SigmaProfile {
    pub fn nodes(&self) -> &[ProfileNode] {
        &self.nodes
    }

    /// Slope of the segment starting at node `i`.
    pub fn slopes(&self) -> &[FixedReal] {
        &self.slopes
    }

    pub fn crossings(&self) -> u64 {
        self.crossings
    }

    pub fn t_max(&self) -> &FixedReal {
        &self.nodes.last().unwrap().t
    }

    pub fn end_state(&self) -> &SpecialFlowState {
        &self.nodes.last().unwrap().state
    }

    pub fn final_sigma(&self) -> &FixedReal {
        &self.nodes.last().unwrap().sigma
    }

    /// Index of the segment holding `t`, chosen by stored values. Near a
    /// node either neighbour gives the same σ up to the tracked error.
    fn segment(&self, t: &FixedReal) -> Result<usize> {
        if t.certain_sign() == Some(Ordering::Less)
            || t.certain_cmp(self.t_max()) == Some(Ordering::Greater)
        {
            return Err(LabError::invalid("time outside the profile range"));
        }
        let i = self.nodes.partition_point(|n| n.t.mantissa() <= t.mantissa());
        Ok(i.saturating_sub(1).min(self.slopes.len().saturating_sub(1)))
    }

    pub fn eval(&self, t: &FixedReal) -> Result<FixedReal> {
        if self.slopes.is_empty() {
            return Ok(self.nodes[0].sigma.clone());
        }
        let i = self.segment(t)?;
        let n = &self.nodes[i];
        Ok(&n.sigma + &self.slopes[i].mul(&(t - &n.t)))
    }

    /// `T_t x`.
    pub fn state_at(&self, t: &FixedReal) -> Result<SpecialFlowState> {
        if self.slopes.is_empty() {
            return Ok(self.nodes[0].state.clone());
        }
        let i = self.segment(t)?;
        let n = &self.nodes[i];
        if n.t.mantissa() == t.mantissa() {
            return Ok(n.state.clone());
        }
        Ok(SpecialFlowState::new(n.state.a, &n.state.b + &(t - &n.t)))
    }

    /// Zeros at positive times, ascending.
    ///
    /// A run of σ ≡ 0 is reported once, by its left endpoint. With
    /// `every_node` set (for an identically zero observable) each node is
    /// reported instead.
    pub fn zeros(&self, every_node: bool) -> Result<Vec<ProfileZero>> {
        let mut out = Vec::new();
        for (i, node) in self.nodes.iter().enumerate().skip(1) {
            let prev = &self.nodes[i - 1];
            let slope = &self.slopes[i - 1];
            let sign = sign_of(&node.sigma).map_err(|e| e.at_step(i as u64))?;
            let prev_sign = sign_of(&prev.sigma).map_err(|e| e.at_step(i as u64 - 1))?;
            if prev_sign != Ordering::Equal && sign != Ordering::Equal && prev_sign != sign {
                // Interior crossing: σ_prev + v (t − t_prev) = 0.
                let dt = (-&prev.sigma).div(slope)?;
                let t = &prev.t + &dt;
                out.push(ProfileZero {
                    sigma: &prev.sigma + &slope.mul(&dt),
                    state: SpecialFlowState::new(prev.state.a, &prev.state.b + &dt),
                    t,
                });
            }
            if sign == Ordering::Equal {
                let flat_run = prev_sign == Ordering::Equal && slope.mantissa().is_zero();
                if every_node || !flat_run {
                    out.push(ProfileZero {
                        t: node.t.clone(),
                        sigma: node.sigma.clone(),
                        state: node.state.clone(),
                    });
                }
            }
        }
        Ok(out)
    }

    /// Two-column CSV `t,sigma` with `digits` decimals.
    pub fn write_csv<W: Write>(&self, w: W, digits: u32) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| LabError::Invalid(format!("csv: {e}"));
        out.write_record(["t", "sigma"]).map_err(io)?;
        for n in &self.nodes {
            out.write_record([n.t.to_decimal(digits), n.sigma.to_decimal(digits)])
                .map_err(io)?;
        }
        out.flush().map_err(|e| LabError::Invalid(format!("csv: {e}")))?;
        Ok(())
    }
}

/// Certain sign, with `Equal` only for an exact zero.
fn sign_of(x: &FixedReal) -> Result<Ordering> {
    x.certain_sign().ok_or_else(LabError::precision)
}

/// `sigma_profile`: the exact piecewise-linear σ along the orbit of `x`.
///
/// A node is placed at every band edge and roof crossing, and at `t_max`.
pub fn sigma_profile(
    roof: &Roof,
    f: &PhaseFunction,
    x: &SpecialFlowState,
    t_max: &FixedReal,
) -> Result<SigmaProfile> {
    if f.roof() != roof {
        return Err(LabError::invalid("phase function belongs to a different roof"));
    }
    if t_max.certain_sign() != Some(Ordering::Greater) {
        return Err(LabError::invalid("t_max must be positive"));
    }
    if !roof.contains(x)? {
        return Err(LabError::invalid("start is not under the roof"));
    }
    let (mut cell, mut band) = f.locate(x)?;
    let mut orbit = roof.base().orbit(x.a);
    orbit.next();
    let mut a = x.a;
    let mut b = x.b.clone();
    let mut t = FixedReal::zero();
    let mut sigma = FixedReal::zero();
    let mut crossings = 0u64;
    let mut nodes = vec![ProfileNode {
        t: t.clone(),
        sigma: sigma.clone(),
        state: x.clone(),
    }];
    let mut slopes = Vec::new();

    loop {
        let v = f.bands(cell)[band].value.clone();
        let (top, at_roof) = f.band_top(cell, band);
        let dt = top - &b;
        let rem = t_max - &t;
        let ord = rem
            .certain_cmp(&dt)
            .ok_or(LabError::PrecisionExhausted { step: Some(crossings) })?;
        slopes.push(v.clone());
        if ord == Ordering::Less {
            sigma = (&sigma + &v.mul(&rem)).checked()?;
            b = &b + &rem;
            nodes.push(ProfileNode {
                t: t_max.clone(),
                sigma,
                state: SpecialFlowState::new(a, b),
            });
            break;
        }
        sigma = (&sigma + &v.mul(&dt)).checked()?;
        t = if ord == Ordering::Equal {
            t_max.clone()
        } else {
            (&t + &dt).checked()?
        };
        if at_roof {
            if crossings >= roof.crossing_budget() {
                return Err(LabError::CrossingBudgetExceeded);
            }
            crossings += 1;
            a = orbit
                .next()
                .expect("orbit is infinite")
                .map_err(|_| LabError::PrecisionExhausted { step: Some(crossings) })?;
            b = FixedReal::zero();
            cell = f.cell_of(&a).map_err(|e| e.at_step(crossings))?;
            band = 0;
        } else {
            b = top.clone();
            band += 1;
        }
        nodes.push(ProfileNode {
            t: t.clone(),
            sigma: sigma.clone(),
            state: SpecialFlowState::new(a, b.clone()),
        });
        if ord == Ordering::Equal {
            break;
        }
    }
    Ok(SigmaProfile {
        nodes,
        slopes,
        crossings,
    })
}

/// `sigma_eval`: σ(t, x).
pub fn sigma_eval(
    roof: &Roof,
    f: &PhaseFunction,
    x: &SpecialFlowState,
    t: &FixedReal,
) -> Result<FixedReal> {
    match t.certain_sign() {
        Some(Ordering::Equal) => Ok(FixedReal::zero()),
        Some(Ordering::Greater) => Ok(sigma_profile(roof, f, x, t)?.final_sigma().clone()),
        Some(Ordering::Less) => Err(LabError::invalid("time must be non-negative")),
        None => Err(LabError::precision()),
    }
}
