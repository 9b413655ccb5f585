use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::systems::{TorusPoint, TorusWinding};

/// `a·cos 2π(jx+ky) + b·sin 2π(jx+ky)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigMode {
    pub j: i64,
    pub k: i64,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

/// A trigonometric polynomial on the torus without constant term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<TrigMode>", into = "Vec<TrigMode>")]
pub struct TrigPolynomial {
    modes: Vec<TrigMode>,
}

impl TryFrom<Vec<TrigMode>> for TrigPolynomial {
    type Error = LabError;

    fn try_from(modes: Vec<TrigMode>) -> Result<Self> {
        TrigPolynomial::new(modes)
    }
}

impl From<TrigPolynomial> for Vec<TrigMode> {
    fn from(p: TrigPolynomial) -> Self {
        p.modes
    }
}

fn frac(x: f64) -> f64 {
    x - x.floor()
}

impl TrigPolynomial {
    pub fn new(modes: Vec<TrigMode>) -> Result<Self> {
        if modes.iter().any(|m| m.j == 0 && m.k == 0) {
            return Err(LabError::invalid("frequency (0,0) would add a constant term"));
        }
        if modes.iter().any(|m| !m.cos.is_finite() || !m.sin.is_finite()) {
            return Err(LabError::invalid("amplitudes must be finite"));
        }
        Ok(TrigPolynomial { modes })
    }

    /// `cos 2πx`.
    pub fn cos_x() -> Self {
        TrigPolynomial::new(vec![TrigMode {
            j: 1,
            k: 0,
            cos: 1.0,
            sin: 0.0,
        }])
        .unwrap()
    }

    pub fn modes(&self) -> &[TrigMode] {
        &self.modes
    }

    pub fn is_identically_zero(&self) -> bool {
        self.modes.iter().all(|m| m.cos == 0.0 && m.sin == 0.0)
    }

    /// Largest `|j|` or `|k|`.
    pub fn max_frequency(&self) -> i64 {
        self.modes
            .iter()
            .map(|m| m.j.abs().max(m.k.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, p: &TorusPoint) -> f64 {
        let (x, y) = (p.x.to_f64(), p.y.to_f64());
        self.modes
            .iter()
            .map(|m| {
                let th = TAU * frac(m.j as f64 * x + m.k as f64 * y);
                m.cos * th.cos() + m.sin * th.sin()
            })
            .sum()
    }

    /// Fails when some `j + kγ` vanishes for a rational slope.
    pub fn check_resonance(&self, w: &TorusWinding) -> Result<()> {
        if let Some((p, q)) = w.gamma().as_rational() {
            let hit = self.modes.iter().any(|m| {
                i128::from(m.j) * i128::from(q) + i128::from(m.k) * i128::from(p) == 0
            });
            if hit {
                return Err(LabError::ResonantFrequency);
            }
        }
        Ok(())
    }
}

/// `sigma_trig`: closed-form `∫₀ᵗ f(x+s, y+γs) ds`.
pub fn sigma_trig(w: &TorusWinding, f: &TrigPolynomial, p: &TorusPoint, t: f64) -> Result<f64> {
    f.check_resonance(w)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(LabError::invalid("time must be finite and non-negative"));
    }
    let gamma = w.slope_f64();
    let (x, y) = (p.x.to_f64(), p.y.to_f64());
    let mut total = 0.0;
    for m in f.modes() {
        let nu = m.j as f64 + m.k as f64 * gamma;
        let omega = TAU * nu;
        let th0 = TAU * frac(m.j as f64 * x + m.k as f64 * y);
        // Half the phase advance, reduced to [-½, ½] turns.
        let half = nu * t / 2.0;
        let h = TAU * (half - half.round());
        let mid = th0 + h;
        let s = h.sin();
        total += (m.cos * 2.0 * mid.cos() * s + m.sin * 2.0 * mid.sin() * s) / omega;
    }
    Ok(total)
}
