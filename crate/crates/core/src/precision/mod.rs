//! Fixed-point circle arithmetic with tracked error bounds.

mod angle;
mod cf;
mod circle;
mod fixed;

pub use angle::{AngleKind, AngleSpec, Preset};
pub(crate) use angle::rational_residue;
pub use cf::{cf_convergents, convergent_gap, ContinuedFraction, Convergent};
pub use circle::{CircleDistance, CirclePoint, Threshold, U192};
pub use fixed::{guarded_compare, Comparison, FixedReal, MAX_ERR_ULPS, SCALE_BITS};

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{LabError, Result};

/// `{x0 + n·alpha}` computed in one shot, with error at most
/// `n·err(alpha) + err(x0)`.
pub fn frac_orbit_point(alpha: &FixedReal, n: u64, x0: &FixedReal) -> Result<FixedReal> {
    let err = (n as u128) * (alpha.err_ulps() as u128) + x0.err_ulps() as u128;
    if err > MAX_ERR_ULPS as u128 {
        return Err(LabError::PrecisionExhausted { step: Some(n) });
    }
    let m = x0.mantissa() + alpha.mantissa() * BigInt::from(n);
    let one = FixedReal::one();
    Ok(FixedReal::new(m.mod_floor(one.mantissa()), err as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_point_examples() {
        let third = FixedReal::from_ratio_i64(1, 3).unwrap();
        let p = frac_orbit_point(&third, 5, &FixedReal::zero()).unwrap();
        let two_thirds = FixedReal::from_ratio_i64(2, 3).unwrap();
        assert_eq!(guarded_compare(&p, &two_thirds), Comparison::Ambiguous);
        assert!(p.err_ulps() <= 5 * third.err_ulps() + 2);

        let x0: FixedReal = "0.37".parse().unwrap();
        let g = AngleSpec::golden();
        assert_eq!(frac_orbit_point(g.resolved(), 0, &x0).unwrap(), x0);

        let p2 = frac_orbit_point(g.resolved(), 2, &FixedReal::zero()).unwrap();
        assert_eq!(p2.to_decimal(30), "0.236067977499789696409173668731");
    }

    #[test]
    fn exhausted_margin() {
        let g = AngleSpec::golden();
        let big = FixedReal::zero().with_err(MAX_ERR_ULPS);
        assert!(frac_orbit_point(g.resolved(), 1, &big).is_err());
    }
}
