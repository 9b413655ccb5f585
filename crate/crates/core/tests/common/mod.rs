#![allow(dead_code)]

use ergolab::cocycles::StepCocycle;
use ergolab::precision::{CirclePoint, FixedReal};
use num_rational::Ratio;
use rand::Rng;

pub type Q = Ratio<i64>;

pub fn q(n: i64, d: i64) -> Q {
    Ratio::new(n, d)
}

pub fn frac(x: Q) -> Q {
    x - x.floor()
}

pub fn fx(s: &str) -> FixedReal {
    s.parse().unwrap()
}

pub fn cp(s: &str) -> CirclePoint {
    CirclePoint::parse(s).unwrap()
}

pub fn cp_q(x: Q) -> CirclePoint {
    CirclePoint::from_ratio(*x.numer(), *x.denom()).unwrap()
}

/// Step function on `[0,1)` given by sorted cell starts (first is 0).
#[derive(Clone, Debug)]
pub struct GridStep {
    pub starts: Vec<Q>,
    pub values: Vec<i64>,
}

impl GridStep {
    pub fn eval(&self, y: Q) -> i64 {
        let i = self.starts.iter().rposition(|s| *s <= y).unwrap();
        self.values[i]
    }

    pub fn cocycle(&self) -> StepCocycle {
        StepCocycle::integer(self.starts.iter().map(|s| cp_q(*s)).collect(), self.values.clone()).unwrap()
    }
}

/// A zero-mean integer step with 2–4 cells on the eighths grid.
pub fn random_grid_step<R: Rng>(rng: &mut R) -> GridStep {
    loop {
        let cells = rng.gen_range(2..=4);
        let mut cuts: Vec<i64> = Vec::new();
        while cuts.len() < cells - 1 {
            let c = rng.gen_range(1..8);
            if !cuts.contains(&c) {
                cuts.push(c);
            }
        }
        cuts.sort_unstable();
        let mut bounds = vec![0];
        bounds.extend(&cuts);
        bounds.push(8);
        let widths: Vec<i64> = bounds.windows(2).map(|w| w[1] - w[0]).collect();
        let mut values: Vec<i64> = (0..cells - 1).map(|_| rng.gen_range(-3..=3)).collect();
        let partial: i64 = values.iter().zip(&widths).map(|(v, w)| v * w).sum();
        let last = widths[cells - 1];
        if partial % last != 0 || values.iter().all(|&v| v == 0) {
            continue;
        }
        values.push(-partial / last);
        return GridStep {
            starts: bounds[..cells].iter().map(|&b| q(b, 8)).collect(),
            values,
        };
    }
}

/// Orbit table `{x + k·p/q}` for `k = 0..=n`.
pub fn rational_orbit(p: i64, den: i64, x: Q, n: u64) -> Vec<Q> {
    (0..=n as i64).map(|k| frac(x + q(k * p % den, den))).collect()
}

pub fn circle_distance(a: Q, b: Q) -> Q {
    let d = frac(a - b);
    d.min(Q::from_integer(1) - d)
}

/// Adaptive Simpson quadrature.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// All coprime `p/q` with `1 <= p < q <= q_max`.
pub fn rational_angles(q_max: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for den in 2..=q_max {
        for p in 1..den {
            if num_integer::gcd(p, den) == 1 {
                out.push((p, den));
            }
        }
    }
    out
}

pub fn fx_q(x: Q) -> FixedReal {
    FixedReal::from_ratio_i64(*x.numer(), *x.denom()).unwrap()
}

/// Compares `find_zero_sums`, `near_returns` and `induce_point` with
/// exhaustive orbit tables for every angle `p/q` with `q <= q_max`.
/// Returns a description of each disagreement.
pub fn rational_oracle_mismatches(q_max: i64, n_max: u64, cocycles_per_angle: usize, seed: u64) -> Vec<String> {
    use ergolab::induced::induce_point;
    use ergolab::precision::AngleSpec;
    use ergolab::recurrence::{find_zero_sums, near_returns, TargetSet};
    use ergolab::systems::BaseMap;
    use rand::SeedableRng;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    let x = q(1, 1000);
    // No multiple of 1/q with q <= 12 equals 3/20.
    let eps = q(3, 20);
    for (p, den) in rational_angles(q_max) {
        let s = BaseMap::rotation(AngleSpec::rational(p, den).unwrap());
        let table = rational_orbit(p, den, x, n_max);

        let near: Vec<u64> = (1..=n_max).filter(|&n| circle_distance(table[n as usize], x) < eps).collect();
        match near_returns(&s, cp_q(x), n_max, &fx_q(eps)) {
            Ok(got) if got == near => {}
            other => bad.push(format!("near_returns {p}/{den}: {:?}", other.map(|v| v.len()))),
        }

        for _ in 0..cocycles_per_angle {
            let g = random_grid_step(&mut rng);
            let f = g.cocycle();
            let mut sum = 0i64;
            let mut zeros = Vec::new();
            for n in 1..=n_max {
                sum += g.eval(table[n as usize - 1]);
                if sum == 0 {
                    zeros.push(n);
                }
            }
            match find_zero_sums(&s, &f, cp_q(x), n_max) {
                Ok(recs) => {
                    let got: Vec<u64> = recs.iter().map(|r| r.time.as_step().unwrap()).collect();
                    if got != zeros {
                        bad.push(format!("find_zero_sums {p}/{den} {g:?}"));
                    }
                }
                Err(e) => bad.push(format!("find_zero_sums {p}/{den}: {e}")),
            }

            let lo = rng.gen_range(0..7);
            let hi = rng.gen_range(lo + 1..=8);
            let (lo, hi) = (q(lo, 8), q(hi, 8));
            let a = TargetSet::intervals(vec![(fx_q(lo), fx_q(hi))]).unwrap();
            let start = lo + q(1, 1000);
            let orbit = rational_orbit(p, den, start, n_max);
            let in_a = |y: Q| lo <= y && y < hi;
            let expected = (1..=n_max as usize).find(|&n| in_a(orbit[n])).map(|n| {
                let ft: i64 = orbit[..n].iter().map(|&y| g.eval(y)).sum();
                (n as u64, ft, orbit[n])
            });
            match (induce_point(&s, &f, &a, cp_q(start), n_max), expected) {
                (Ok(r), Some((n, ft, y))) => {
                    let d = r.return_point.distance(&cp_q(y)).to_fixed();
                    if r.n != n || r.f_tilde != ft || d.mantissa() > &(r.return_point.err_ulps() + 1).into() {
                        bad.push(format!("induce_point {p}/{den} [{lo},{hi}): {:?} vs {:?}", (r.n, r.f_tilde), (n, ft)));
                    }
                }
                (Err(ergolab::LabError::ReturnBudgetExceeded), None) => {}
                (got, want) => bad.push(format!("induce_point {p}/{den}: {got:?} vs {want:?}")),
            }
        }
    }
    bad
}

/// Exact `(E[n], E[f̃])` over uniform `x ∈ [lo, hi)` for the rotation by
/// `p/q`, by splitting `[lo, hi)` where some orbit point of the period hits
/// a breakpoint of `g` or of the target, and evaluating one point per piece.
pub fn piecewise_induced(p: i64, den: i64, g: &GridStep, lo: Q, hi: Q) -> (Q, Q) {
    let mut cuts = vec![lo, hi];
    let marks: Vec<Q> = g.starts.iter().copied().chain([lo, hi]).collect();
    for k in 0..den {
        for &m in &marks {
            let c = frac(m - q(k * p % den, den));
            if lo < c && c < hi {
                cuts.push(c);
            }
        }
    }
    cuts.sort();
    cuts.dedup();
    let in_a = |y: Q| lo <= y && y < hi;
    let (mut en, mut ef) = (Q::from_integer(0), Q::from_integer(0));
    for w in cuts.windows(2) {
        let mid = (w[0] + w[1]) / 2;
        let orbit = rational_orbit(p, den, mid, den as u64);
        let n = (1..=den as usize).find(|&n| in_a(orbit[n])).expect("period returns");
        let ft: i64 = orbit[..n].iter().map(|&y| g.eval(y)).sum();
        let len = w[1] - w[0];
        en += len * n as i64;
        ef += len * ft;
    }
    (en / (hi - lo), ef / (hi - lo))
}
