//! Sample means and the Dvoretzky–Kiefer–Wolfowitz histogram check.

use serde::Serialize;

use crate::systems::Roof;

/// Running mean and variance (Welford).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MeanAccumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl MeanAccumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn standard_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// DKW bound: `P(sup |F_n − F| > ε) <= 2 exp(−2nε²)` solved for ε at the
/// given confidence.
pub fn dkw_epsilon(samples: u64, confidence: f64) -> f64 {
    ((2.0 / (1.0 - confidence)).ln() / (2.0 * samples as f64)).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramCheck {
    pub samples: u64,
    pub max_deviation: f64,
    pub epsilon: f64,
    pub passed: bool,
}

/// Compares the empirical distribution of cell indices (cells taken in
/// row-major order) with the expected cell probabilities through their
/// cumulative sums.
pub fn flattened_histogram_check(counts: &[u64], expected: &[f64], confidence: f64) -> HistogramCheck {
    assert_eq!(counts.len(), expected.len());
    let n: u64 = counts.iter().sum();
    let total: f64 = expected.iter().sum();
    let (mut emp, mut exp, mut worst) = (0u64, 0.0f64, 0.0f64);
    for (&c, &p) in counts.iter().zip(expected) {
        emp += c;
        exp += p / total;
        worst = worst.max((emp as f64 / n as f64 - exp).abs());
    }
    let epsilon = dkw_epsilon(n, confidence);
    HistogramCheck {
        samples: n,
        max_deviation: worst,
        epsilon,
        passed: worst <= epsilon,
    }
}

/// Counts of points on an `nx × ny` grid over `[0,1) × [0,y_max)`.
pub fn grid_counts(points: impl IntoIterator<Item = (f64, f64)>, nx: usize, ny: usize, y_max: f64) -> Vec<u64> {
    let mut counts = vec![0u64; nx * ny];
    for (x, y) in points {
        let i = ((x * nx as f64) as usize).min(nx - 1);
        let j = ((y / y_max * ny as f64) as usize).min(ny - 1);
        counts[i * ny + j] += 1;
    }
    counts
}

/// Expected share of each grid cell for the normalized area under `roof`,
/// on the grid of [`grid_counts`] with `y_max` at least the highest roof.
pub fn roof_cell_probabilities(roof: &Roof, nx: usize, ny: usize, y_max: f64) -> Vec<f64> {
    let starts: Vec<f64> = roof.cell_starts().iter().map(|s| s.to_f64()).collect();
    let heights: Vec<f64> = roof.heights().iter().map(|h| h.to_f64()).collect();
    let mut out = vec![0.0; nx * ny];
    for i in 0..nx {
        let (x0, x1) = (i as f64 / nx as f64, (i + 1) as f64 / nx as f64);
        for (c, &r) in heights.iter().enumerate() {
            let c0 = starts[c];
            let c1 = starts.get(c + 1).copied().unwrap_or(1.0);
            let w = (x1.min(c1) - x0.max(c0)).max(0.0);
            if w == 0.0 {
                continue;
            }
            for j in 0..ny {
                let (y0, y1) = (j as f64 * y_max / ny as f64, (j + 1) as f64 * y_max / ny as f64);
                out[i * ny + j] += w * (y1.min(r) - y0).max(0.0);
            }
        }
    }
    let total: f64 = out.iter().sum();
    out.iter().map(|v| v / total).collect()
}
