//! Monte Carlo summaries, empirical CDFs and the two-sample Kolmogorov–Smirnov test.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean, standard error and a normal-approximation 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub mean: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
    pub n: usize,
}

impl McSummary {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(Error::InsufficientSamples { got: n, need: 2 });
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        let stderr = (var / n as f64).sqrt();
        Ok(Self { mean, stderr, ci95: (mean - 1.96 * stderr, mean + 1.96 * stderr), n })
    }

    /// Summary of `scale · X`.
    pub fn scaled(self, scale: f64) -> Self {
        let (a, b) = (self.ci95.0 * scale, self.ci95.1 * scale);
        Self {
            mean: self.mean * scale,
            stderr: self.stderr * scale.abs(),
            ci95: (a.min(b), a.max(b)),
            n: self.n,
        }
    }
}

/// Streaming accumulator with the same output as [`McSummary::from_samples`]
/// up to rounding; used where storing every replicate is wasteful.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn summary(&self) -> Result<McSummary> {
        if self.n < 2 {
            return Err(Error::InsufficientSamples { got: self.n, need: 2 });
        }
        let stderr = (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt();
        Ok(McSummary {
            mean: self.mean,
            stderr,
            ci95: (self.mean - 1.96 * stderr, self.mean + 1.96 * stderr),
            n: self.n,
        })
    }
}

/// `(a − b) / sqrt(sa² + sb²)`; zero when both the gap and the spread vanish.
pub fn z_score(a: f64, sa: f64, b: f64, sb: f64) -> f64 {
    let s = (sa * sa + sb * sb).sqrt();
    let gap = a - b;
    if s == 0.0 {
        if gap == 0.0 {
            0.0
        } else {
            gap.signum() * f64::INFINITY
        }
    } else {
        gap / s
    }
}

/// Right-continuous empirical distribution function.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InsufficientSamples { got: samples.len(), need: 2 });
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { sorted: samples })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// `#{xᵢ ≤ x} / n`
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// Supremum distance to a continuous reference CDF.
    pub fn sup_distance<F: Fn(f64) -> f64>(&self, cdf: F) -> f64 {
        let n = self.sorted.len() as f64;
        self.sorted.iter().enumerate().fold(0.0f64, |acc, (i, &x)| {
            let c = cdf(x);
            acc.max((((i + 1) as f64) / n - c).abs()).max((c - i as f64 / n).abs())
        })
    }
}

/// `[F̂(x+h) − F̂(x−h)] / (2h)`.
pub fn smoothed_density(cdf: &EmpiricalCdf, x: f64, bandwidth: f64) -> f64 {
    (cdf.eval(x + bandwidth) - cdf.eval(x - bandwidth)) / (2.0 * bandwidth)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
}

/// Survival function of the Kolmogorov distribution, `P(K > λ)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=200 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-18 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic p-value
/// (Stephens' small-sample correction of the effective size).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsTest> {
    for s in [a, b] {
        if s.len() < 2 {
            return Err(Error::InsufficientSamples { got: s.len(), need: 2 });
        }
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n && j < m {
        let v = if xs[i] <= ys[j] { xs[i] } else { ys[j] };
        while i < n && xs[i] <= v {
            i += 1;
        }
        while j < m && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n as f64 * m as f64 / (n + m) as f64).sqrt();
    let p_value = kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d);
    Ok(KsTest { statistic: d, p_value })
}
