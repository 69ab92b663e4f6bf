//! Truncated LePage series `Σ Γ_k^{−1/α} ε_k`.
//!
//! `Γ_k` are arrival times of a rate-`θ` Poisson process and `ε_k` are i.i.d.
//! with law `σ/θ`, so the points `Γ_k^{−1/α} ε_k` form a Poisson process with
//! intensity `Λ_θ`. The series is cut at radius `ρ` (all points with
//! `Γ_k < ρ^{−α}` are kept). The discarded points form a Poisson process
//! with intensity `Λ_θ` restricted to `{|z| < ρ}`; depending on
//! [`TailCompensation`], they are replaced by nothing, by their mean, or by
//! a Gaussian with their mean and covariance.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::Serialize;

use super::spectral::StableParams;
use crate::error::{invalid, Result};

/// Cap on the expected number of kept series terms.
pub const DEFAULT_MAX_TERMS: f64 = 1e5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TailCompensation {
    /// Drop the small jumps. Needs `α < 1` for a finite error bound.
    None,
    /// Replace them by their mean `Σ w_i u_i α ρ^{1−α}/(1−α)` (zero for `α ≥ 1`).
    Mean,
    /// Replace them by a Gaussian with their mean and covariance.
    MeanAndGaussian,
}

#[derive(Debug, Clone, Serialize)]
pub struct LePageSampler {
    params: StableParams,
    directions: Vec<Vec<f64>>,
    cumulative: Vec<f64>,
    /// Arrival-time threshold `ρ^{−α}`.
    gamma_max: f64,
    rho: f64,
    shift: Vec<f64>,
    gauss_scale: Vec<f64>,
    compensation: TailCompensation,
    error_bound: f64,
    capped: bool,
}

/// `θ α ρ^{p−α} / (p−α)`: the `p`-th absolute moment measure of the
/// discarded jumps, `∫_{|z|<ρ} |z|^p Λ_θ(dz)`.
fn small_jump_moment(theta: f64, alpha: f64, rho: f64, p: f64) -> f64 {
    theta * alpha * rho.powf(p - alpha) / (p - alpha)
}

impl LePageSampler {
    /// Chooses `ρ` so that [`Self::error_bound`] is at most `trunc_tol`,
    /// subject to an expected `max_terms` kept terms.
    ///
    /// The bound is `E|tail|` for [`TailCompensation::None`] (only `α < 1`),
    /// `(E|tail − mean|²)^{1/2}` for `Mean`, and the leading discarded
    /// cumulant size `∫_{|z|<ρ}|z|^p dΛ_θ` (`p = 4` for symmetric, `3`
    /// otherwise) for `MeanAndGaussian`.
    pub fn new(params: &StableParams, trunc_tol: f64, compensation: TailCompensation, max_terms: f64) -> Result<Self> {
        if !(trunc_tol > 0.0) {
            return Err(invalid("trunc_tol", "must be positive"));
        }
        if !(max_terms >= 1.0) {
            return Err(invalid("max_terms", "must be at least 1"));
        }
        let alpha = params.alpha();
        let theta = params.theta();
        if compensation == TailCompensation::None && alpha >= 1.0 {
            return Err(invalid("compensation", "an uncompensated tail needs α < 1"));
        }
        let symmetric = params.spectral().is_symmetric();
        let p = match compensation {
            TailCompensation::None => 1.0,
            TailCompensation::Mean => 2.0,
            TailCompensation::MeanAndGaussian if symmetric => 4.0,
            TailCompensation::MeanAndGaussian => 3.0,
        };
        let bound_at = |rho: f64| {
            let m = small_jump_moment(theta, alpha, rho, p);
            if compensation == TailCompensation::Mean {
                m.sqrt()
            } else {
                m
            }
        };
        let target = if compensation == TailCompensation::Mean { trunc_tol * trunc_tol } else { trunc_tol };
        let mut rho = (target * (p - alpha) / (theta * alpha)).powf(1.0 / (p - alpha));
        let mut gamma_max = rho.powf(-alpha);
        let mut capped = false;
        if theta * gamma_max > max_terms {
            gamma_max = max_terms / theta;
            rho = gamma_max.powf(-1.0 / alpha);
            capped = true;
        }
        let dim = params.dim();
        let mut shift = vec![0.0; dim];
        let mut gauss_scale = Vec::new();
        if compensation != TailCompensation::None && alpha < 1.0 {
            let m = alpha * rho.powf(1.0 - alpha) / (1.0 - alpha);
            for (u, w) in params.spectral().atoms() {
                for (s, ui) in shift.iter_mut().zip(u) {
                    *s += w * ui * m;
                }
            }
        }
        if compensation == TailCompensation::MeanAndGaussian {
            let v = alpha * rho.powf(2.0 - alpha) / (2.0 - alpha);
            gauss_scale = params.spectral().atoms().map(|(_, w)| (w * v).sqrt()).collect();
        }
        let mut acc = 0.0;
        let cumulative = params
            .spectral()
            .atoms()
            .map(|(_, w)| {
                acc += w / theta;
                acc
            })
            .collect();
        Ok(Self {
            params: params.clone(),
            directions: params.spectral().atoms().map(|(u, _)| u.to_vec()).collect(),
            cumulative,
            gamma_max,
            rho,
            shift,
            gauss_scale,
            compensation,
            error_bound: bound_at(rho),
            capped,
        })
    }

    /// Default sampler: Gaussian compensation, at most [`DEFAULT_MAX_TERMS`] terms.
    pub fn with_tol(params: &StableParams, trunc_tol: f64) -> Result<Self> {
        Self::new(params, trunc_tol, TailCompensation::MeanAndGaussian, DEFAULT_MAX_TERMS)
    }

    pub fn params(&self) -> &StableParams {
        &self.params
    }

    pub fn cut_radius(&self) -> f64 {
        self.rho
    }

    pub fn expected_terms(&self) -> f64 {
        self.params.theta() * self.gamma_max
    }

    pub fn error_bound(&self) -> f64 {
        self.error_bound
    }

    /// True when the term cap, not the tolerance, fixed the cut radius.
    pub fn is_capped(&self) -> bool {
        self.capped
    }

    pub fn compensation(&self) -> TailCompensation {
        self.compensation
    }

    fn pick<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cumulative.iter().position(|&c| u < c).unwrap_or(self.cumulative.len() - 1)
    }

    fn arrival<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let e: f64 = rng.sample(Exp1);
        e / self.params.theta()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let inv = -1.0 / self.params.alpha();
        let mut out = self.shift.clone();
        let mut gamma = self.arrival(rng);
        while gamma < self.gamma_max {
            let r = gamma.powf(inv);
            let u = &self.directions[self.pick(rng)];
            for (o, ui) in out.iter_mut().zip(u) {
                *o += r * ui;
            }
            gamma += self.arrival(rng);
        }
        for (u, s) in self.directions.iter().zip(&self.gauss_scale) {
            let z: f64 = rng.sample(StandardNormal);
            for (o, ui) in out.iter_mut().zip(u) {
                *o += s * z * ui;
            }
        }
        out
    }

    /// The first `n` raw partial sums `Σ_{k≤N} Γ_k^{−1/α} ε_k`, `N = 1..=n`,
    /// ignoring the cut and compensation.
    pub fn raw_partial_sums<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<Vec<f64>> {
        let inv = -1.0 / self.params.alpha();
        let mut acc = vec![0.0; self.params.dim()];
        let mut gamma = 0.0;
        (0..n)
            .map(|_| {
                gamma += self.arrival(rng);
                let r = gamma.powf(inv);
                let u = &self.directions[self.pick(rng)];
                for (a, ui) in acc.iter_mut().zip(u) {
                    *a += r * ui;
                }
                acc.clone()
            })
            .collect()
    }
}

/// One sample from a freshly built default sampler.
pub fn sample_stable<R: Rng + ?Sized>(params: &StableParams, rng: &mut R, trunc_tol: f64) -> Result<Vec<f64>> {
    Ok(LePageSampler::with_tol(params, trunc_tol)?.sample(rng))
}

/// Upper bound on `E Σ_{k>n} Γ_k^{−1/α}` for rate-`θ` arrivals and `α < 1`:
/// `θ^{1/α} Σ_{k>n} Γ(k−1/α)/Γ(k)`. The first `10⁵` terms are summed
/// exactly; the rest is bounded by comparison with `∫ x^{−1/α} dx`.
pub fn lepage_tail_bound(alpha: f64, theta: f64, n: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", "the tail is summable only for α < 1"));
    }
    let s = 1.0 / alpha;
    if (n as f64) < s {
        return Err(invalid("n", format!("terms with k ≤ 1/α = {s} have infinite mean")));
    }
    use statrs::function::gamma::ln_gamma;
    let first = n + 1;
    let mut t = (ln_gamma(first as f64 - s) - ln_gamma(first as f64)).exp();
    let mut sum = 0.0;
    let mut k = first;
    for _ in 0..100_000 {
        sum += t;
        t *= (k as f64 - s) / k as f64;
        k += 1;
    }
    // t_j ≤ t_k (k/j)^s for j ≥ k, so Σ_{j≥k} t_j ≤ t_k (1 + k/(s−1))
    sum += t * (1.0 + k as f64 / (s - 1.0));
    Ok(theta.powf(s) * sum)
}
