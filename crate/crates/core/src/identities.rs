//! Poisson, Erlang and compound-Poisson identities, each side computed
//! independently: series, quadrature, and recursions.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Result};
use crate::numerics::{integrate_with, QuadOptions};

/// A probability distribution on `{0, 1, …, len−1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeDistribution {
    probs: Vec<f64>,
}

impl LatticeDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(invalid("q", "empty support"));
        }
        if probs.iter().any(|&q| !q.is_finite() || q < 0.0) {
            return Err(invalid("q", "probabilities must be finite and nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid("q", format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { probs })
    }

    pub fn point_mass(j: usize) -> Self {
        let mut probs = vec![0.0; j + 1];
        probs[j] = 1.0;
        Self { probs }
    }

    /// Uniform on the given support points.
    pub fn uniform_on(support: &[usize]) -> Result<Self> {
        let Some(&max) = support.iter().max() else {
            return Err(invalid("support", "empty"));
        };
        let mut probs = vec![0.0; max + 1];
        for &j in support {
            probs[j] += 1.0 / support.len() as f64;
        }
        Self::new(probs)
    }

    /// `q_j`, zero outside the support.
    pub fn q(&self, j: usize) -> f64 {
        self.probs.get(j).copied().unwrap_or(0.0)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn max_support(&self) -> usize {
        self.probs.len() - 1
    }
}

fn check_rate(theta: f64) -> Result<()> {
    if theta.is_finite() && theta >= 0.0 {
        Ok(())
    } else {
        Err(invalid("theta", format!("{theta} must be finite and nonnegative")))
    }
}

/// `Po(θ; j)` via log-gamma.
pub fn poisson_pmf(theta: f64, j: u64) -> f64 {
    if theta == 0.0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    (j as f64 * theta.ln() - theta - ln_gamma(j as f64 + 1.0)).exp()
}

/// `Σ_{j≥k} Po(θ; j)`.
///
/// Below the mode the tail is small and summed upward directly; otherwise
/// it is one minus the lower partial sum.
pub fn poisson_tail(theta: f64, k: u64) -> Result<f64> {
    check_rate(theta)?;
    if k == 0 {
        return Ok(1.0);
    }
    if theta == 0.0 {
        return Ok(0.0);
    }
    if (k as f64) > theta {
        let mut term = poisson_pmf(theta, k);
        let mut sum = 0.0;
        let mut j = k;
        while term > sum * 1e-17 && term > 0.0 {
            sum += term;
            j += 1;
            term *= theta / j as f64;
        }
        Ok(sum)
    } else {
        let mut term = (-theta).exp();
        let mut partial = 0.0;
        for j in 0..k {
            if j > 0 {
                term *= theta / j as f64;
            }
            partial += term;
        }
        if term == 0.0 || !partial.is_finite() {
            // e^{−θ} underflowed; fall back to log-space terms
            partial = (0..k).map(|j| poisson_pmf(theta, j)).sum();
        }
        Ok((1.0 - partial).max(0.0))
    }
}

/// `t^{k−1} e^{−t} / (k−1)!`
fn gamma_kernel(k: u64, t: f64) -> f64 {
    if k == 1 {
        return (-t).exp();
    }
    if t <= 0.0 {
        return 0.0;
    }
    ((k - 1) as f64 * t.ln() - t - ln_gamma(k as f64)).exp()
}

/// `∫₀^θ t^{k−1} e^{−t} / (k−1)! dt` by adaptive quadrature.
pub fn poisson_tail_integral(theta: f64, k: u64, tol: f64) -> Result<f64> {
    check_rate(theta)?;
    if k == 0 {
        return Err(invalid("k", "must be at least 1"));
    }
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    let q = integrate_with(|t| gamma_kernel(k, t), 0.0, theta, &QuadOptions::relative(1e-14, tol * 1e-3))?;
    Ok(q.value)
}

/// `Er(n, θ; y) = θⁿ y^{n−1} e^{−θy} / (n−1)!`
pub fn erlang_density(n: u64, theta: f64, y: f64) -> f64 {
    if y < 0.0 {
        return 0.0;
    }
    theta * gamma_kernel(n, theta * y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErlangCdf {
    /// `∫₀^x Er(n, θ; y) dy`
    pub direct: f64,
    /// `(xⁿ/(n−1)!) ∫₀^θ t^{n−1} e^{−tx} dt`
    pub via_integral: f64,
    /// `Σ_{j≥n} Po(θx; j)`
    pub via_poisson: f64,
}

impl ErlangCdf {
    pub fn max_gap(&self) -> f64 {
        let d1 = (self.direct - self.via_integral).abs();
        let d2 = (self.direct - self.via_poisson).abs();
        let d3 = (self.via_integral - self.via_poisson).abs();
        d1.max(d2).max(d3)
    }
}

pub fn erlang_cdf(n: u64, theta: f64, x: f64) -> Result<ErlangCdf> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(invalid("theta", "must be positive"));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(invalid("x", "must be nonnegative"));
    }
    let opts = QuadOptions::relative(1e-14, 1e-15);
    let direct = integrate_with(|y| erlang_density(n, theta, y), 0.0, x, &opts)?.value;
    // x^n t^{n−1} e^{−tx}/(n−1)! = x · gamma_kernel(n, t x)
    let via_integral = integrate_with(|t| x * gamma_kernel(n, t * x), 0.0, theta, &opts)?.value;
    let via_poisson = poisson_tail(theta * x, n)?;
    Ok(ErlangCdf { direct, via_integral, via_poisson })
}

/// `CPo(θ, Q; k) = Σ_n Po(θ; n) Q^{*n}(k)`, truncated once the Poisson
/// tail beyond `n` drops below `tol`.
pub fn cpois_pmf_direct(theta: f64, q: &LatticeDistribution, k: usize, tol: f64) -> Result<f64> {
    check_rate(theta)?;
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    let trunc = |v: &[f64]| -> Vec<f64> { v.iter().copied().take(k + 1).collect() };
    let base = trunc(q.probs());
    let mut power = vec![0.0; k + 1];
    power[0] = 1.0;
    let mut total = 0.0;
    let mut n = 0u64;
    loop {
        total += poisson_pmf(theta, n) * power[k];
        if poisson_tail(theta, n + 1)? < tol {
            return Ok(total);
        }
        let mut next = vec![0.0; k + 1];
        for (i, &a) in power.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in base.iter().enumerate().take(k + 1 - i) {
                next[i + j] += a * b;
            }
        }
        power = next;
        n += 1;
    }
}

/// `CPo(θ, Q; j)` for `j = 0..=k` by the Panjer recursion.
pub fn cpois_pmf_panjer_all(theta: f64, q: &LatticeDistribution, k: usize) -> Result<Vec<f64>> {
    check_rate(theta)?;
    let mut p = Vec::with_capacity(k + 1);
    p.push((-theta * (1.0 - q.q(0))).exp());
    for j in 1..=k {
        let s: f64 = (1..=j).map(|i| i as f64 * q.q(i) * p[j - i]).sum();
        p.push(theta / j as f64 * s);
    }
    Ok(p)
}

pub fn cpois_pmf_panjer(theta: f64, q: &LatticeDistribution, k: usize) -> Result<f64> {
    Ok(cpois_pmf_panjer_all(theta, q, k)?[k])
}

/// Monomial coefficients of `c_j(θ) = e^{(1−q₀)θ} CPo(θ, Q; j)` for
/// `j = 0..=k`, from `c₀ ≡ 1` and `c_j(θ) = Σ_{i<j} q_{j−i} ∫₀^θ c_i(t) dt`.
pub fn cpois_polynomials(q: &LatticeDistribution, k: usize) -> Vec<Vec<f64>> {
    let mut polys: Vec<Vec<f64>> = vec![vec![1.0]];
    for j in 1..=k {
        let mut c = vec![0.0; j + 1];
        for (i, pi) in polys.iter().enumerate() {
            let w = q.q(j - i);
            if w == 0.0 {
                continue;
            }
            for (d, &a) in pi.iter().enumerate() {
                c[d + 1] += w * a / (d + 1) as f64;
            }
        }
        polys.push(c);
    }
    polys
}

pub fn cpois_pmf_polyrec(theta: f64, q: &LatticeDistribution, k: usize) -> Result<f64> {
    check_rate(theta)?;
    let poly = cpois_polynomials(q, k).pop().expect("at least c_0");
    let value = poly.iter().rev().fold(0.0, |acc, &a| acc * theta + a);
    Ok((-(1.0 - q.q(0)) * theta).exp() * value)
}

/// `F(θ, Q; x) = Σ_{j ≤ x} CPo(θ, Q; j)`
pub fn cpois_cdf(theta: f64, q: &LatticeDistribution, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Ok(0.0);
    }
    Ok(cpois_pmf_panjer_all(theta, q, x.floor() as usize)?.iter().sum())
}

/// Central difference of `F` in `θ` minus the right-hand side
/// `Σ_z q_z F(θ, x−z) − F(θ, x)`.
pub fn cpois_cdf_ode_residual(theta: f64, q: &LatticeDistribution, x: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < theta) {
        return Err(invalid("delta", format!("{delta} not in (0, θ)")));
    }
    let lhs = (cpois_cdf(theta + delta, q, x)? - cpois_cdf(theta - delta, q, x)?) / (2.0 * delta);
    let mut rhs = -cpois_cdf(theta, q, x)?;
    for (z, &qz) in q.probs().iter().enumerate() {
        if qz != 0.0 {
            rhs += qz * cpois_cdf(theta, q, x - z as f64)?;
        }
    }
    Ok(lhs - rhs)
}

/// The two lattice forms of `d/dθ CPo(θ, Q; k)`:
/// `Σ_{j≠k} q_{k−j} p_j − (1−q₀) p_k` and `Σ_j q_{k−j} p_j − p_k`.
pub fn lattice_derivative_forms(theta: f64, q: &LatticeDistribution, k: usize) -> Result<(f64, f64)> {
    let p = cpois_pmf_panjer_all(theta, q, k)?;
    let off_diagonal: f64 = (0..k).map(|j| q.q(k - j) * p[j]).sum();
    let first = off_diagonal - (1.0 - q.q(0)) * p[k];
    let second = off_diagonal + q.q(0) * p[k] - p[k];
    Ok((first, second))
}
