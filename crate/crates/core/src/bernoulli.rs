//! Exact pivotality calculus for finite Bernoulli systems.
//!
//! Outcomes of `m ≤ 24` independent Bernoulli(θ) coordinates are encoded as
//! bit masks. Every exact operation enumerates all `2^m` outcomes once,
//! caches the event's truth table, and groups contributions by popcount so
//! that probabilities are polynomials `Σ_j c_j θ^j (1−θ)^{m−j}` with integer
//! `c_j`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::numerics::{integrate_with, QuadOptions};

/// Largest number of coordinates handled by exact enumeration.
pub const MAX_EXACT_BITS: usize = 24;

type Indicator = dyn Fn(u32) -> bool + Send + Sync;

/// An event `A ⊆ {0,1}^m` given by its indicator on bit masks
/// (bit `i` of the mask is coordinate `i`).
#[derive(Clone)]
pub struct BooleanEvent {
    m: usize,
    name: String,
    indicator: Arc<Indicator>,
    monotone: bool,
}

impl fmt::Debug for BooleanEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BooleanEvent")
            .field("m", &self.m)
            .field("name", &self.name)
            .field("monotone", &self.monotone)
            .finish()
    }
}

impl BooleanEvent {
    pub fn new<F>(m: usize, name: impl Into<String>, monotone: bool, indicator: F) -> Result<Self>
    where
        F: Fn(u32) -> bool + Send + Sync + 'static,
    {
        if m == 0 || m > 32 {
            return Err(invalid("m", format!("{m} coordinates not in 1..=32")));
        }
        Ok(Self { m, name: name.into(), indicator: Arc::new(indicator), monotone })
    }

    /// `{S_m ≥ k}`
    pub fn at_least(m: usize, k: usize) -> Result<Self> {
        Self::new(m, format!("S_{m}>={k}"), true, move |x| x.count_ones() as usize >= k)
    }

    /// `{all coordinates equal 1}`
    pub fn all_ones(m: usize) -> Result<Self> {
        let full = mask(m);
        Self::new(m, "all_ones", true, move |x| x & full == full)
    }

    pub fn full(m: usize) -> Result<Self> {
        Self::new(m, "full", true, |_| true)
    }

    /// A monotone DNF: the event holds when some clause has all its bits set.
    pub fn monotone_dnf(m: usize, clauses: Vec<u32>) -> Result<Self> {
        let full = mask(m);
        if clauses.iter().any(|c| c & !full != 0) {
            return Err(invalid("clauses", "clause uses a coordinate beyond m"));
        }
        Self::new(m, format!("dnf{clauses:?}"), true, move |x| clauses.iter().any(|&c| x & c == c))
    }

    /// An arbitrary event from its truth table (index = outcome mask).
    pub fn from_truth_table(m: usize, table: Vec<bool>) -> Result<Self> {
        if m > MAX_EXACT_BITS || table.len() != 1usize << m {
            return Err(invalid("table", "length must be 2^m with m ≤ 24"));
        }
        Self::new(m, "table", false, move |x| table[x as usize])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn holds(&self, x: u32) -> bool {
        (self.indicator)(x)
    }

    fn truth_table(&self) -> Result<Vec<bool>> {
        if self.m > MAX_EXACT_BITS {
            return Err(Error::TooLarge { what: "coordinates", value: self.m, max: MAX_EXACT_BITS });
        }
        let n = 1u32 << self.m;
        let table: Vec<bool> = (0..n).map(|x| self.holds(x)).collect();
        // spot re-evaluation: the indicator must be a pure function
        for x in (0..n).step_by(((n / 64) as usize).max(1)) {
            assert_eq!(table[x as usize], self.holds(x), "event `{}` is not a pure function", self.name);
        }
        Ok(table)
    }
}

fn mask(m: usize) -> u32 {
    if m >= 32 {
        u32::MAX
    } else {
        (1u32 << m) - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PivotalCounts {
    pub plus: u32,
    pub minus: u32,
}

/// `N⁺ = #{i : x^{(i)} ∈ A, x_{(i)} ∉ A}` and `N⁻ = #{i : x_{(i)} ∈ A, x^{(i)} ∉ A}`.
pub fn pivotal_counts(event: &BooleanEvent, x: u32) -> Result<PivotalCounts> {
    if x & !mask(event.m) != 0 {
        return Err(invalid("x", format!("outcome has bits beyond m = {}", event.m)));
    }
    Ok(counts_with(|y| event.holds(y), event.m, x))
}

fn counts_with<F: Fn(u32) -> bool>(holds: F, m: usize, x: u32) -> PivotalCounts {
    let mut out = PivotalCounts { plus: 0, minus: 0 };
    for i in 0..m {
        let up = holds(x | (1 << i));
        let down = holds(x & !(1 << i));
        if up && !down {
            out.plus += 1;
        } else if down && !up {
            out.minus += 1;
        }
    }
    out
}

/// `P_θ(A)` as a polynomial, stored in the Bernstein basis
/// `Σ_j c_j θ^j (1−θ)^{m−j}` with `c_j = #{x ∈ A : |x| = j}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventPolynomial {
    pub m: usize,
    pub bernstein_counts: Vec<u64>,
}

impl EventPolynomial {
    /// Monomial coefficients `a_d` of `Σ_d a_d θ^d` (exact integers).
    pub fn coefficients(&self) -> Vec<f64> {
        let m = self.m;
        let binom = binomial_table(m);
        (0..=m)
            .map(|d| {
                let mut acc: i128 = 0;
                for (j, &c) in self.bernstein_counts.iter().enumerate().take(d + 1) {
                    let term = c as i128 * binom[m - j][d - j] as i128;
                    if (d - j) % 2 == 0 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
                acc as f64
            })
            .collect()
    }

    pub fn eval(&self, theta: f64) -> f64 {
        bernstein_eval(&self.bernstein_counts.iter().map(|&c| c as f64).collect::<Vec<_>>(), self.m, theta)
    }

    /// `d/dθ` of the polynomial, differentiated term by term in the Bernstein basis.
    pub fn derivative(&self, theta: f64) -> f64 {
        let m = self.m as i32;
        self.bernstein_counts
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                let j = j as i32;
                let c = c as f64;
                let mut d = 0.0;
                if j > 0 {
                    d += j as f64 * theta.powi(j - 1) * (1.0 - theta).powi(m - j);
                }
                if j < m {
                    d -= (m - j) as f64 * theta.powi(j) * (1.0 - theta).powi(m - j - 1);
                }
                c * d
            })
            .sum()
    }
}

fn bernstein_eval(weights: &[f64], m: usize, theta: f64) -> f64 {
    weights
        .iter()
        .enumerate()
        .map(|(j, w)| w * theta.powi(j as i32) * (1.0 - theta).powi((m - j) as i32))
        .sum()
}

fn binomial_table(m: usize) -> Vec<Vec<u64>> {
    let mut t = vec![vec![0u64; m + 1]; m + 1];
    for n in 0..=m {
        t[n][0] = 1;
        for k in 1..=n {
            t[n][k] = t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0 };
        }
    }
    t
}

fn check_theta(theta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&theta) {
        Ok(())
    } else {
        Err(invalid("theta", format!("{theta} not in [0, 1]")))
    }
}

pub fn event_polynomial(event: &BooleanEvent) -> Result<EventPolynomial> {
    let table = event.truth_table()?;
    let mut counts = vec![0u64; event.m + 1];
    for (x, &inside) in table.iter().enumerate() {
        if inside {
            counts[(x as u32).count_ones() as usize] += 1;
        }
    }
    Ok(EventPolynomial { m: event.m, bernstein_counts: counts })
}

/// Exact `P_θ(A)` by enumeration.
pub fn event_probability(event: &BooleanEvent, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(event_polynomial(event)?.eval(theta))
}

/// Per-popcount sums `s_j = Σ_{|x| = j} (N⁺ − N⁻)(x)`, so that
/// `E_θ[N⁺ − N⁻] = Σ_j s_j θ^j (1−θ)^{m−j}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PivotalProfile {
    pub m: usize,
    pub plus_by_popcount: Vec<u64>,
    pub minus_by_popcount: Vec<u64>,
}

impl PivotalProfile {
    pub fn expected_plus(&self, theta: f64) -> f64 {
        bernstein_eval(&self.plus_by_popcount.iter().map(|&v| v as f64).collect::<Vec<_>>(), self.m, theta)
    }

    pub fn expected_minus(&self, theta: f64) -> f64 {
        bernstein_eval(&self.minus_by_popcount.iter().map(|&v| v as f64).collect::<Vec<_>>(), self.m, theta)
    }

    /// `E_θ[N⁺ − N⁻]`
    pub fn russo_derivative(&self, theta: f64) -> f64 {
        let w: Vec<f64> = self
            .plus_by_popcount
            .iter()
            .zip(&self.minus_by_popcount)
            .map(|(&p, &q)| p as f64 - q as f64)
            .collect();
        bernstein_eval(&w, self.m, theta)
    }
}

pub fn pivotal_profile(event: &BooleanEvent) -> Result<PivotalProfile> {
    let table = event.truth_table()?;
    let mut plus = vec![0u64; event.m + 1];
    let mut minus = vec![0u64; event.m + 1];
    for x in 0..table.len() as u32 {
        let c = counts_with(|y| table[y as usize], event.m, x);
        let j = x.count_ones() as usize;
        plus[j] += c.plus as u64;
        minus[j] += c.minus as u64;
    }
    Ok(PivotalProfile { m: event.m, plus_by_popcount: plus, minus_by_popcount: minus })
}

/// `E_θ[N⁺_A − N⁻_A]`, which equals `d/dθ P_θ(A)`.
pub fn russo_derivative(event: &BooleanEvent, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(pivotal_profile(event)?.russo_derivative(theta))
}

/// `C(n, k)` in floating point.
pub fn binomial_coefficient(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `Bin(n, p; j)`
pub fn binomial_pmf(n: u64, p: f64, j: u64) -> f64 {
    if j > n {
        return 0.0;
    }
    binomial_coefficient(n, j) * p.powi(j as i32) * (1.0 - p).powi((n - j) as i32)
}

/// `NB(r, p; j) = C(j+r−1, j) p^r (1−p)^j`
pub fn negative_binomial_pmf(r: u64, p: f64, j: u64) -> f64 {
    binomial_coefficient(j + r - 1, j) * p.powi(r as i32) * (1.0 - p).powi(j as i32)
}

/// `n!/((a)!(b)!) ∫₀^p t^a (1−t)^b dt` with `n = a + b + 1`.
fn beta_integral(a: u32, b: u32, p: f64) -> Result<f64> {
    let n = (a + b + 1) as u64;
    let prefactor = n as f64 * binomial_coefficient(n - 1, a as u64);
    let q = integrate_with(
        |t: f64| t.powi(a as i32) * (1.0 - t).powi(b as i32),
        0.0,
        p,
        &QuadOptions::relative(1e-14, 0.0),
    )?;
    Ok(prefactor * q.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinomialIdentityReport {
    pub n: u32,
    pub k: u32,
    pub p: f64,
    /// `Σ_{j=k}^n Bin(n, p; j)`
    pub tail: f64,
    /// `n!/((k−1)!(n−k)!) ∫₀^p t^{k−1}(1−t)^{n−k} dt`
    pub integral: f64,
    pub gap: f64,
}

pub fn identity_report_binomial(n: u32, k: u32, p: f64) -> Result<BinomialIdentityReport> {
    if !(1 <= k && k <= n) {
        return Err(invalid("k", format!("need 1 ≤ k ≤ n, got k = {k}, n = {n}")));
    }
    check_theta(p)?;
    let tail: f64 = (k..=n).map(|j| binomial_pmf(n as u64, p, j as u64)).sum();
    let integral = beta_integral(k - 1, n - k, p)?;
    Ok(BinomialIdentityReport { n, k, p, tail, integral, gap: (tail - integral).abs() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NegBinIdentityReport {
    pub r: u32,
    pub k: u32,
    pub p: f64,
    /// `P(Bin(k+r−1, p) ≥ r)`
    pub event_probability: f64,
    /// `(k+r−1)!/((k−1)!(r−1)!) ∫₀^p t^{r−1}(1−t)^{k−1} dt`
    pub integral: f64,
    /// `Σ_{j=0}^{k−1} NB(r, p; j)`
    pub nb_sum_below_k: f64,
    /// `Σ_{j=0}^{k} NB(r, p; j)`, the summation range as usually printed
    pub nb_sum_through_k: f64,
    pub gap_event: f64,
    pub gap_below_k: f64,
    pub gap_through_k: f64,
}

pub fn identity_report_negbin(r: u32, k: u32, p: f64) -> Result<NegBinIdentityReport> {
    if r == 0 || k == 0 {
        return Err(invalid("r, k", "both must be at least 1"));
    }
    check_theta(p)?;
    let n = (k + r - 1) as u64;
    let event_probability: f64 = (r as u64..=n).map(|j| binomial_pmf(n, p, j)).sum();
    let integral = beta_integral(r - 1, k - 1, p)?;
    let nb_sum_below_k: f64 = (0..k as u64).map(|j| negative_binomial_pmf(r as u64, p, j)).sum();
    let nb_sum_through_k = nb_sum_below_k + negative_binomial_pmf(r as u64, p, k as u64);
    Ok(NegBinIdentityReport {
        r,
        k,
        p,
        event_probability,
        integral,
        nb_sum_below_k,
        nb_sum_through_k,
        gap_event: (event_probability - integral).abs(),
        gap_below_k: (nb_sum_below_k - integral).abs(),
        gap_through_k: (nb_sum_through_k - integral).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;
    use proptest::prelude::*;
    use rand::Rng;

    fn bits(x: &[u8]) -> u32 {
        x.iter().enumerate().fold(0, |acc, (i, &b)| acc | ((b as u32) << i))
    }

    #[test]
    fn binomial_event_pivotal_counts() {
        let (n, k) = (7, 3);
        let a = BooleanEvent::at_least(n, k).unwrap();
        let x = bits(&[1, 0, 0, 1, 0, 0, 0]); // S = k − 1
        assert_eq!(pivotal_counts(&a, x).unwrap(), PivotalCounts { plus: (n - k + 1) as u32, minus: 0 });
        let x = bits(&[1, 0, 1, 1, 0, 0, 0]); // S = k
        assert_eq!(pivotal_counts(&a, x).unwrap(), PivotalCounts { plus: k as u32, minus: 0 });
        assert!(pivotal_counts(&a, 1 << 9).is_err());
    }

    #[test]
    fn full_space_has_no_pivotal_coordinates() {
        let a = BooleanEvent::full(5).unwrap();
        for x in 0..32 {
            assert_eq!(pivotal_counts(&a, x).unwrap(), PivotalCounts { plus: 0, minus: 0 });
        }
        assert!((event_probability(&a, 0.3).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(russo_derivative(&a, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn negative_binomial_event_pivotal_counts() {
        // A = {S_{k+r−1} ≥ r}; at S = r every one of the r ones is pivotal.
        let (r, k) = (3usize, 4usize);
        let a = BooleanEvent::at_least(k + r - 1, r).unwrap();
        let x = bits(&[1, 1, 1, 0, 0, 0]);
        assert_eq!(pivotal_counts(&a, x).unwrap(), PivotalCounts { plus: r as u32, minus: 0 });
        let x = bits(&[1, 0, 1, 0, 0, 0]); // S = r − 1
        assert_eq!(pivotal_counts(&a, x).unwrap(), PivotalCounts { plus: k as u32, minus: 0 });
    }

    #[test]
    fn probability_examples() {
        assert_eq!(event_probability(&BooleanEvent::all_ones(3).unwrap(), 0.5).unwrap(), 0.125);
        let a = BooleanEvent::at_least(2, 1).unwrap();
        assert!((event_probability(&a, 0.5).unwrap() - 0.75).abs() < 1e-15);
        assert!((russo_derivative(&a, 0.5).unwrap() - 1.0).abs() < 1e-15);
        for m in 1..8 {
            let a = BooleanEvent::all_ones(m).unwrap();
            let th: f64 = 0.37;
            let want = m as f64 * th.powi(m as i32 - 1);
            assert!((russo_derivative(&a, th).unwrap() - want).abs() < 1e-14);
        }
        assert!(event_probability(&a, 1.5).is_err());
    }

    #[test]
    fn monomial_coefficients_are_exact() {
        // 1 − (1−θ)² = 2θ − θ²
        let p = event_polynomial(&BooleanEvent::at_least(2, 1).unwrap()).unwrap();
        assert_eq!(p.coefficients(), vec![0.0, 2.0, -1.0]);
    }

    #[test]
    fn exact_ops_are_capped() {
        let a = BooleanEvent::new(25, "big", true, |_| true).unwrap();
        assert!(matches!(event_probability(&a, 0.5), Err(Error::TooLarge { .. })));
    }

    fn random_dnf(rng: &mut impl Rng, m: usize) -> BooleanEvent {
        let clauses = (0..rng.random_range(1..5))
            .map(|_| (0..m).filter(|_| rng.random_bool(0.3)).fold(0u32, |c, i| c | 1 << i))
            .collect();
        BooleanEvent::monotone_dnf(m, clauses).unwrap()
    }

    #[test]
    fn monotone_events_have_no_negative_pivots() {
        for trial in 0..30 {
            let mut rng = RngStream::derive(5, trial).rng();
            let m = rng.random_range(1..=10);
            let a = random_dnf(&mut rng, m);
            for x in 0..(1u32 << m) {
                assert_eq!(pivotal_counts(&a, x).unwrap().minus, 0);
            }
        }
    }

    #[test]
    fn russo_matches_polynomial_derivative() {
        for trial in 0..40 {
            let mut rng = RngStream::derive(6, trial).rng();
            let m = rng.random_range(1..=10);
            let a = if trial % 2 == 0 {
                random_dnf(&mut rng, m)
            } else {
                BooleanEvent::from_truth_table(m, (0..1 << m).map(|_| rng.random_bool(0.5)).collect()).unwrap()
            };
            let poly = event_polynomial(&a).unwrap();
            let coeffs = poly.coefficients();
            let profile = pivotal_profile(&a).unwrap();
            for i in 1..10 {
                let th = i as f64 / 10.0;
                let horner_deriv = coeffs.iter().enumerate().skip(1).rev()
                    .fold(0.0, |acc, (d, c)| acc * th + d as f64 * c);
                let r = profile.russo_derivative(th);
                assert!((r - poly.derivative(th)).abs() < 1e-12);
                assert!((r - horner_deriv).abs() < 1e-9);
            }
        }
    }

    proptest! {
        #[test]
        fn pivotal_counts_invariant_under_relabeling(seed in 0u64..500) {
            let mut rng = RngStream::derive(seed, 3).rng();
            let m = 6usize;
            let table: Vec<bool> = (0..1 << m).map(|_| rng.random_bool(0.5)).collect();
            let mut perm: Vec<usize> = (0..m).collect();
            for i in (1..m).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            let apply = move |x: u32, perm: &[usize]| (0..m).fold(0u32, |acc, i| acc | (((x >> i) & 1) << perm[i]));
            let a = BooleanEvent::from_truth_table(m, table.clone()).unwrap();
            let p2 = perm.clone();
            // B(σx) = A(x)
            let mut inv = vec![0usize; m];
            for (i, &p) in perm.iter().enumerate() { inv[p] = i; }
            let b = BooleanEvent::new(m, "relabelled", false, move |y| table[apply(y, &inv) as usize]).unwrap();
            let x = rng.random_range(0..1u32 << m);
            prop_assert_eq!(pivotal_counts(&a, x).unwrap(), pivotal_counts(&b, apply(x, &p2)).unwrap());
        }
    }

    #[test]
    fn binomial_identity_examples() {
        let r = identity_report_binomial(2, 1, 0.5).unwrap();
        assert!((r.tail - 0.75).abs() < 1e-15 && (r.integral - 0.75).abs() < 1e-14);
        let r = identity_report_binomial(1, 1, 0.3).unwrap();
        assert!((r.tail - 0.3).abs() < 1e-15 && (r.integral - 0.3).abs() < 1e-14);
        assert!(identity_report_binomial(3, 4, 0.3).is_err());
    }

    #[test]
    fn negbin_summation_range_discrepancy() {
        let r = identity_report_negbin(1, 1, 0.5).unwrap();
        assert!((r.integral - 0.5).abs() < 1e-14);
        assert!((r.event_probability - 0.5).abs() < 1e-15);
        assert!((r.nb_sum_below_k - 0.5).abs() < 1e-15);
        assert!((r.nb_sum_through_k - 0.75).abs() < 1e-15);
        assert!(r.gap_through_k > 0.2);
    }
}
