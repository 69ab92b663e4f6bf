//! One-dimensional quadrature: fixed Gauss–Legendre rules, a globally adaptive
//! Gauss–Legendre integrator, adaptive Simpson, and integrals against the
//! power kernel `z^{-α-1}` near a removable singularity.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{invalid, Error, Result};

/// Supported fixed Gauss–Legendre rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussRule {
    Gl8,
    Gl16,
    Gl32,
    Gl64,
}

impl GaussRule {
    pub fn points(self) -> usize {
        match self {
            GaussRule::Gl8 => 8,
            GaussRule::Gl16 => 16,
            GaussRule::Gl32 => 32,
            GaussRule::Gl64 => 64,
        }
    }

    pub fn from_points(n: usize) -> Result<Self> {
        match n {
            8 => Ok(GaussRule::Gl8),
            16 => Ok(GaussRule::Gl16),
            32 => Ok(GaussRule::Gl32),
            64 => Ok(GaussRule::Gl64),
            _ => Err(invalid("npoints", format!("{n} is not one of 8, 16, 32, 64"))),
        }
    }

    /// Nodes and weights on `[-1, 1]`.
    pub fn nodes_weights(self) -> &'static [(f64, f64)] {
        static CACHE: [OnceLock<Vec<(f64, f64)>>; 4] =
            [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
        let slot = match self {
            GaussRule::Gl8 => 0,
            GaussRule::Gl16 => 1,
            GaussRule::Gl32 => 2,
            GaussRule::Gl64 => 3,
        };
        CACHE[slot].get_or_init(|| legendre_nodes(self.points()))
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes_weights().iter().map(move |&(x, w)| (mid + half * x, half * w))
    }
}

// Newton iteration on P_n started from the Chebyshev-like guess.
fn legendre_nodes(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed-order Gauss–Legendre quadrature of `f` over `[a, b]`.
///
/// Exact for polynomials of degree at most `2·points − 1`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rule: GaussRule) -> f64 {
    rule.mapped(a, b).map(|(x, w)| w * f(x)).sum()
}

/// Options for [`integrate_with`].
#[derive(Debug, Clone)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    /// Interior points where the integrand has kinks or jumps.
    pub breakpoints: Vec<f64>,
}

impl QuadOptions {
    pub fn absolute(tol: f64) -> Self {
        Self { abs_tol: tol, rel_tol: 0.0, max_intervals: 20_000, breakpoints: Vec::new() }
    }

    pub fn relative(rel: f64, abs: f64) -> Self {
        Self { abs_tol: abs, rel_tol: rel, max_intervals: 20_000, breakpoints: Vec::new() }
    }

    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(points);
        self
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let mut coarse = 0.0;
    let mut fine = 0.0;
    let m = 0.5 * (a + b);
    for (x, w) in GaussRule::Gl16.mapped(a, b) {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::NonFinite { location: x });
        }
        coarse += w * v;
    }
    for (lo, hi) in [(a, m), (m, b)] {
        for (x, w) in GaussRule::Gl16.mapped(lo, hi) {
            let v = f(x);
            if !v.is_finite() {
                return Err(Error::NonFinite { location: x });
            }
            fine += w * v;
        }
    }
    Ok(Panel { a, b, value: fine, error: (fine - coarse).abs() })
}

/// Globally adaptive Gauss–Legendre integration (16-point rule compared
/// against its bisection), refining the panel with the largest error first.
pub fn integrate_with<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0, intervals: 0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(invalid("bounds", "integration bounds must be finite"));
    }
    let mut cuts: Vec<f64> = opts.breakpoints.iter().copied().filter(|&x| x > lo && x < hi).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lo);
    edges.extend(cuts);
    edges.push(hi);

    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        heap.push(panel(&f, w[0], w[1])?);
    }
    loop {
        let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target {
            return Ok(Quadrature { value: sign * value, error, intervals: heap.len() });
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        let tiny = (worst.b - worst.a) <= 4.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(1e-300);
        if heap.len() + 2 > opts.max_intervals || tiny {
            return Err(Error::Quadrature { achieved: error, requested: target });
        }
        heap.push(panel(&f, worst.a, m)?);
        heap.push(panel(&f, m, worst.b)?);
    }
}

/// Adaptive integration to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    integrate_with(f, a, b, &QuadOptions::absolute(tol)).map(|q| q.value)
}

/// Result of [`adaptive_simpson`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpsonResult {
    pub value: f64,
    /// Deepest recursion level that was needed.
    pub depth: usize,
}

/// Classic recursive adaptive Simpson rule with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_depth: usize) -> Result<SimpsonResult> {
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { location: x })
        }
    };
    let fa = eval(a)?;
    let fb = eval(b)?;
    let m = 0.5 * (a + b);
    let fm = eval(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut depth = 0;
    let value = simpson_step(&eval, a, b, fa, fm, fb, whole, tol, 0, max_depth, &mut depth)?;
    Ok(SimpsonResult { value, depth })
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> Result<f64>>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    level: usize,
    max_depth: usize,
    deepest: &mut usize,
) -> Result<f64> {
    *deepest = (*deepest).max(level);
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if level >= max_depth {
        return Err(Error::Quadrature { achieved: delta.abs() / 15.0, requested: tol });
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, level + 1, max_depth, deepest)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, level + 1, max_depth, deepest)?;
    Ok(l + r)
}

/// `∫₀ˣ f(z) z^{-α-1} dz` for `α ∈ (0, 1)` and `f(0) = 0`.
///
/// `lipschitz` is a constant `L` with `|f(z)| ≤ L·z` on `[0, x]`. It
/// certifies the size of the piece `[0, ε]` that is dropped, so the remaining
/// integral over `[ε, x]` is computed (in the variable `u = ln z`) to `tol/2`.
pub fn power_singular_integral<F: Fn(f64) -> f64>(
    f: F,
    alpha: f64,
    x: f64,
    lipschitz: Option<f64>,
    tol: f64,
) -> Result<f64> {
    let lip = lipschitz.ok_or_else(|| invalid("lipschitz", "a Lipschitz bound at the origin is required"))?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", format!("{alpha} not in (0, 1)")));
    }
    if !(lip >= 0.0 && lip.is_finite()) {
        return Err(invalid("lipschitz", "must be finite and non-negative"));
    }
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    if x <= 0.0 || lip == 0.0 {
        return Ok(0.0);
    }
    // L ε^{1-α} / (1-α) ≤ tol / 2
    let eps = ((1.0 - alpha) * 0.5 * tol / lip).powf(1.0 / (1.0 - alpha)).min(x);
    if eps >= x {
        return Ok(0.0);
    }
    let g = |u: f64| {
        let z = u.exp();
        f(z) * (-alpha * u).exp()
    };
    integrate_with(g, eps.ln(), x.ln(), &QuadOptions::relative(1e-13, 0.5 * tol)).map(|q| q.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn gl_polynomial_and_constant() {
        assert_abs_diff_eq!(gauss_legendre(|x| x * x * x, 0.0, 1.0, GaussRule::Gl8), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(gauss_legendre(|_| 1.0, -2.0, 3.5, GaussRule::Gl16), 5.5, epsilon = 1e-14);
        let e = gauss_legendre(|x: f64| (-x).exp(), 0.0, 1.0, GaussRule::Gl32);
        assert_abs_diff_eq!(e, 1.0 - (-1.0f64).exp(), epsilon = 1e-14);
    }

    #[test]
    fn gl_weights_sum_to_two() {
        for rule in [GaussRule::Gl8, GaussRule::Gl16, GaussRule::Gl32, GaussRule::Gl64] {
            let s: f64 = rule.nodes_weights().iter().map(|p| p.1).sum();
            assert_abs_diff_eq!(s, 2.0, epsilon = 1e-13);
        }
        assert!(GaussRule::from_points(12).is_err());
    }

    proptest! {
        #[test]
        fn gl_exact_for_random_polynomials(
            coeffs in proptest::collection::vec(-1.0f64..1.0, 1..16),
            a in -2.0f64..0.0,
            len in 0.1f64..3.0,
        ) {
            let b = a + len;
            let deg = coeffs.len() - 1; // ≤ 15 = 2·8 − 1
            let p = |x: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
            let exact: f64 = coeffs.iter().enumerate()
                .map(|(k, c)| c * (b.powi(k as i32 + 1) - a.powi(k as i32 + 1)) / (k as f64 + 1.0))
                .sum();
            prop_assert!(deg <= 15);
            let got = gauss_legendre(p, a, b, GaussRule::Gl8);
            prop_assert!((got - exact).abs() <= 1e-11 * (1.0 + exact.abs()));
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let q = integrate(|x: f64| (1.0 - x * x).max(0.0).sqrt(), -1.0, 1.0, 1e-10).unwrap();
        assert_abs_diff_eq!(q, std::f64::consts::FRAC_PI_2, epsilon = 1e-9);
    }

    #[test]
    fn adaptive_reports_non_finite() {
        let err = integrate(|x: f64| 1.0 / x, 0.0, 1.0, 1e-8).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. } | Error::Quadrature { .. }));
    }

    #[test]
    fn simpson_closed_forms() {
        let r = adaptive_simpson(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-10, 40).unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-9);
        assert!(r.depth > 0);
        let r = adaptive_simpson(|x: f64| x * x, 0.0, 3.0, 1e-12, 10).unwrap();
        assert_abs_diff_eq!(r.value, 9.0, epsilon = 1e-11);
        assert!(matches!(
            adaptive_simpson(|x: f64| x.sqrt(), 0.0, 1.0, 1e-15, 3),
            Err(Error::Quadrature { .. })
        ));
    }

    #[test]
    fn power_kernel_closed_forms() {
        let v = power_singular_integral(|z| z, 0.5, 1.0, Some(1.0), 1e-10).unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-9);
        let v = power_singular_integral(|z| z * z, 0.5, 1.0, Some(1.0), 1e-10).unwrap();
        assert_abs_diff_eq!(v, 2.0 / 3.0, epsilon = 1e-9);
        assert_eq!(power_singular_integral(|_| 0.0, 0.5, 1.0, Some(0.0), 1e-10).unwrap(), 0.0);
        assert!(power_singular_integral(|z| z, 0.5, 1.0, None, 1e-10).is_err());
    }
}
