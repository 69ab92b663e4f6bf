use std::sync::Arc;

use serde::Serialize;

use super::body::{BoundaryNode, ConvexBody};
use crate::error::{invalid, Error, Result};
use crate::numerics::{replicate, z_score, GaussRule, McSummary, RngStream, StreamRng};
use crate::process::{
    integrate_over, sample_binomial, sample_poisson, Density, IntensityMeasure, PointConfiguration, Region,
    Regularity, Statistic,
};

/// Absolute tolerance of the volume integrals behind [`steiner_derivative_check`].
const STEINER_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteinerCheck {
    /// Central difference of `t ↦ ∫_{K_t∖K} f`.
    pub fd_value: f64,
    /// `∫_{∂K_t} f dH^{n−1}`
    pub boundary_value: f64,
    pub gap: f64,
}

/// Compares the derivative of `t ↦ ∫_{K_t∖K} f dx` with the boundary
/// integral of `f` over `∂K_t`. Needs `0 < δ ≤ t`.
pub fn steiner_derivative_check<F>(body: &ConvexBody, f: F, t: f64, delta: f64) -> Result<SteinerCheck>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("{t} must be positive")));
    }
    if !(delta > 0.0 && delta <= t) {
        return Err(invalid("delta", format!("{delta} must lie in (0, t]")));
    }
    // ∫_K f cancels in the difference.
    let upper = integrate_over(&body.parallel_set(t + delta)?, &f, STEINER_TOL)?;
    let lower = integrate_over(&body.parallel_set(t - delta)?, &f, STEINER_TOL)?;
    let fd_value = (upper - lower) / (2.0 * delta);
    let boundary_value = body.boundary_integral(t, &f)?;
    Ok(SteinerCheck { fd_value, boundary_value, gap: (fd_value - boundary_value).abs() })
}

/// Two estimates of `d/dt E g(·)` at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CroftonReport {
    /// Finite-difference estimate from sampled processes on `K_s`, `s` near `t`.
    pub lhs_fd: f64,
    pub lhs_stderr: f64,
    /// Boundary-integral estimate.
    pub rhs: f64,
    pub rhs_stderr: f64,
    /// `(lhs_fd − rhs) / sqrt(lhs_stderr² + rhs_stderr²)`
    pub z: f64,
}

impl CroftonReport {
    fn new(lhs: f64, lhs_se: f64, rhs: McSummary) -> Self {
        Self {
            lhs_fd: lhs,
            lhs_stderr: lhs_se,
            rhs: rhs.mean,
            rhs_stderr: rhs.stderr,
            z: z_score(lhs, lhs_se, rhs.mean, rhs.stderr),
        }
    }
}

/// Finite-difference stencil in `t`: `Σ cᵢ F(t + sᵢ δ) / δ`.
///
/// Central when `δ ≤ t`; otherwise (in particular at `t = 0`) the one-sided
/// second-order stencil `(−3F(t) + 4F(t+δ) − F(t+2δ)) / 2δ`.
fn stencil(t: f64, delta: f64) -> Vec<(f64, f64)> {
    if delta <= t {
        vec![(-delta, -0.5), (delta, 0.5)]
    } else {
        vec![(0.0, -1.5), (delta, 2.0), (2.0 * delta, -0.5)]
    }
}

fn check_common(g: &Statistic, t: f64, reps: usize, delta: f64) -> Result<()> {
    if g.regularity() == Regularity::Unrestricted {
        return Err(invalid("g", format!("statistic `{}` declares no bound", g.name())));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("{t} must be finite and non-negative")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid("delta", "must be positive"));
    }
    if reps < 2 {
        return Err(Error::InsufficientSamples { got: reps, need: 2 });
    }
    Ok(())
}

fn measure_on(body: &ConvexBody, t: f64, h: &Density) -> Result<IntensityMeasure> {
    IntensityMeasure::new(Arc::new(body.parallel_set(t)?), h.clone(), 1.0)
}

/// Boundary nodes with `h` folded into the weights. For a segment at `t = 0`
/// the nodes run along the segment itself with weight `2 h dH¹`: its relative
/// interior is where the normal cone is one-dimensional, which doubles the
/// curvature measure there.
fn weighted_nodes(body: &ConvexBody, t: f64, h: &Density) -> Result<Vec<BoundaryNode>> {
    let mut nodes = if t == 0.0 && !body.is_full_dimensional() {
        let super::Shape::Segment { a, b } = body.shape() else { unreachable!("only segments are lower-dimensional") };
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        GaussRule::Gl32
            .mapped(0.0, 1.0)
            .map(|(s, w)| BoundaryNode {
                point: vec![a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])],
                weight: 2.0 * w * len,
            })
            .collect()
    } else {
        body.boundary_nodes(t)?
    };
    for n in &mut nodes {
        n.weight *= h.eval(&n.point);
    }
    Ok(nodes)
}

/// `Σ_nodes w · g(φ + δ_x)`, reusing one buffer.
fn node_sum(g: &Statistic, phi: &PointConfiguration, nodes: &[BoundaryNode]) -> f64 {
    let mut buf = phi.clone();
    nodes
        .iter()
        .map(|n| {
            buf.push(&n.point);
            let v = g.eval(&buf);
            buf.pop();
            n.weight * v
        })
        .sum()
}

/// Checks `d/dt E g(η_t) = ∫_{∂K_t} E[g(η_t + δ_x) − g(η_t)] h(x) dH^{n−1}(x)`
/// for the Poisson process `η_t` with intensity `h dx` on `K_t`.
///
/// The left side samples `η` once on the outermost parallel set of the
/// stencil and obtains the inner processes by restriction. The right side
/// draws an independent pool of `η_t` shared by all boundary nodes. At
/// `t = 0` for a segment the integral runs over the segment with weight 2.
#[allow(clippy::too_many_arguments)]
pub fn crofton_poisson_check(
    g: &Statistic,
    body: &ConvexBody,
    h: &Density,
    t: f64,
    reps: usize,
    delta: f64,
    stream: &RngStream,
) -> Result<CroftonReport> {
    check_common(g, t, reps, delta)?;
    let steps = stencil(t, delta);
    let outer = steps.iter().map(|s| t + s.0).fold(0.0, f64::max);
    let mu_outer = measure_on(body, outer, h)?;
    let lhs_values = replicate(&stream.child(0), reps, |rng| {
        let eta = sample_poisson(&mu_outer, rng);
        let dist: Vec<f64> = eta.points().map(|p| body.distance(p)).collect();
        steps
            .iter()
            .map(|&(s, c)| {
                let mut inner = PointConfiguration::with_capacity(eta.dim(), eta.len());
                for (p, d) in eta.points().zip(&dist) {
                    if *d <= t + s {
                        inner.push(p);
                    }
                }
                c * g.eval(&inner)
            })
            .sum::<f64>()
            / delta
    });
    let lhs = McSummary::from_samples(&lhs_values)?;

    let nodes = weighted_nodes(body, t, h)?;
    let total_weight: f64 = nodes.iter().map(|n| n.weight).sum();
    let inner = body.parallel_set(t)?;
    let mu_t = if inner.volume() == Some(0.0) { None } else { Some(measure_on(body, t, h)?) };
    let rhs_values = replicate(&stream.child(1), reps, |rng| {
        let eta = match &mu_t {
            Some(mu) => sample_poisson(mu, rng),
            None => PointConfiguration::empty(body.dim()),
        };
        node_sum(g, &eta, &nodes) - total_weight * g.eval(&eta)
    });
    let rhs = McSummary::from_samples(&rhs_values)?;
    Ok(CroftonReport::new(lhs.mean, lhs.stderr, rhs))
}

/// Checks `d/dt E g(ξ_t) = (m/λ(K_t)) ∫_{∂K_t} E[g(ξ'_t + δ_x) − g(ξ_t)] h dH^{n−1}`
/// for the binomial process `ξ_t` of `m` points with law `h dx / λ(K_t)` on
/// `K_t`, where `ξ'_t` has `m − 1` points.
///
/// Each stencil radius is sampled independently. On the right side `ξ_t` is
/// `ξ'_t` plus one more independent point, which keeps the integrand bounded
/// by twice the bound of `g`.
#[allow(clippy::too_many_arguments)]
pub fn crofton_binomial_check(
    g: &Statistic,
    body: &ConvexBody,
    h: &Density,
    t: f64,
    m: usize,
    reps: usize,
    delta: f64,
    stream: &RngStream,
) -> Result<CroftonReport> {
    check_common(g, t, reps, delta)?;
    if m == 0 {
        return Err(invalid("m", "a binomial process needs at least one point"));
    }
    let base_mass = body.parallel_mass(0.0, h, 1e-10)?;
    if !(base_mass > 0.0) {
        return Err(invalid("body", "λ(K) must be positive"));
    }

    let mut lhs = 0.0;
    let mut lhs_var = 0.0;
    for (j, &(s, c)) in stencil(t, delta).iter().enumerate() {
        let mu = measure_on(body, t + s, h)?;
        let values = replicate(&stream.child(j as u64), reps, |rng| {
            g.eval(&sample_binomial(&mu, m, rng).expect("positive mass"))
        });
        let e = McSummary::from_samples(&values)?;
        lhs += c * e.mean / delta;
        lhs_var += (c * e.stderr / delta).powi(2);
    }

    let nodes = weighted_nodes(body, t, h)?;
    let total_weight: f64 = nodes.iter().map(|n| n.weight).sum();
    let mu_t = measure_on(body, t, h)?;
    let mass_t = body.parallel_mass(t, h, 1e-10)?;
    let draw = |rng: &mut StreamRng| -> (PointConfiguration, PointConfiguration) {
        let fewer = sample_binomial(&mu_t, m - 1, rng).expect("positive mass");
        let full = fewer.with_atom(&mu_t.sample_point(rng));
        (fewer, full)
    };
    let rhs_values = replicate(&stream.child(3), reps, |rng| {
        let (fewer, full) = draw(rng);
        node_sum(g, &fewer, &nodes) - total_weight * g.eval(&full)
    });
    let rhs = McSummary::from_samples(&rhs_values)?.scaled(m as f64 / mass_t);
    Ok(CroftonReport::new(lhs, lhs_var.sqrt(), rhs))
}
