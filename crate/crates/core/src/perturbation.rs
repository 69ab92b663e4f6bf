//! Perturbation of Poisson functionals: the difference-operator series for
//! `E g(η_{λ+θν})` and Monte Carlo estimators of `d/dθ E g(η_{θλ})`.
//!
//! All estimators draw replicates through [`replicate`], so results depend
//! only on the stream and the replicate count.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::numerics::{replicate, Accumulator, McSummary, RngStream, StreamRng};
use crate::process::{
    difference, iterated_difference_with_limit, sample_poisson, IntensityMeasure, PointConfiguration,
    Regularity, Statistic,
};

/// Highest derivative order accepted by [`higher_derivative_estimator`].
pub const MAX_DERIVATIVE_ORDER: usize = 10;

fn check_reps(reps: usize) -> Result<()> {
    if reps < 2 {
        return Err(Error::InsufficientSamples { got: reps, need: 2 });
    }
    Ok(())
}

/// Mean and standard error of `g(η)` over independent Poisson samples.
pub fn expectation_mc(g: &Statistic, mu: &IntensityMeasure, reps: usize, stream: &RngStream) -> Result<McSummary> {
    check_reps(reps)?;
    let values = replicate(stream, reps, |rng| g.eval(&sample_poisson(mu, rng)));
    McSummary::from_samples(&values)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesEstimate {
    /// Estimate of `E g(η_{λ+θν})` from the series truncated at `kmax`.
    pub estimate: McSummary,
    /// `terms[0]` is `E g(η_λ)`; `terms[k]` the `k`-th series term.
    pub terms: Vec<McSummary>,
    /// `M Σ_{k>kmax} (2|θ|ν(X))^k / k!`
    pub truncation_bound: f64,
}

/// `M Σ_{k>kmax} x^k / k!`, summed directly to avoid cancellation.
fn series_tail(bound: f64, x: f64, kmax: usize) -> f64 {
    let mut term = 1.0;
    for k in 1..=kmax {
        term *= x / k as f64;
    }
    let mut tail = 0.0;
    let mut k = kmax + 1;
    loop {
        term *= x / k as f64;
        tail += term;
        if term <= tail * 1e-17 || term == 0.0 {
            return bound * tail;
        }
        k += 1;
    }
}

/// Evaluates `E g(η_λ) + Σ_{k=1}^{kmax} (θ^k/k!) ∫ E D^k g(η_λ) dν^k`.
///
/// Each replicate draws one `η_λ` and one i.i.d. sequence `z₁, …, z_kmax`
/// from `ν/ν(X)`; term `k` uses the first `k` points. For `θ < 0` the caller
/// must supply `domination = c` with `ν ≤ c·λ` so that `λ + θν ≥ 0`.
#[allow(clippy::too_many_arguments)]
pub fn perturbation_series(
    g: &Statistic,
    lambda: &IntensityMeasure,
    nu: &IntensityMeasure,
    theta: f64,
    kmax: usize,
    domination: Option<f64>,
    reps: usize,
    stream: &RngStream,
) -> Result<SeriesEstimate> {
    check_reps(reps)?;
    let Regularity::Bounded(bound) = g.regularity() else {
        return Err(invalid("g", format!("statistic `{}` has no declared bound", g.name())));
    };
    if !(theta <= 1.0 && theta.is_finite()) {
        return Err(invalid("theta", format!("{theta} must lie in (−∞, 1]")));
    }
    if theta < 0.0 {
        match domination {
            Some(c) if c >= 0.0 && -theta * c <= 1.0 => {}
            Some(c) => return Err(invalid("theta", format!("λ + θν is not a measure for θ = {theta}, ν ≤ {c}·λ"))),
            None => return Err(invalid("theta", "negative θ needs a certified bound ν ≤ c·λ")),
        }
    }
    if lambda.dim() != nu.dim() {
        return Err(invalid("nu", "dimension differs from λ"));
    }
    if kmax > 20 {
        return Err(Error::TooLarge { what: "kmax", value: kmax, max: 20 });
    }
    let nu_mass = nu.mass();
    let coeffs: Vec<f64> = (1..=kmax)
        .scan(1.0, |c, k| {
            *c *= theta * nu_mass / k as f64;
            Some(*c)
        })
        .collect();
    let rows = replicate(stream, reps, |rng| {
        let eta = sample_poisson(lambda, rng);
        let mut row = vec![g.eval(&eta)];
        if nu_mass > 0.0 {
            let zs: Vec<Vec<f64>> = (0..kmax).map(|_| nu.sample_point(rng)).collect();
            for k in 1..=kmax {
                let d = iterated_difference_with_limit(g, &eta, &zs[..k], kmax).expect("order within kmax");
                row.push(coeffs[k - 1] * d);
            }
        } else {
            row.resize(kmax + 1, 0.0);
        }
        row
    });
    let mut terms = vec![Accumulator::default(); kmax + 1];
    let mut total = Accumulator::default();
    for row in &rows {
        for (acc, v) in terms.iter_mut().zip(row) {
            acc.push(*v);
        }
        total.push(row.iter().sum());
    }
    Ok(SeriesEstimate {
        estimate: total.summary()?,
        terms: terms.iter().map(Accumulator::summary).collect::<Result<_>>()?,
        truncation_bound: series_tail(bound, 2.0 * theta.abs() * nu_mass, kmax),
    })
}

/// Location-based derivative estimate with its positive and negative parts.
///
/// For an event these are `E N⁺_A` and `E N⁻_A` (expected pivotal mass of
/// locations that enter / leave the event when a point is added there).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocationDerivative {
    pub derivative: McSummary,
    pub plus: McSummary,
    pub minus: McSummary,
}

/// Estimates `d/dθ E g(η_{θλ}) = ∫ E D_z g(η_{θλ}) λ(dz)`: each replicate
/// draws `z ~ λ/λ(X)` and a fresh `η_{θλ}`, and contributes
/// `λ(X)·(g(η+δ_z) − g(η))`.
pub fn derivative_location_estimator(
    g: &Statistic,
    lambda: &IntensityMeasure,
    theta: f64,
    reps: usize,
    stream: &RngStream,
) -> Result<LocationDerivative> {
    derivative_location_estimator_shared(g, lambda, theta, 1, reps, stream)
}

/// As [`derivative_location_estimator`] but reusing each `η` for
/// `locations_per_sample` independent locations (averaged). Still unbiased;
/// the locations sharing an `η` are correlated.
pub fn derivative_location_estimator_shared(
    g: &Statistic,
    lambda: &IntensityMeasure,
    theta: f64,
    locations_per_sample: usize,
    reps: usize,
    stream: &RngStream,
) -> Result<LocationDerivative> {
    check_reps(reps)?;
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(invalid("theta", "must be finite and nonnegative"));
    }
    if locations_per_sample == 0 {
        return Err(invalid("locations_per_sample", "must be at least 1"));
    }
    let base = lambda.mass();
    let process = lambda.scaled(theta)?;
    let rows = replicate(stream, reps, |rng| {
        if base == 0.0 {
            return [0.0; 3];
        }
        let eta = sample_poisson(&process, rng);
        let g0 = g.eval(&eta);
        let mut out = [0.0; 3];
        for _ in 0..locations_per_sample {
            let z = lambda.sample_point(rng);
            let mut plus = eta.clone();
            plus.push(&z);
            let d = base * (g.eval(&plus) - g0);
            out[0] += d;
            out[1] += d.max(0.0);
            out[2] += (-d).max(0.0);
        }
        out.map(|v| v / locations_per_sample as f64)
    });
    summarize3(&rows).map(|[derivative, plus, minus]| LocationDerivative { derivative, plus, minus })
}

fn summarize3(rows: &[[f64; 3]]) -> Result<[McSummary; 3]> {
    let mut acc = [Accumulator::default(); 3];
    for row in rows {
        for (a, v) in acc.iter_mut().zip(row) {
            a.push(*v);
        }
    }
    Ok([acc[0].summary()?, acc[1].summary()?, acc[2].summary()?])
}

/// Mecke-form pivotal-point estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointDerivative {
    /// `(1/θ) E Σ_{z∈η} 1{η ∈ A, η−δ_z ∉ A}`, an estimate of `E N⁺_A`.
    pub plus: McSummary,
    /// `(1/θ) E Σ_{z∈η} 1{η ∉ A, η−δ_z ∈ A}`, an estimate of `E N⁻_A`.
    pub minus: McSummary,
    /// `(1/θ) E Σ_{z∈η} 1{η ∈ A, η+δ_z ∉ A}`, the add-a-copy integrand.
    /// It is not an estimate of `E N⁺_A`; it is reported for comparison.
    pub add_copy_variant: McSummary,
}

pub fn derivative_point_estimator(
    event: &Statistic,
    lambda: &IntensityMeasure,
    theta: f64,
    reps: usize,
    stream: &RngStream,
) -> Result<PointDerivative> {
    check_reps(reps)?;
    if !event.is_indicator() {
        return Err(invalid("event", format!("statistic `{}` is not an event indicator", event.name())));
    }
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(invalid("theta", "must be positive"));
    }
    let process = lambda.scaled(theta)?;
    let holds = |phi: &PointConfiguration| event.eval(phi) != 0.0;
    let rows = replicate(stream, reps, |rng: &mut StreamRng| {
        let eta = sample_poisson(&process, rng);
        let inside = holds(&eta);
        let mut out = [0.0; 3];
        for i in 0..eta.len() {
            let removed = holds(&eta.without_atom(i));
            if inside && !removed {
                out[0] += 1.0;
            }
            if !inside && removed {
                out[1] += 1.0;
            }
            if inside && !holds(&eta.with_atom(eta.point(i))) {
                out[2] += 1.0;
            }
        }
        out.map(|v| v / theta)
    });
    summarize3(&rows).map(|[plus, minus, add_copy_variant]| PointDerivative { plus, minus, add_copy_variant })
}

/// Estimates `∫…∫ E D^k_{z₁…z_k} g(η_{θλ}) λ^k(d(z₁,…,z_k))`, the `k`-th
/// derivative of `θ ↦ E g(η_{θλ})`.
pub fn higher_derivative_estimator(
    g: &Statistic,
    lambda: &IntensityMeasure,
    theta: f64,
    k: usize,
    reps: usize,
    stream: &RngStream,
) -> Result<McSummary> {
    check_reps(reps)?;
    if k == 0 {
        return Err(invalid("k", "must be at least 1"));
    }
    if k > MAX_DERIVATIVE_ORDER {
        return Err(Error::TooLarge { what: "derivative order", value: k, max: MAX_DERIVATIVE_ORDER });
    }
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(invalid("theta", "must be finite and nonnegative"));
    }
    let base = lambda.mass();
    let process = lambda.scaled(theta)?;
    let scale = base.powi(k as i32);
    let values = replicate(stream, reps, |rng| {
        if base == 0.0 {
            return 0.0;
        }
        let eta = sample_poisson(&process, rng);
        if k == 1 {
            let z = lambda.sample_point(rng);
            return scale * difference(g, &eta, &z);
        }
        let zs: Vec<Vec<f64>> = (0..k).map(|_| lambda.sample_point(rng)).collect();
        scale * iterated_difference_with_limit(g, &eta, &zs, MAX_DERIVATIVE_ORDER).expect("order checked")
    });
    McSummary::from_samples(&values)
}
