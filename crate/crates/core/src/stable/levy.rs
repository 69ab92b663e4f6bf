//! Integrals against `Λ_θ = Σ_i w_i · α r^{−α−1} dr` along the rays `r u_i`.

use serde::{Deserialize, Serialize};

use super::spectral::StableParams;
use crate::error::{invalid, Error, Result};
use crate::numerics::{integrate_with, QuadOptions};

/// Declared growth of an integrand along every ray:
/// `|f(r u)| ≤ small_c · r^beta` for `r ≤ 1` (with `beta > α`) and
/// `|f(r u)| ≤ large_c · r^{−gamma}` for `r ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub small_c: f64,
    pub beta: f64,
    pub large_c: f64,
    pub gamma: f64,
    /// Radii where the integrand may jump.
    pub breaks: Vec<f64>,
}

impl Envelope {
    /// `|f| ≤ c` everywhere and `f = 0` on `{|z| < inner}`.
    pub fn bounded_away_from_origin(c: f64, inner: f64) -> Self {
        // on r < inner the integrand vanishes, so c (r/inner)^beta is a valid bound for any beta
        Self { small_c: c * inner.min(1.0).powf(-2.0), beta: 2.0, large_c: c, gamma: 0.0, breaks: Vec::new() }
    }

    pub fn with_breaks(mut self, breaks: impl IntoIterator<Item = f64>) -> Self {
        self.breaks.extend(breaks);
        self
    }

    fn at(&self, r: f64) -> f64 {
        if r <= 1.0 {
            self.small_c * r.powf(self.beta)
        } else {
            self.large_c * r.powf(-self.gamma)
        }
    }
}

/// `∫ f dΛ_θ = Σ_i w_i α ∫₀^∞ f(r u_i) r^{−α−1} dr`.
///
/// On `(0, 1]` the substitution `r = e^{−u}` gives the integrand
/// `f(e^{−u} u_i) e^{αu}`, on `[1, ∞)` the substitution `r = e^{u}` gives
/// `f(e^{u} u_i) e^{−αu}`. Each is cut where the envelope certifies the
/// remainder is below a quarter of the per-atom tolerance.
pub fn levy_integral<F>(params: &StableParams, f: F, envelope: &Envelope, tol: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    let alpha = params.alpha();
    if !(envelope.beta > alpha) {
        return Err(invalid("envelope", format!("beta = {} must exceed α = {alpha}", envelope.beta)));
    }
    if !(envelope.gamma + alpha > 0.0) || envelope.small_c < 0.0 || envelope.large_c < 0.0 {
        return Err(invalid("envelope", "constants must be nonnegative with gamma + α > 0"));
    }
    let atoms = params.spectral().len() as f64;
    let mut total = 0.0;
    for (u, w) in params.spectral().atoms() {
        let at = |r: f64| -> f64 {
            let z: Vec<f64> = u.iter().map(|ui| r * ui).collect();
            f(&z)
        };
        // spot-check the envelope on a log grid
        for j in -60..=60 {
            let r = 10f64.powf(j as f64 / 10.0);
            let v = at(r);
            let b = envelope.at(r);
            if !v.is_finite() {
                return Err(Error::NonFinite { location: r });
            }
            if v.abs() > b * (1.0 + 1e-9) + 1e-300 {
                return Err(Error::EnvelopeViolated { radius: r, value: v, bound: b });
            }
        }
        // the integral is scaled by w α; its share of the tolerance is tol / atoms
        let share = tol / atoms / (w * alpha);
        let quarter = share / 4.0;
        let u_small = if envelope.small_c == 0.0 {
            0.0
        } else {
            ((envelope.small_c / ((envelope.beta - alpha) * quarter)).ln() / (envelope.beta - alpha)).max(0.0)
        };
        let decay = envelope.gamma + alpha;
        let u_large = if envelope.large_c == 0.0 { 0.0 } else { ((envelope.large_c / (decay * quarter)).ln() / decay).max(0.0) };
        let breaks_small = envelope.breaks.iter().filter(|&&b| b > 0.0 && b < 1.0).map(|b| -b.ln());
        let breaks_large = envelope.breaks.iter().filter(|&&b| b > 1.0).map(|b| b.ln());
        let opts_small = QuadOptions::relative(1e-12, quarter).with_breakpoints(breaks_small);
        let opts_large = QuadOptions::relative(1e-12, quarter).with_breakpoints(breaks_large);
        let inner = integrate_with(|v| at((-v).exp()) * (alpha * v).exp(), 0.0, u_small, &opts_small)?.value;
        let outer = integrate_with(|v| at(v.exp()) * (-alpha * v).exp(), 0.0, u_large, &opts_large)?.value;
        total += w * alpha * (inner + outer);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable::spectral::SpectralMeasure;

    fn norm(z: &[f64]) -> f64 {
        z.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn mass_outside_unit_ball_is_theta() {
        for (alpha, spectral) in [
            (0.5, SpectralMeasure::positive_half_line(2.5).unwrap()),
            (1.5, SpectralMeasure::axis_symmetric(2, 1.7).unwrap()),
        ] {
            let theta = spectral.theta();
            let p = StableParams::new(alpha, spectral).unwrap();
            let env = Envelope::bounded_away_from_origin(1.0, 1.0).with_breaks([1.0]);
            let v = levy_integral(&p, |z| if norm(z) > 1.0 { 1.0 } else { 0.0 }, &env, 1e-9).unwrap();
            assert!((v - theta).abs() < 1e-8, "{v} vs {theta}");
        }
    }

    #[test]
    fn zero_integrand() {
        let p = StableParams::new(0.7, SpectralMeasure::positive_half_line(1.0).unwrap()).unwrap();
        let env = Envelope { small_c: 0.0, beta: 1.0, large_c: 0.0, gamma: 0.0, breaks: vec![] };
        assert_eq!(levy_integral(&p, |_| 0.0, &env, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn homogeneity() {
        let alpha = 0.8;
        let p = StableParams::new(alpha, SpectralMeasure::axis_symmetric(2, 1.0).unwrap()).unwrap();
        let annulus = |c: f64| move |z: &[f64]| if (c..2.0 * c).contains(&norm(z)) { 1.0 } else { 0.0 };
        let env = |c: f64| Envelope::bounded_away_from_origin(1.0, c).with_breaks([c, 2.0 * c]);
        let base = levy_integral(&p, annulus(1.0), &env(1.0), 1e-10).unwrap();
        assert!((base - (1.0 - 2f64.powf(-alpha))).abs() < 1e-9);
        for c in [0.5, 2.0, 4.0] {
            let v = levy_integral(&p, annulus(c), &env(c), 1e-10).unwrap();
            assert!((v - c.powf(-alpha) * base).abs() < 1e-9);
        }
    }

    #[test]
    fn smooth_integrand_and_envelope_violation() {
        // ∫ (1 − e^{−r}) α r^{−α−1} dr = Γ(1−α)
        let alpha = 0.5;
        let p = StableParams::new(alpha, SpectralMeasure::positive_half_line(1.0).unwrap()).unwrap();
        let env = Envelope { small_c: 1.0, beta: 1.0, large_c: 1.0, gamma: 0.0, breaks: vec![] };
        let v = levy_integral(&p, |z| -(-z[0]).exp_m1(), &env, 1e-10).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-9, "{v}");
        let tight = Envelope { small_c: 0.1, ..env };
        assert!(matches!(levy_integral(&p, |z| 1.0 - (-z[0]).exp(), &tight, 1e-10), Err(Error::EnvelopeViolated { .. })));
    }
}
