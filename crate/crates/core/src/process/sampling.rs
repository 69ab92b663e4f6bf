use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::configuration::PointConfiguration;
use super::intensity::IntensityMeasure;
use crate::error::{invalid, Result};

/// Draws a count `~ Poisson(mass)`.
pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("finite positive Poisson mean");
    let v: f64 = d.sample(rng);
    v as usize
}

/// A Poisson process with intensity measure `μ`: a `Poisson(μ(X))` number of
/// i.i.d. points with law `μ / μ(X)`.
pub fn sample_poisson<R: Rng + ?Sized>(mu: &IntensityMeasure, rng: &mut R) -> PointConfiguration {
    let n = poisson_count(mu.mass(), rng);
    fill(mu, n, rng)
}

/// A binomial process: exactly `m` i.i.d. points with law `μ / μ(X)`.
pub fn sample_binomial<R: Rng + ?Sized>(mu: &IntensityMeasure, m: usize, rng: &mut R) -> Result<PointConfiguration> {
    if m == 0 {
        return Ok(PointConfiguration::empty(mu.dim()));
    }
    if !(mu.mass() > 0.0) {
        return Err(invalid("mu", "a binomial process needs positive total mass"));
    }
    Ok(fill(mu, m, rng))
}

fn fill<R: Rng + ?Sized>(mu: &IntensityMeasure, n: usize, rng: &mut R) -> PointConfiguration {
    if mu.dim() == 0 {
        return PointConfiguration::singleton_atoms(n);
    }
    let mut phi = PointConfiguration::with_capacity(mu.dim(), n);
    for _ in 0..n {
        phi.push(&mu.sample_point(rng));
    }
    phi
}
