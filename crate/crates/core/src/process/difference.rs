use super::configuration::PointConfiguration;
use super::statistic::Statistic;
use crate::error::{invalid, Error, Result};

/// Default cap on the order of [`iterated_difference`] (it costs `2^k` evaluations).
pub const MAX_ITERATED_ORDER: usize = 20;

/// `D_z g(φ) = g(φ + δ_z) − g(φ)`
pub fn difference(g: &Statistic, phi: &PointConfiguration, z: &[f64]) -> f64 {
    let mut plus = phi.clone();
    plus.push(z);
    g.eval(&plus) - g.eval(phi)
}

/// `D^k_{z₁…z_k} g(φ) = Σ_{J ⊆ {1..k}} (−1)^{k−|J|} g(φ + Σ_{j∈J} δ_{z_j})`.
pub fn iterated_difference<P: AsRef<[f64]>>(g: &Statistic, phi: &PointConfiguration, zs: &[P]) -> Result<f64> {
    iterated_difference_with_limit(g, phi, zs, MAX_ITERATED_ORDER)
}

pub fn iterated_difference_with_limit<P: AsRef<[f64]>>(
    g: &Statistic,
    phi: &PointConfiguration,
    zs: &[P],
    max_order: usize,
) -> Result<f64> {
    let k = zs.len();
    if k == 0 {
        return Err(invalid("zs", "at least one point is required"));
    }
    if k > max_order {
        return Err(Error::TooLarge { what: "difference order", value: k, max: max_order });
    }
    let mut total = 0.0;
    let mut buf = PointConfiguration::with_capacity(phi.dim(), phi.len() + k);
    for mask in 0u32..(1u32 << k) {
        buf.clone_from(phi);
        for (j, z) in zs.iter().enumerate() {
            if mask & (1 << j) != 0 {
                buf.push(z.as_ref());
            }
        }
        let v = g.eval(&buf);
        if (k as u32 - mask.count_ones()) % 2 == 0 {
            total += v;
        } else {
            total -= v;
        }
    }
    if let Some(m) = g.bound() {
        assert!(
            total.abs() <= (1u64 << k) as f64 * m * (1.0 + 1e-12),
            "|D^{k} g| = {total} exceeds 2^k·M"
        );
    }
    Ok(total)
}
