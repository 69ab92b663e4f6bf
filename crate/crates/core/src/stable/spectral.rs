use serde::Serialize;

use crate::error::{invalid, Result};

/// A discrete measure `σ = Σ w_i δ_{u_i}` on the unit sphere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralMeasure {
    dim: usize,
    directions: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl SpectralMeasure {
    pub fn new(dim: usize, atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dim", "must be positive"));
        }
        if atoms.is_empty() {
            return Err(invalid("atoms", "at least one atom is required"));
        }
        let mut directions = Vec::with_capacity(atoms.len());
        let mut weights = Vec::with_capacity(atoms.len());
        for (u, w) in atoms {
            if u.len() != dim {
                return Err(invalid("atoms", format!("direction of length {} in dimension {dim}", u.len())));
            }
            let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(invalid("atoms", format!("direction has norm {norm}, not 1")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(invalid("atoms", format!("weight {w} must be positive")));
            }
            directions.push(u);
            weights.push(w);
        }
        Ok(Self { dim, directions, weights })
    }

    /// `θ δ_{+1}` on the real line.
    pub fn positive_half_line(theta: f64) -> Result<Self> {
        Self::new(1, vec![(vec![1.0], theta)])
    }

    /// `(θ/2)(δ_{−1} + δ_{+1})` on the real line.
    pub fn symmetric_line(theta: f64) -> Result<Self> {
        Self::new(1, vec![(vec![1.0], theta / 2.0), (vec![-1.0], theta / 2.0)])
    }

    /// Weight `θ/(2·dim)` on each of `±e_1, …, ±e_dim`.
    pub fn axis_symmetric(dim: usize, theta: f64) -> Result<Self> {
        let w = theta / (2 * dim) as f64;
        let atoms = (0..dim)
            .flat_map(|i| {
                [1.0, -1.0].map(|s| {
                    let mut u = vec![0.0; dim];
                    u[i] = s;
                    (u, w)
                })
            })
            .collect();
        Self::new(dim, atoms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total mass `θ = Σ w_i`.
    pub fn theta(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.directions.iter().map(Vec::as_slice).zip(self.weights.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ w_i u_i`
    pub fn resultant(&self) -> Vec<f64> {
        let mut r = vec![0.0; self.dim];
        for (u, w) in self.atoms() {
            for (ri, ui) in r.iter_mut().zip(u) {
                *ri += w * ui;
            }
        }
        r
    }

    pub fn is_centered(&self) -> bool {
        self.resultant().iter().map(|x| x * x).sum::<f64>().sqrt() <= 1e-10
    }

    /// Every atom `(u, w)` has a partner `(−u, w)`.
    pub fn is_symmetric(&self) -> bool {
        self.atoms().all(|(u, w)| {
            self.atoms().any(|(v, x)| {
                (w - x).abs() <= 1e-12 * w.max(x) && u.iter().zip(v).all(|(a, b)| (a + b).abs() <= 1e-12)
            })
        })
    }

    /// The same directions with all weights multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.dim, self.directions.iter().cloned().zip(self.weights.iter().map(|w| w * c)).collect())
    }
}

/// Index `α ∈ (0, 2)` together with a spectral measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StableParams {
    alpha: f64,
    spectral: SpectralMeasure,
}

impl StableParams {
    /// For `α ≥ 1` the spectral measure must be centred (`|Σ w_i u_i| ≤ 1e−10`).
    pub fn new(alpha: f64, spectral: SpectralMeasure) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(invalid("alpha", format!("{alpha} not in (0, 2)")));
        }
        if alpha >= 1.0 && !spectral.is_centered() {
            return Err(invalid("spectral", format!("α = {alpha} ≥ 1 needs a centred spectral measure")));
        }
        Ok(Self { alpha, spectral })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn spectral(&self) -> &SpectralMeasure {
        &self.spectral
    }

    pub fn theta(&self) -> f64 {
        self.spectral.theta()
    }

    pub fn dim(&self) -> usize {
        self.spectral.dim()
    }

    /// Same law shape with total spectral mass `theta`.
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.alpha, self.spectral.scaled(theta / self.theta())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(SpectralMeasure::new(2, vec![(vec![1.0, 1.0], 1.0)]).is_err());
        assert!(SpectralMeasure::new(1, vec![(vec![1.0], 0.0)]).is_err());
        let pos = SpectralMeasure::positive_half_line(1.0).unwrap();
        assert!(StableParams::new(0.5, pos.clone()).is_ok());
        assert!(StableParams::new(1.5, pos).is_err());
        assert!(StableParams::new(2.0, SpectralMeasure::symmetric_line(1.0).unwrap()).is_err());
        let sym = SpectralMeasure::axis_symmetric(2, 3.0).unwrap();
        assert!(sym.is_symmetric() && sym.is_centered());
        assert!((sym.theta() - 3.0).abs() < 1e-15);
        assert!(StableParams::new(1.5, sym).is_ok());
        // centred but not symmetric
        let s3 = 3f64.sqrt() / 2.0;
        let tri = SpectralMeasure::new(2, vec![(vec![1.0, 0.0], 1.0), (vec![-0.5, s3], 1.0), (vec![-0.5, -s3], 1.0)]).unwrap();
        assert!(tri.is_centered() && !tri.is_symmetric());
    }
}
