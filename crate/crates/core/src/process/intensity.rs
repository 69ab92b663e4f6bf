use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::Rng;

use super::region::{integrate_over, Region};
use crate::error::{invalid, Result};

type DensityFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A continuous, bounded, non-negative density `h` together with its
/// supremum over the carrier region (the rejection-sampling envelope).
#[derive(Clone)]
pub struct Density {
    f: Arc<DensityFn>,
    sup: f64,
    constant: Option<f64>,
    label: String,
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Density").field("label", &self.label).field("sup", &self.sup).finish()
    }
}

impl Density {
    pub fn constant(c: f64) -> Self {
        Self { f: Arc::new(move |_| c), sup: c, constant: Some(c), label: format!("const:{c}") }
    }

    /// A density with a declared supremum `sup ≥ h` on the region.
    pub fn new<F>(label: impl Into<String>, sup: f64, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self { f: Arc::new(f), sup, constant: None, label: label.into() }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    pub fn sup(&self) -> f64 {
        self.sup
    }

    pub fn as_constant(&self) -> Option<f64> {
        self.constant
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// The measure `θ · h(x) dx` restricted to a region.
#[derive(Clone)]
pub struct IntensityMeasure {
    region: Arc<dyn Region>,
    density: Density,
    scale: f64,
    mass: Arc<OnceLock<f64>>,
}

impl fmt::Debug for IntensityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntensityMeasure")
            .field("region", &self.region)
            .field("density", &self.density)
            .field("scale", &self.scale)
            .finish()
    }
}

const MASS_TOL: f64 = 1e-10;

impl IntensityMeasure {
    /// Validates `scale ≥ 0`, a finite envelope, and spot-checks
    /// `0 ≤ h ≤ sup` on a grid over the region.
    pub fn new(region: Arc<dyn Region>, density: Density, scale: f64) -> Result<Self> {
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(invalid("scale", format!("{scale} must be finite and non-negative")));
        }
        if !(density.sup >= 0.0 && density.sup.is_finite()) {
            return Err(invalid("density", "unbounded or negative envelope on the region"));
        }
        spot_check(region.as_ref(), &density)?;
        Ok(Self { region, density, scale, mass: Arc::new(OnceLock::new()) })
    }

    /// Lebesgue measure on `region` scaled by `scale`.
    pub fn uniform(region: Arc<dyn Region>, scale: f64) -> Result<Self> {
        Self::new(region, Density::constant(1.0), scale)
    }

    pub fn region(&self) -> &Arc<dyn Region> {
        &self.region
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn dim(&self) -> usize {
        self.region.dim()
    }

    /// `factor · μ`
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let out = Self::new(self.region.clone(), self.density.clone(), self.scale * factor)?;
        if let Some(m) = self.mass.get() {
            let _ = out.mass.set(m * factor);
        }
        Ok(out)
    }

    /// The same density restricted to another region.
    pub fn restricted_to(&self, region: Arc<dyn Region>) -> Result<Self> {
        Self::new(region, self.density.clone(), self.scale)
    }

    /// Intensity `θ·h(x)` at a point of the region, zero outside.
    pub fn intensity_at(&self, x: &[f64]) -> f64 {
        if self.region.contains(x) {
            self.scale * self.density.eval(x)
        } else {
            0.0
        }
    }

    /// `θ ∫_region h` to absolute tolerance `tol`; closed form for a constant
    /// density on a region of known volume.
    pub fn total_mass(&self, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(invalid("tol", "must be positive"));
        }
        if self.scale == 0.0 || self.density.sup == 0.0 {
            return Ok(0.0);
        }
        if let (Some(c), Some(v)) = (self.density.constant, self.region.volume()) {
            return Ok(self.scale * c * v);
        }
        let h = |x: &[f64]| self.density.eval(x);
        Ok(self.scale * integrate_over(self.region.as_ref(), &h, tol / self.scale)?)
    }

    /// Total mass, computed once to `1e-10` and cached.
    pub fn mass(&self) -> f64 {
        *self.mass.get_or_init(|| self.total_mass(MASS_TOL).expect("total mass quadrature failed"))
    }

    /// `μ(B)` for a region `B` contained in the carrier region.
    pub fn mass_of(&self, subregion: &dyn Region, tol: f64) -> Result<f64> {
        if let (Some(c), Some(v)) = (self.density.constant, subregion.volume()) {
            return Ok(self.scale * c * v);
        }
        let h = |x: &[f64]| self.density.eval(x);
        Ok(self.scale * integrate_over(subregion, &h, tol / self.scale.max(1e-300))?)
    }

    /// One point with law `μ / μ(region)`, by rejection from the bounding box.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let (lo, hi) = self.region.bounding_box();
        let mut x = vec![0.0; lo.len()];
        let sup = self.density.sup;
        for _ in 0..100_000_000u64 {
            for ((v, a), b) in x.iter_mut().zip(&lo).zip(&hi) {
                *v = a + (b - a) * rng.random::<f64>();
            }
            if !self.region.contains(&x) {
                continue;
            }
            if self.density.constant.is_some() || rng.random::<f64>() * sup <= self.density.eval(&x) {
                return x;
            }
        }
        panic!("rejection sampler made no progress; region or density has negligible mass");
    }
}

fn spot_check(region: &dyn Region, density: &Density) -> Result<()> {
    if density.constant.is_some() || region.dim() == 0 {
        let v = density.eval(&[]);
        if region.dim() == 0 && !(v >= 0.0 && v <= density.sup * (1.0 + 1e-12)) {
            return Err(invalid("density", format!("value {v} outside [0, sup]")));
        }
        return Ok(());
    }
    let (lo, hi) = region.bounding_box();
    let per_axis = match lo.len() {
        1 => 257,
        2 => 33,
        _ => 9,
    };
    let total = (per_axis as usize).pow(lo.len() as u32);
    let mut x = vec![0.0; lo.len()];
    for idx in 0..total {
        let mut rest = idx;
        for (j, v) in x.iter_mut().enumerate() {
            let k = rest % per_axis;
            rest /= per_axis;
            *v = lo[j] + (hi[j] - lo[j]) * k as f64 / (per_axis - 1) as f64;
        }
        if !region.contains(&x) {
            continue;
        }
        let v = density.eval(&x);
        if !(v >= 0.0) || v > density.sup * (1.0 + 1e-12) {
            return Err(invalid("density", format!("value {v} at {x:?} outside [0, sup = {}]", density.sup)));
        }
    }
    Ok(())
}
