use std::cell::RefCell;
use std::fmt::Debug;

use crate::error::{invalid, Error, Result};
use crate::numerics::{integrate_with, QuadOptions};

/// A convex carrier region in ℝ^dim.
///
/// Besides membership and a bounding box (used by the rejection samplers), a
/// region reports its sections: given the first `j` coordinates, the interval
/// of admissible values of coordinate `j`. Convexity makes every section an
/// interval, which is what nested quadrature needs.
pub trait Region: Send + Sync + Debug {
    fn dim(&self) -> usize;

    fn contains(&self, x: &[f64]) -> bool;

    /// `(lower, upper)` corners.
    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>);

    /// Interval of coordinate `prefix.len()` over points of the region whose
    /// first coordinates equal `prefix`.
    fn section(&self, prefix: &[f64]) -> Option<(f64, f64)>;

    /// Values of coordinate `prefix.len()` where the section of the next
    /// coordinate is not smooth.
    fn section_breaks(&self, _prefix: &[f64]) -> Vec<f64> {
        Vec::new()
    }

    /// Lebesgue volume when known in closed form.
    fn volume(&self) -> Option<f64> {
        None
    }
}

/// Axis-parallel box `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(invalid("box", "corners must have the same positive dimension"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(invalid("box", "lower corner must be strictly below the upper corner"));
        }
        Ok(Self { lo, hi })
    }

    pub fn unit(dim: usize) -> Self {
        Self { lo: vec![0.0; dim], hi: vec![1.0; dim] }
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a], vec![b])
    }
}

impl Region for AxisBox {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(&self.lo).zip(&self.hi).all(|((v, a), b)| *a <= *v && *v <= *b)
    }

    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        (self.lo.clone(), self.hi.clone())
    }

    fn section(&self, prefix: &[f64]) -> Option<(f64, f64)> {
        let j = prefix.len();
        (j < self.dim()).then(|| (self.lo[j], self.hi[j]))
    }

    fn volume(&self) -> Option<f64> {
        Some(self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product())
    }
}

/// Closed Euclidean ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(invalid("center", "dimension must be positive"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid("radius", "must be positive and finite"));
        }
        Ok(Self { center, radius })
    }
}

pub(crate) fn ball_volume(dim: usize, radius: f64) -> f64 {
    use std::f64::consts::PI;
    let unit = match dim {
        1 => 2.0,
        2 => PI,
        3 => 4.0 / 3.0 * PI,
        n => PI.powf(n as f64 / 2.0) / statrs::function::gamma::gamma(n as f64 / 2.0 + 1.0),
    };
    unit * radius.powi(dim as i32)
}

impl Region for Ball {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>() <= self.radius * self.radius
    }

    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.center.iter().map(|c| c - self.radius).collect(),
            self.center.iter().map(|c| c + self.radius).collect(),
        )
    }

    fn section(&self, prefix: &[f64]) -> Option<(f64, f64)> {
        let j = prefix.len();
        if j >= self.dim() {
            return None;
        }
        let used: f64 = prefix.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        let rem = self.radius * self.radius - used;
        if rem < 0.0 {
            return None;
        }
        let s = rem.sqrt();
        Some((self.center[j] - s, self.center[j] + s))
    }

    fn volume(&self) -> Option<f64> {
        Some(ball_volume(self.dim(), self.radius))
    }
}

/// The one-point ground space (dimension zero, unit volume).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Singleton;

impl Region for Singleton {
    fn dim(&self) -> usize {
        0
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.is_empty()
    }

    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        (Vec::new(), Vec::new())
    }

    fn section(&self, _prefix: &[f64]) -> Option<(f64, f64)> {
        None
    }

    fn volume(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// `∫_region f dx` by nested adaptive quadrature over the region's sections.
pub fn integrate_over(region: &dyn Region, f: &(dyn Fn(&[f64]) -> f64 + Sync), tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    if region.dim() == 0 {
        let v = f(&[]);
        return if v.is_finite() { Ok(v) } else { Err(Error::NonFinite { location: 0.0 }) };
    }
    nested(region, f, &[], tol)
}

fn nested(region: &dyn Region, f: &(dyn Fn(&[f64]) -> f64 + Sync), prefix: &[f64], tol: f64) -> Result<f64> {
    let Some((a, b)) = region.section(prefix) else {
        return Ok(0.0);
    };
    if b <= a {
        return Ok(0.0);
    }
    let opts = QuadOptions::relative(1e-13, tol).with_breakpoints(region.section_breaks(prefix));
    let last = prefix.len() + 1 == region.dim();
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_tol = tol / (4.0 * (b - a));
    let g = |x: f64| {
        let mut p = Vec::with_capacity(prefix.len() + 1);
        p.extend_from_slice(prefix);
        p.push(x);
        if last {
            f(&p)
        } else {
            match nested(region, f, &p, inner_tol) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        }
    };
    let q = integrate_with(g, a, b, &opts);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    q.map(|q| q.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_disk_area_by_nested_quadrature() {
        let disk = Ball::new(vec![0.0, 0.0], 1.0).unwrap();
        let v = integrate_over(&disk, &|_| 1.0, 1e-9).unwrap();
        assert!((v - PI).abs() < 1e-8, "{v}");
        assert!((disk.volume().unwrap() - PI).abs() < 1e-15);
    }

    #[test]
    fn ball_section_and_membership() {
        let b = Ball::new(vec![0.0, 0.0, 0.0], 2.0).unwrap();
        assert_eq!(b.section(&[0.0, 0.0]), Some((-2.0, 2.0)));
        assert_eq!(b.section(&[3.0]), None);
        assert!(b.contains(&[1.0, 1.0, 1.0]));
        assert!((b.volume().unwrap() - 32.0 / 3.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn box_validation() {
        assert!(AxisBox::new(vec![0.0], vec![0.0]).is_err());
        let b = AxisBox::new(vec![0.0, -1.0], vec![2.0, 1.0]).unwrap();
        assert_eq!(b.volume(), Some(4.0));
        let v = integrate_over(&b, &|x| x[0] * x[1] * x[1], 1e-12).unwrap();
        assert!((v - 2.0 * 2.0 / 3.0).abs() < 1e-12);
    }
}
