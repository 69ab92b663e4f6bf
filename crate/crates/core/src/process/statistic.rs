use std::fmt;
use std::sync::Arc;

use super::configuration::PointConfiguration;
use super::region::Region;

type EvalFn = dyn Fn(&PointConfiguration) -> f64 + Send + Sync;

/// Growth information a statistic declares about itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularity {
    /// `|g| ≤ M` everywhere.
    Bounded(f64),
    /// `|D^k g| ≤ c^k` for every order `k ≥ 1` (e.g. point counts with `c = 1`).
    DifferenceBounded(f64),
    Unrestricted,
}

/// A functional `g` of point configurations.
#[derive(Clone)]
pub struct Statistic {
    name: String,
    eval: Arc<EvalFn>,
    regularity: Regularity,
    indicator: bool,
}

impl fmt::Debug for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Statistic")
            .field("name", &self.name)
            .field("regularity", &self.regularity)
            .field("indicator", &self.indicator)
            .finish()
    }
}

impl Statistic {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&PointConfiguration) -> f64 + Send + Sync + 'static,
    {
        Self { name: name.into(), eval: Arc::new(f), regularity: Regularity::Unrestricted, indicator: false }
    }

    /// The indicator of an event `A`.
    pub fn event<F>(name: impl Into<String>, holds: F) -> Self
    where
        F: Fn(&PointConfiguration) -> bool + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            eval: Arc::new(move |phi| if holds(phi) { 1.0 } else { 0.0 }),
            regularity: Regularity::Bounded(1.0),
            indicator: true,
        }
    }

    pub fn with_bound(mut self, sup: f64) -> Self {
        self.regularity = Regularity::Bounded(sup);
        self
    }

    pub fn with_difference_bound(mut self, c: f64) -> Self {
        self.regularity = Regularity::DifferenceBounded(c);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn regularity(&self) -> Regularity {
        self.regularity
    }

    pub fn bound(&self) -> Option<f64> {
        match self.regularity {
            Regularity::Bounded(m) => Some(m),
            _ => None,
        }
    }

    pub fn is_indicator(&self) -> bool {
        self.indicator
    }

    /// Evaluates `g(φ)`, asserting the declared bound.
    pub fn eval(&self, phi: &PointConfiguration) -> f64 {
        let v = (self.eval)(phi);
        if let Regularity::Bounded(m) = self.regularity {
            assert!(v.abs() <= m, "statistic `{}` returned {v}, violating its bound {m}", self.name);
        }
        v
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("const:{c}"), move |_| c).with_bound(c.abs())
    }

    /// Total number of atoms.
    pub fn count() -> Self {
        Self::new("count", |phi| phi.len() as f64).with_difference_bound(1.0)
    }

    pub fn count_squared() -> Self {
        Self::new("count^2", |phi| (phi.len() * phi.len()) as f64)
    }

    /// `φ(B)`
    pub fn count_in(b: Arc<dyn Region>) -> Self {
        Self::new("count_in", move |phi| phi.count_where(|p| b.contains(p)) as f64).with_difference_bound(1.0)
    }

    /// `1{φ(B) = 0}`
    pub fn void(b: Arc<dyn Region>) -> Self {
        Self::event("void", move |phi| !phi.points().any(|p| b.contains(p)))
    }

    /// `1{φ(B) ≥ 1}`
    pub fn hit(b: Arc<dyn Region>) -> Self {
        Self::event("hit", move |phi| phi.points().any(|p| b.contains(p)))
    }

    /// `1{φ(𝕏) ≥ k}`
    pub fn count_at_least(k: usize) -> Self {
        Self::event(format!("count>={k}"), move |phi| phi.len() >= k)
    }
}
