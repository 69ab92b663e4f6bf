//! Finite point configurations, intensity measures on ℝⁿ regions, Poisson and
//! binomial samplers, and the difference operator `D_z g(φ) = g(φ + δ_z) − g(φ)`.

mod configuration;
mod difference;
mod intensity;
mod region;
mod sampling;
mod statistic;

pub use configuration::PointConfiguration;
pub use difference::{difference, iterated_difference, iterated_difference_with_limit, MAX_ITERATED_ORDER};
pub use intensity::{Density, IntensityMeasure};
pub use region::{integrate_over, AxisBox, Ball, Region, Singleton};
pub use sampling::{sample_binomial, sample_poisson};
pub use statistic::{Regularity, Statistic};
