//! Shared numerical kernels: quadrature, RNG streams and Monte Carlo summaries.

pub mod mc;
pub mod quadrature;
pub mod rng;
pub mod stats;

pub use quadrature::{
    adaptive_simpson, gauss_legendre, integrate, integrate_with, power_singular_integral,
    GaussRule, QuadOptions, Quadrature, SimpsonResult,
};
pub use mc::{replicate, replicate_with_workers};
pub use rng::{splitmix64, RngStream, StreamRng};
pub use stats::{
    ks_two_sample, kolmogorov_survival, smoothed_density, z_score, Accumulator, EmpiricalCdf, KsTest,
    McSummary,
};
