//! Compact convex bodies in ℝⁿ (`n ≤ 3`), their parallel sets
//! `K_t = {x : dist(K, x) ≤ t}`, exact boundary quadrature on `∂K_t`, and
//! two-sided checks of the derivative formulas for `t ↦ ∫_{K_t} f` and for
//! Poisson and binomial processes on `K_t`.

mod body;
mod crofton;

pub use body::{BoundaryNode, ConvexBody, ParallelSet, Shape};
pub use crofton::{
    crofton_binomial_check, crofton_poisson_check, steiner_derivative_check, CroftonReport, SteinerCheck,
};
