//! Pivotality and perturbation formulas for Bernoulli systems and Poisson
//! processes, together with two-route numerical checks of the distributional
//! identities they imply.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: quadrature, counter-based RNG streams and Monte Carlo summaries.
//! * [`process`]: point configurations, intensity measures, Poisson/binomial
//!   samplers and the (iterated) difference operator.
//! * [`bernoulli`]: exact pivotal counts and the Margulis–Russo derivative.
//! * [`identities`]: Poisson, Erlang and compound-Poisson closed forms and recursions.
//! * [`perturbation`]: the Poisson perturbation series and derivative estimators.
//! * [`stable`]: LePage sampling of strictly stable laws and their integro-differential identities.
//! * [`geometry`]: convex bodies, parallel sets and Crofton derivative checks.

pub mod bernoulli;
pub mod error;
pub mod geometry;
pub mod identities;
pub mod numerics;
pub mod perturbation;
pub mod process;
pub mod stable;

pub use error::{Error, Result};
