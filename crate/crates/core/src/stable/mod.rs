//! Strictly α-stable laws: LePage sampling, integration against the Lévy
//! measure `Λ_θ`, and residuals of the integro-differential identities
//! satisfied by their densities.

mod corollary;
mod lepage;
mod levy;
mod spectral;

pub use corollary::{
    alphadens1_residual, dimone_residual, half_stable_cdf, half_stable_density, half_stable_density_derivative,
    radvec_residual, CorollaryResidual, DimoneMethod, RadvecReport,
};
pub use lepage::{lepage_tail_bound, sample_stable, LePageSampler, TailCompensation, DEFAULT_MAX_TERMS};
pub use levy::{levy_integral, Envelope};
pub use spectral::{SpectralMeasure, StableParams};
