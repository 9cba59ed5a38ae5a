//! Upper and lower bounds on the mutual information `I(m : phi)` between a
//! periodic parameter and a measurement outcome.
//!
//! The Fourier bound reads the entropy of the Fourier spectrum of the
//! prior-weighted state family; the Fisher bound relaxes it through the second
//! moment of that spectrum, which only depends on the prior and the Fisher
//! information profile.

mod family;
mod fisher;
mod fourier;
mod model;
mod prior;
mod report;
mod uncertainty;

pub use family::StateFamily;
pub use fisher::{
    companion_bound_comparison, fisher_bound, fisher_bound_constant, mle_lower_bound,
    sigma_squared, CompanionBounds, FisherInformation,
};
pub use fourier::{
    fourier_bound_from_overlap, fourier_bound_from_states, nonperiodic_fourier_bound,
    state_spectrum, NonperiodicBound, WindowOptions,
};
pub use model::{fisher_profile, EstimationModel, FisherProfile};
pub use prior::{CompactPrior, PriorDensity};
pub use report::{BoundReport, Flag, Method};
pub use uncertainty::{entropic_uncertainty_check, posterior_grid_size, UncertaintyCheck};
