//! Noiseless entangled strategies read out by the covariant measurement.
//!
//! An input `sum_k c_k e^{i 2 pi k phi} |k>` measured with the covariant POVM
//! yields an error `theta = phi_est - phi` with density
//! `p(theta) = |sum_k c_k e^{i 2 pi k theta}|^2`; under a uniform prior the
//! mutual information is `-H(theta)`.

mod entangled;
mod optimize;
mod two_seed;

pub use entangled::{
    covariant_posterior, fourier_bound_ceiling, posterior_entropy, CovariantPosterior,
    EntangledState,
};
pub use optimize::{optimize_en_state, OptimizeOptions, OptimizedState};
pub use two_seed::{
    joint_mutual_information, run_two_seed_trials, two_seed_experiment, BaseState, PairStyle,
    SeedPair, TrialOptions, TwoSeedReport, TwoSeedTrial,
};
