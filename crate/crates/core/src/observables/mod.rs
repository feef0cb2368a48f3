//! Quantities measured on evolved states: entanglement spectra and purities,
//! random-state reference laws, relaxation-rate fits, and OTOCs.

mod fit;
mod otoc;
mod reference;
mod spectrum;

pub use fit::{
    effective_rate, noise_floor, two_phase_fit, two_phase_fit_points, FitOptions, PuritySeries,
    TwoPhaseFit,
};
pub use otoc::{otoc, otoc_ensemble, otoc_single, OtocSeries, OtocSpec};
pub use reference::{
    lambda_k_infty, lambda_infty_profile, mp_bin_probabilities, mp_cdf, mp_density,
    rescaled_histogram, stationary_purities, stationary_purity_std, total_variation, StationaryPurities, MP_BINS,
};
pub use spectrum::{
    numerical_rank, numerical_rank_with, purity, purity_p, reduced_density, spectrum, RankPolicy,
    ReducedSpectrum,
};

/// Summation in fixed pairwise order, so results do not depend on how the
/// caller chunked or scheduled the terms.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
