#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spadep/types.hpp"

namespace spadep {

/// Landmark fitting settings. When `fixed_landmarks` is set only the
/// affiliations are solved for and `restarts` is ignored.
struct Spa1Config {
    Index k = 2;
    int max_iters = 500;
    double rel_tol = 1e-8;
    int restarts = 5;
    std::uint64_t seed = 0;
    std::optional<LandmarkSet> fixed_landmarks;

    /// Throws ConfigError on an invalid combination.
    void validate() const;
};

struct Spa1Solution {
    LandmarkSet landmarks;
    AffiliationSeries affiliations;
    double objective = 0.0;  ///< ||X - Sigma Gamma||_F
    int iterations_used = 0;
    /// Objective after every half-step of the winning run, starting with the
    /// initial affiliation solve. Non-increasing.
    std::vector<double> objective_history;
};

/// Alternating least squares for landmarks and affiliations, best of
/// `cfg.restarts` seeded runs.
[[nodiscard]] Spa1Solution fit_spa1(const TimeSeriesMatrix& data, const Spa1Config& cfg);

/// Per-column simplex-constrained least squares for fixed landmarks.
[[nodiscard]] AffiliationSeries solve_gamma(const TimeSeriesMatrix& data, const LandmarkSet& landmarks);

/// Barycentric coordinate of `point` among the best representations, chosen
/// closest to `reference` (epsilon-regularized, epsilon = 1e-6).
[[nodiscard]] Vector rho(const Vector& point, const LandmarkSet& landmarks, const Vector& reference);

/// Sequential representation gamma_t = rho(X_t, gamma_{t-1}); the first step
/// uses the uniform vector as reference.
[[nodiscard]] AffiliationSeries rho_sequence(const TimeSeriesMatrix& data, const LandmarkSet& landmarks);

/// Sigma * Gamma.
[[nodiscard]] TimeSeriesMatrix reconstruct(const LandmarkSet& landmarks, const AffiliationSeries& affiliations);

/// ||X - Sigma Gamma||_F.
[[nodiscard]] double representation_error(const TimeSeriesMatrix& data, const LandmarkSet& landmarks,
                                          const AffiliationSeries& affiliations);

}  // namespace spadep
