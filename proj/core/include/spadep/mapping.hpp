#pragma once

#include <vector>

#include "spadep/types.hpp"

namespace spadep {

struct LambdaSolverOptions {
    double rel_tol = 1e-10;
    int max_iters = 20'000;
    bool record_history = false;
};

/// Column-stochastic map from lagged source affiliations to target affiliations.
struct LambdaFit {
    StochasticMatrix lambda;
    double residual = 0.0;  ///< ||target - Lambda source||_F over the training pairs
    Index tau = 0;
    Index pairs_used = 0;
    int iterations = 0;
    /// Squared residual per iteration (first entry: the uniform start), when requested.
    std::vector<double> objective_history;
};

/// Fits Lambda minimizing ||Gamma^Y_{1+tau:T} - Lambda Gamma^X_{1:T-tau}||_F over
/// column-stochastic matrices. `source == target` gives the self-dynamics map.
[[nodiscard]] LambdaFit fit_lambda(const AffiliationSeries& source, const AffiliationSeries& target, Index tau,
                                   const LambdaSolverOptions& options = {});

/// Same objective over several independent segments; no lagged pair crosses a
/// segment boundary.
[[nodiscard]] LambdaFit fit_lambda_segmented(const SegmentedAffiliationPair& pair,
                                             const LambdaSolverOptions& options = {});

/// Lambda * gamma, a stochastic vector of length K_Y.
[[nodiscard]] Vector predict(const LambdaFit& fit, const Vector& source_state);

}  // namespace spadep
