#pragma once

#include <vector>

#include "spadep/types.hpp"

namespace spadep::detail {

/// Minimizes 0.5 g'Hg - b'g over the probability simplex, H = F'F + ridge*I,
/// with accelerated projected gradient and adaptive momentum restart.
/// The step is 1/L with L the largest eigenvalue of PHP, P the projector onto
/// vectors summing to zero; L never exceeds the largest eigenvalue of H. The
/// result is never worse than the starting point.
///
/// The inner loop works on raw arrays; the problems are small (K of order 10)
/// and run once per time step.
class SimplexQp {
public:
    static constexpr int kMaxIterations = 10'000;
    static constexpr double kValueResolution = 1e-9;

    /// Iteration stops once an update moves gamma by less than `tolerance`
    /// (Euclidean norm).
    explicit SimplexQp(const Matrix& factor, double ridge = 0.0, double tolerance = 1e-12);

    [[nodiscard]] Index size() const noexcept { return k_; }
    [[nodiscard]] double lipschitz() const noexcept { return lipschitz_; }

    /// `gamma` holds the starting point on entry (projected if infeasible) and
    /// the solution on exit. Returns the number of iterations taken.
    int solve(const Eigen::Ref<const Vector>& linear, Eigen::Ref<Vector> gamma) const;

private:
    struct Workspace {
        std::vector<double> current, lookahead, candidate, h_current, h_lookahead, h_candidate, scratch;
        std::vector<std::size_t> order;
        void resize(std::size_t k);
    };

    /// out = H v
    void apply(const double* v, double* out) const;

    Matrix factor_t_;
    Matrix hessian_;
    Index k_ = 0;
    Index d_ = 0;
    double ridge_ = 0.0;
    bool use_factor_ = false;
    double lipschitz_ = 0.0;
    double tolerance_ = 1e-12;
};

}  // namespace spadep::detail
