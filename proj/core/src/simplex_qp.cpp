#include "simplex_qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "spadep/simplex.hpp"

namespace spadep::detail {

SimplexQp::SimplexQp(const Matrix& factor, double ridge, double tolerance)
    : factor_t_(factor.transpose()), k_(factor.cols()), d_(factor.rows()), ridge_(ridge), tolerance_(tolerance) {
    hessian_ = factor_t_ * factor;
    hessian_.diagonal().array() += ridge_;
    // Applying F'F through the factor is cheaper when F has few rows.
    use_factor_ = 2 * d_ < k_;
    // Iterates only ever differ by vectors summing to zero, so the curvature
    // that matters is that of H restricted to this subspace.
    const Matrix centering = Matrix::Identity(k_, k_) - Matrix::Constant(k_, k_, 1.0 / static_cast<double>(k_));
    const Matrix restricted = centering * hessian_ * centering;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(restricted, Eigen::EigenvaluesOnly);
    lipschitz_ = eig.eigenvalues().maxCoeff();
}

void SimplexQp::Workspace::resize(std::size_t k) {
    current.resize(k);
    lookahead.resize(k);
    candidate.resize(k);
    h_current.resize(k);
    h_lookahead.resize(k);
    h_candidate.resize(k);
    scratch.resize(k);
    if (order.size() != k) {
        order.resize(k);
        std::iota(order.begin(), order.end(), std::size_t{0});
    }
}

void SimplexQp::apply(const double* v, double* out) const {
    if (use_factor_) {
        // factor_t_ is K x D, so each landmark coordinate row is contiguous.
        const double* ft = factor_t_.data();
        for (Index k = 0; k < k_; ++k) out[k] = ridge_ * v[k];
        for (Index d = 0; d < d_; ++d) {
            const double* col = ft + d * k_;
            double s = 0.0;
            for (Index k = 0; k < k_; ++k) s += col[k] * v[k];
            for (Index k = 0; k < k_; ++k) out[k] += s * col[k];
        }
        return;
    }
    const double* h = hessian_.data();
    for (Index i = 0; i < k_; ++i) out[i] = 0.0;
    for (Index j = 0; j < k_; ++j) {
        const double vj = v[j];
        for (Index i = 0; i < k_; ++i) out[i] += h[j * k_ + i] * vj;
    }
}

int SimplexQp::solve(const Eigen::Ref<const Vector>& linear, Eigen::Ref<Vector> gamma) const {
    thread_local Workspace ws;
    const auto k = static_cast<std::size_t>(k_);
    ws.resize(k);
    project_to_simplex_inplace(gamma.data(), k, ws.scratch.data());
    if (lipschitz_ <= 0.0 || k_ == 1) return 0;

    const double* b = linear.data();
    double* cur = ws.current.data();
    double* look = ws.lookahead.data();
    double* cand = ws.candidate.data();
    double* h_cur = ws.h_current.data();
    double* h_look = ws.h_lookahead.data();
    double* h_cand = ws.h_candidate.data();
    std::size_t* order = ws.order.data();
    const double step = 1.0 / lipschitz_;

    // H is applied once per iteration: H of the lookahead point is the same
    // affine combination of H cur and H cand as the point itself.
    // Near the optimum objective differences drown in rounding of its two
    // terms, which caps the reachable iterate accuracy near sqrt(eps). Tighter
    // tolerances need comparisons that allow for that noise.
    const double noise_factor = tolerance_ < kValueResolution ? 8.0 * std::numeric_limits<double>::epsilon() : 0.0;
    double roundoff = 0.0;
    const auto objective = [&](const double* g, const double* hg) {
        double quad = 0.0;
        double lin = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            quad += g[i] * hg[i];
            lin += g[i] * b[i];
        }
        roundoff = noise_factor * (0.5 * std::abs(quad) + std::abs(lin));
        return 0.5 * quad - lin;
    };
    const auto gradient_step = [&](const double* from, const double* h_from) {
        for (std::size_t i = 0; i < k; ++i) cand[i] = from[i] - step * (h_from[i] - b[i]);
        project_to_simplex_ordered(cand, k, order);
        apply(cand, h_cand);
        return objective(cand, h_cand);
    };

    for (std::size_t i = 0; i < k; ++i) cur[i] = look[i] = gamma[static_cast<Index>(i)];
    apply(cur, h_cur);
    std::copy(h_cur, h_cur + k, h_look);
    double f_cur = objective(cur, h_cur);
    double momentum = 1.0;

    int iter = 0;
    while (iter < kMaxIterations) {
        ++iter;
        double f_cand = gradient_step(look, h_look);
        if (f_cand > f_cur + roundoff) {
            // Momentum overshot; fall back to a plain step from the current point.
            if (momentum == 1.0) break;
            momentum = 1.0;
            f_cand = gradient_step(cur, h_cur);
            if (f_cand > f_cur + roundoff) break;
        }
        const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        const double beta = (momentum - 1.0) / next_momentum;
        double change = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double diff = cand[i] - cur[i];
            change += diff * diff;
            look[i] = cand[i] + beta * diff;
            h_look[i] = h_cand[i] + beta * (h_cand[i] - h_cur[i]);
            cur[i] = cand[i];
            h_cur[i] = h_cand[i];
        }
        f_cur = f_cand;
        momentum = next_momentum;
        if (std::sqrt(change) < tolerance_) break;
    }

    for (std::size_t i = 0; i < k; ++i) gamma[static_cast<Index>(i)] = cur[i];
    return iter;
}

}  // namespace spadep::detail
