#include "spadep/mapping.hpp"

#include <cmath>

#include "spadep/simplex.hpp"

namespace spadep {

namespace {

void project_columns(Matrix& m, std::vector<double>& scratch) {
    for (Index j = 0; j < m.cols(); ++j) project_to_simplex_inplace(m.col(j), scratch);
}

/// Accelerated projected gradient on 0.5 ||B - Lambda A||_F^2 with per-column
/// simplex projection and momentum restart; accepted iterates never increase
/// the objective.
LambdaFit solve_lambda(const Matrix& source, const Matrix& target, Index tau, const LambdaSolverOptions& opts) {
    const Index ky = target.rows();
    const Index kx = source.rows();
    const Matrix gram = source * source.transpose();  // K_X x K_X
    const Matrix cross = target * source.transpose();  // K_Y x K_X
    const double target_sq = target.squaredNorm();

    auto objective = [&](const Matrix& lambda) {
        // ||B||^2 - 2 tr(Lambda' B A') + tr(Lambda A A' Lambda')
        const double v = target_sq - 2.0 * (lambda.cwiseProduct(cross)).sum() +
                         (lambda * gram).cwiseProduct(lambda).sum();
        return std::max(v, 0.0);
    };

    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    const double lipschitz = eig.eigenvalues().maxCoeff();

    Matrix current = Matrix::Constant(ky, kx, 1.0 / static_cast<double>(ky));
    double f_current = objective(current);
    std::vector<double> history;
    if (opts.record_history) history.push_back(f_current);

    int iter = 0;
    if (lipschitz > 0.0 && ky > 1) {
        const double step = 1.0 / lipschitz;
        std::vector<double> scratch;
        Matrix lookahead = current;
        Matrix candidate(ky, kx);
        double momentum = 1.0;
        while (iter < opts.max_iters) {
            ++iter;
            candidate = lookahead - step * (lookahead * gram - cross);
            project_columns(candidate, scratch);
            double f_candidate = objective(candidate);
            if (f_candidate > f_current) {
                momentum = 1.0;
                candidate = current - step * (current * gram - cross);
                project_columns(candidate, scratch);
                f_candidate = objective(candidate);
                if (f_candidate > f_current) break;
            }
            const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
            lookahead = candidate + ((momentum - 1.0) / next_momentum) * (candidate - current);
            const double decrease = f_current - f_candidate;
            const double previous = f_current;
            current.swap(candidate);
            f_current = f_candidate;
            momentum = next_momentum;
            if (opts.record_history) history.push_back(f_current);
            if (f_current == 0.0 || decrease < opts.rel_tol * previous) break;
        }
    }

    const double residual = (target - current * source).norm();
    return LambdaFit{validate_stochastic(current), residual, tau, source.cols(), iter, std::move(history)};
}

}  // namespace

LambdaFit fit_lambda(const AffiliationSeries& source, const AffiliationSeries& target, Index tau,
                     const LambdaSolverOptions& options) {
    if (tau < 0) throw Error(ErrorCode::InvalidInput, "negative time shift");
    if (source.length() != target.length()) {
        throw Error(ErrorCode::DimensionMismatch, "source and target series have different lengths");
    }
    const Index t_len = source.length();
    if (t_len <= tau) {
        throw Error(ErrorCode::InsufficientData,
                    "series of length " + std::to_string(t_len) + " has no pair at shift " + std::to_string(tau));
    }
    const Index pairs = t_len - tau;
    return solve_lambda(source.gamma().leftCols(pairs), target.gamma().rightCols(pairs), tau, options);
}

LambdaFit fit_lambda_segmented(const SegmentedAffiliationPair& pair, const LambdaSolverOptions& options) {
    const auto& segments = pair.segments();
    if (segments.empty()) {
        throw Error(ErrorCode::InsufficientData,
                    "no segment is longer than the time shift " + std::to_string(pair.tau()));
    }
    const Index tau = pair.tau();
    Index pairs = 0;
    for (const auto& seg : segments) pairs += seg.first.length() - tau;

    const Index kx = segments.front().first.count();
    const Index ky = segments.front().second.count();
    Matrix source(kx, pairs);
    Matrix target(ky, pairs);
    Index offset = 0;
    for (const auto& [src, tgt] : segments) {
        const Index n = src.length() - tau;
        source.middleCols(offset, n) = src.gamma().leftCols(n);
        target.middleCols(offset, n) = tgt.gamma().rightCols(n);
        offset += n;
    }
    return solve_lambda(source, target, tau, options);
}

Vector predict(const LambdaFit& fit, const Vector& source_state) {
    if (source_state.size() != fit.lambda.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "state length differs from Lambda column count");
    }
    if (!is_stochastic_vector(source_state)) throw Error(ErrorCode::InvalidInput, "state is not a stochastic vector");
    return fit.lambda.matrix() * source_state;
}

}  // namespace spadep
