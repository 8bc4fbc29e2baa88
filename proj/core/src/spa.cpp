#include "spadep/spa.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "simplex_qp.hpp"
#include "spadep/random.hpp"

namespace spadep {

namespace {

constexpr double kSigmaRidge = 1e-10;
constexpr double kRhoEpsilon = 1e-6;
constexpr double kJitterScale = 1e-3;
// Inside the alternating fit every affiliation is solved again on the next
// sweep, so a looser inner tolerance suffices there.
constexpr double kAlsGammaTol = 1e-8;

void require_same_dim(Index data_dim, const LandmarkSet& landmarks) {
    if (data_dim != landmarks.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "data dimension " + std::to_string(data_dim) +
                                                      " vs landmark dimension " + std::to_string(landmarks.dim()));
    }
}

double residual_norm(const Matrix& x, const Matrix& sigma, const Matrix& gamma) {
    return (x - sigma * gamma).norm();
}

/// Warm-started simplex least squares for every column of `gamma`.
void gamma_step(const Matrix& x, const Matrix& sigma, Matrix& gamma, double tolerance) {
    const detail::SimplexQp qp(sigma, 0.0, tolerance);
    const Matrix linear = sigma.transpose() * x;
    for (Index t = 0; t < x.cols(); ++t) {
        qp.solve(linear.col(t), gamma.col(t));
    }
}

Matrix nearest_landmark_gamma(const Matrix& x, const Matrix& sigma) {
    Matrix gamma = Matrix::Zero(sigma.cols(), x.cols());
    for (Index t = 0; t < x.cols(); ++t) {
        Index best = 0;
        (sigma.colwise() - x.col(t)).colwise().squaredNorm().minCoeff(&best);
        gamma(best, t) = 1.0;
    }
    return gamma;
}

/// Unconstrained least squares for the landmarks with a small ridge. Landmarks
/// that carry no weight keep their previous position.
Matrix sigma_step(const Matrix& x, const Matrix& gamma, const Matrix& previous) {
    const Index k = gamma.rows();
    Matrix gram = gamma * gamma.transpose();
    gram.diagonal().array() += kSigmaRidge;
    Matrix sigma = gram.ldlt().solve(gamma * x.transpose()).transpose();
    const Vector usage = gamma.rowwise().sum();
    for (Index j = 0; j < k; ++j) {
        if (usage[j] <= 1e-12 || !sigma.col(j).allFinite()) sigma.col(j) = previous.col(j);
    }
    return sigma;
}

Matrix initial_landmarks(const Matrix& x, Index k, CounterRng& rng) {
    const Index t_len = x.cols();
    std::vector<Index> order(static_cast<std::size_t>(t_len));
    std::iota(order.begin(), order.end(), Index{0});
    const Index distinct = std::min(k, t_len);
    for (Index i = 0; i < distinct; ++i) {
        const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(t_len - i)));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }

    const Vector mean = x.rowwise().mean();
    const Vector stddev = ((x.colwise() - mean).array().square().rowwise().sum() / static_cast<double>(t_len))
                              .sqrt()
                              .matrix();

    Matrix sigma(x.rows(), k);
    for (Index j = 0; j < k; ++j) {
        const Index col = j < distinct ? order[static_cast<std::size_t>(j)]
                                       : static_cast<Index>(rng.below(static_cast<std::uint64_t>(t_len)));
        for (Index d = 0; d < x.rows(); ++d) {
            const double scale = stddev[d] > 0.0 ? stddev[d] : std::max(std::abs(mean[d]), 1.0);
            sigma(d, j) = x(d, col) + rng.gaussian(0.0, kJitterScale * scale);
        }
    }
    return sigma;
}

struct RunResult {
    Matrix sigma;
    Matrix gamma;
    double objective = std::numeric_limits<double>::infinity();
    int iterations = 0;
    std::vector<double> history;
};

RunResult single_run(const Matrix& x, const Spa1Config& cfg, int restart) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(restart));
    RunResult run;
    run.sigma = initial_landmarks(x, cfg.k, rng);
    run.gamma = nearest_landmark_gamma(x, run.sigma);
    gamma_step(x, run.sigma, run.gamma, kAlsGammaTol);
    run.objective = residual_norm(x, run.sigma, run.gamma);
    run.history.push_back(run.objective);

    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        run.iterations = iter;
        const double before = run.objective;

        Matrix sigma = sigma_step(x, run.gamma, run.sigma);
        const double after_sigma = residual_norm(x, sigma, run.gamma);
        if (after_sigma <= run.objective) {
            run.sigma = std::move(sigma);
            run.objective = after_sigma;
        }
        run.history.push_back(run.objective);

        Matrix gamma = run.gamma;
        gamma_step(x, run.sigma, gamma, kAlsGammaTol);
        const double after_gamma = residual_norm(x, run.sigma, gamma);
        if (after_gamma <= run.objective) {
            run.gamma = std::move(gamma);
            run.objective = after_gamma;
        }
        run.history.push_back(run.objective);

        if (run.objective == 0.0 || (before - run.objective) < cfg.rel_tol * before) break;
    }
    return run;
}

}  // namespace

void Spa1Config::validate() const {
    if (k < 1) throw Error(ErrorCode::ConfigError, "K must be at least 1");
    if (max_iters < 1) throw Error(ErrorCode::ConfigError, "max_iters must be positive");
    if (!(rel_tol > 0.0)) throw Error(ErrorCode::ConfigError, "rel_tol must be positive");
    if (restarts < 1) throw Error(ErrorCode::ConfigError, "restarts must be positive");
    if (fixed_landmarks && fixed_landmarks->count() != k) {
        throw Error(ErrorCode::ConfigError, "fixed landmark count does not match K");
    }
}

Spa1Solution fit_spa1(const TimeSeriesMatrix& data, const Spa1Config& cfg) {
    cfg.validate();
    const Matrix& x = data.data();

    if (cfg.fixed_landmarks) {
        require_same_dim(data.dim(), *cfg.fixed_landmarks);
        AffiliationSeries gamma = solve_gamma(data, *cfg.fixed_landmarks);
        const double objective = residual_norm(x, cfg.fixed_landmarks->sigma(), gamma.gamma());
        return Spa1Solution{*cfg.fixed_landmarks, std::move(gamma), objective, 1, {objective}};
    }

    std::optional<Spa1Solution> best;
    for (int r = 0; r < cfg.restarts; ++r) {
        RunResult run = single_run(x, cfg, r);
        if (best && !(run.objective < best->objective)) continue;
        try {
            best = Spa1Solution{LandmarkSet(run.sigma), AffiliationSeries(run.gamma), run.objective,
                                run.iterations, std::move(run.history)};
        } catch (const Error&) {
            // collapsed landmarks; this restart is unusable
        }
    }
    if (!best) throw Error(ErrorCode::DegenerateInput, "every restart produced coinciding landmarks");
    return std::move(*best);
}

AffiliationSeries solve_gamma(const TimeSeriesMatrix& data, const LandmarkSet& landmarks) {
    require_same_dim(data.dim(), landmarks);
    Matrix gamma = nearest_landmark_gamma(data.data(), landmarks.sigma());
    gamma_step(data.data(), landmarks.sigma(), gamma, 1e-12);
    return AffiliationSeries(std::move(gamma));
}

namespace {

Vector rho_with(const detail::SimplexQp& qp, const Matrix& sigma, const Vector& point, const Vector& reference) {
    Vector gamma = reference;
    qp.solve(sigma.transpose() * point + kRhoEpsilon * reference, gamma);
    return gamma;
}

detail::SimplexQp rho_problem(const Matrix& sigma) {
    return detail::SimplexQp(sigma, kRhoEpsilon);
}

}  // namespace

Vector rho(const Vector& point, const LandmarkSet& landmarks, const Vector& reference) {
    require_same_dim(point.size(), landmarks);
    if (reference.size() != landmarks.count()) {
        throw Error(ErrorCode::DimensionMismatch, "reference length differs from landmark count");
    }
    if (!point.allFinite()) throw Error(ErrorCode::InvalidInput, "non-finite data point");
    if (!is_stochastic_vector(reference)) throw Error(ErrorCode::InvalidInput, "reference is not a stochastic vector");
    return rho_with(rho_problem(landmarks.sigma()), landmarks.sigma(), point, reference);
}

AffiliationSeries rho_sequence(const TimeSeriesMatrix& data, const LandmarkSet& landmarks) {
    require_same_dim(data.dim(), landmarks);
    const Matrix& sigma = landmarks.sigma();
    const auto qp = rho_problem(sigma);
    const Index k = landmarks.count();
    Matrix gamma(k, data.length());
    Vector reference = Vector::Constant(k, 1.0 / static_cast<double>(k));
    for (Index t = 0; t < data.length(); ++t) {
        reference = rho_with(qp, sigma, data.data().col(t), reference);
        gamma.col(t) = reference;
    }
    return AffiliationSeries(std::move(gamma));
}

TimeSeriesMatrix reconstruct(const LandmarkSet& landmarks, const AffiliationSeries& affiliations) {
    if (landmarks.count() != affiliations.count()) {
        throw Error(ErrorCode::DimensionMismatch, "landmark count differs from affiliation size");
    }
    return TimeSeriesMatrix(landmarks.sigma() * affiliations.gamma());
}

double representation_error(const TimeSeriesMatrix& data, const LandmarkSet& landmarks,
                            const AffiliationSeries& affiliations) {
    require_same_dim(data.dim(), landmarks);
    if (landmarks.count() != affiliations.count() || data.length() != affiliations.length()) {
        throw Error(ErrorCode::DimensionMismatch, "shapes of data, landmarks and affiliations disagree");
    }
    return residual_norm(data.data(), landmarks.sigma(), affiliations.gamma());
}

}  // namespace spadep
