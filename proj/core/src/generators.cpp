#include "spadep/generators.hpp"

#include <cmath>

#include "spadep/random.hpp"

namespace spadep {

namespace {

constexpr double kLogisticBound = 10.0;
constexpr double kArBound = 1e6;

// Stream indices so coefficient and noise draws never share a sequence.
constexpr std::uint64_t kCoefficientStream = 0;
constexpr std::uint64_t kNoiseStream = 1;

}  // namespace

TimeSeriesMatrix gen_logistic(const LogisticConfig& cfg) {
    if (cfg.length < 1) throw Error(ErrorCode::ConfigError, "logistic length must be positive");
    if (cfg.x0 < 0.0 || cfg.x0 > 1.0 || cfg.y0 < 0.0 || cfg.y0 > 1.0) {
        throw Error(ErrorCode::ConfigError, "logistic initial values must lie in [0, 1]");
    }
    Matrix out(2, cfg.length);
    double x = cfg.x0;
    double y = cfg.y0;
    out(0, 0) = x;
    out(1, 0) = y;
    for (Index t = 1; t < cfg.length; ++t) {
        const double nx = cfg.r_x * x * (1.0 - x) - cfg.c_yx * y * x;
        const double ny = cfg.r_y * y * (1.0 - y) - cfg.c_xy * x * y;
        if (!(std::abs(nx) <= kLogisticBound && std::abs(ny) <= kLogisticBound)) {
            throw Error(ErrorCode::DivergenceDetected, "logistic trajectory left [-10, 10] at step " + std::to_string(t));
        }
        x = nx;
        y = ny;
        out(0, t) = x;
        out(1, t) = y;
    }
    return TimeSeriesMatrix(std::move(out), {"X", "Y"});
}

SdeTrajectories gen_sde(const SdeConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw Error(ErrorCode::ConfigError, "dt must be positive");
    if (cfg.steps < 1) throw Error(ErrorCode::ConfigError, "steps must be positive");

    CounterRng rng(cfg.seed, kNoiseStream);
    const double sqrt_dt = std::sqrt(cfg.dt);
    Matrix a(2, cfg.steps), b(2, cfg.steps), c(2, cfg.steps);
    Eigen::Vector2d ca(cfg.a0[0], cfg.a0[1]);
    Eigen::Vector2d cb(cfg.b0[0], cfg.b0[1]);
    Eigen::Vector2d cc(cfg.c0[0], cfg.c0[1]);
    a.col(0) = ca;
    b.col(0) = cb;
    c.col(0) = cc;

    auto h = [](const Eigen::Vector2d& x) { return Eigen::Vector2d(-(x[0] * x[0] * x[0] - x[0]), -1.0); };

    for (Index t = 1; t < cfg.steps; ++t) {
        const Eigen::Vector2d drift_c(0.0, -10.0 * (cc[1] * cc[1] * cc[1] - cc[1]));
        const Eigen::Vector2d drift_b = cfg.alpha * h(cb) - 10.0 * (cb - cc);
        const Eigen::Vector2d drift_a = cfg.alpha * h(ca) - 5.0 * (ca - cb) - 5.0 * (ca - cc);

        Eigen::Vector2d noise_c, noise_b, noise_a;
        for (int d = 0; d < 2; ++d) noise_c[d] = cfg.sigma_c[static_cast<std::size_t>(d)] * rng.gaussian();
        for (int d = 0; d < 2; ++d) noise_b[d] = cfg.sigma_ab * rng.gaussian();
        for (int d = 0; d < 2; ++d) noise_a[d] = cfg.sigma_ab * rng.gaussian();

        cc += drift_c * cfg.dt + noise_c * sqrt_dt;
        cb += drift_b * cfg.dt + noise_b * sqrt_dt;
        ca += drift_a * cfg.dt + noise_a * sqrt_dt;
        if (!(ca.allFinite() && cb.allFinite() && cc.allFinite())) {
            throw Error(ErrorCode::DivergenceDetected, "SDE state became non-finite at step " + std::to_string(t));
        }
        a.col(t) = ca;
        b.col(t) = cb;
        c.col(t) = cc;
    }
    return SdeTrajectories{TimeSeriesMatrix(std::move(a), {"A1", "A2"}), TimeSeriesMatrix(std::move(b), {"B1", "B2"}),
                           TimeSeriesMatrix(std::move(c), {"C1", "C2"})};
}

void ArConfig::validate() const {
    if (block_dim < 1) throw Error(ErrorCode::ConfigError, "block_dim must be positive");
    if (order < 1) throw Error(ErrorCode::ConfigError, "AR order must be positive");
    if (static_cast<Index>(coeff_stds.size()) != order) {
        throw Error(ErrorCode::ConfigError, "need one coefficient std per lag");
    }
    for (double s : coeff_stds) {
        if (s < 0.0) throw Error(ErrorCode::ConfigError, "coefficient std must be non-negative");
    }
    if (noise_cov_scale < 0.0) throw Error(ErrorCode::ConfigError, "noise scale must be non-negative");
    if (length < order) throw Error(ErrorCode::ConfigError, "AR length shorter than its order");
    if (initial && (initial->rows() != 2 * block_dim || initial->cols() != order)) {
        throw Error(ErrorCode::ConfigError, "initial block has the wrong shape");
    }
}

ArCoefficients draw_ar_coefficients(const ArConfig& cfg) {
    cfg.validate();
    CounterRng rng(cfg.seed, kCoefficientStream);
    const Index n = 2 * cfg.block_dim;
    ArCoefficients out;
    for (Index lag = 0; lag < cfg.order; ++lag) {
        const double s = cfg.coeff_stds[static_cast<std::size_t>(lag)];
        Matrix phi(n, n);
        for (Index j = 0; j < n; ++j) {
            for (Index i = 0; i < n; ++i) phi(i, j) = rng.gaussian(0.0, s);
        }
        phi.bottomLeftCorner(cfg.block_dim, cfg.block_dim).setZero();
        out.lags.push_back(std::move(phi));
    }
    return out;
}

TimeSeriesMatrix simulate_ar(const ArConfig& cfg, const ArCoefficients& coeffs) {
    cfg.validate();
    const Index n = 2 * cfg.block_dim;
    if (static_cast<Index>(coeffs.lags.size()) != cfg.order) {
        throw Error(ErrorCode::DimensionMismatch, "coefficient count differs from AR order");
    }
    for (const auto& phi : coeffs.lags) {
        if (phi.rows() != n || phi.cols() != n) throw Error(ErrorCode::DimensionMismatch, "coefficient shape");
    }

    CounterRng rng(cfg.seed, kNoiseStream);
    const double noise_std = std::sqrt(cfg.noise_cov_scale);
    Matrix out = Matrix::Zero(n, cfg.length);
    if (cfg.initial) out.leftCols(cfg.order) = *cfg.initial;

    for (Index t = cfg.order; t < cfg.length; ++t) {
        Vector next(n);
        for (Index i = 0; i < n; ++i) next[i] = noise_std * rng.gaussian();
        for (Index lag = 0; lag < cfg.order; ++lag) next += coeffs.lags[static_cast<std::size_t>(lag)] * out.col(t - 1 - lag);
        if (!(next.allFinite() && next.cwiseAbs().maxCoeff() <= kArBound)) {
            throw Error(ErrorCode::DivergenceDetected, "AR trajectory exceeded 1e6 at step " + std::to_string(t));
        }
        out.col(t) = next;
    }

    std::vector<std::string> labels;
    for (Index i = 0; i < cfg.block_dim; ++i) labels.push_back("X" + std::to_string(i + 1));
    for (Index i = 0; i < cfg.block_dim; ++i) labels.push_back("Y" + std::to_string(i + 1));
    return TimeSeriesMatrix(std::move(out), std::move(labels));
}

TimeSeriesMatrix gen_ar(const ArConfig& cfg) { return simulate_ar(cfg, draw_ar_coefficients(cfg)); }

}  // namespace spadep
