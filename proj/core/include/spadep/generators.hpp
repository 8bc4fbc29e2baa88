#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "spadep/types.hpp"

namespace spadep {

/// Two-species logistic map with cross-coupling:
///   X_t = r_x X_{t-1} (1 - X_{t-1}) - c_yx Y_{t-1} X_{t-1}
///   Y_t = r_y Y_{t-1} (1 - Y_{t-1}) - c_xy X_{t-1} Y_{t-1}
struct LogisticConfig {
    double r_x = 3.8;
    double r_y = 3.5;
    double c_xy = 0.1;   ///< strength of X in Y's update
    double c_yx = 0.02;  ///< strength of Y in X's update
    double x0 = 0.8;
    double y0 = 0.8;
    Index length = 1800;
};

/// 2 x length series; column 0 is (x0, y0).
[[nodiscard]] TimeSeriesMatrix gen_logistic(const LogisticConfig& cfg);

using Point2 = std::array<double, 2>;

/// Three coupled planar diffusions A <- B <- C (C autonomous, metastable in
/// its second coordinate), integrated with Euler-Maruyama.
struct SdeConfig {
    double alpha = 5.0;
    Point2 sigma_c = {0.01, 0.05};  ///< diagonal of the C diffusion matrix
    double sigma_ab = 0.2;          ///< diffusion of A and B (times identity)
    double dt = 0.1;
    Index steps = 1000;
    std::uint64_t seed = 0;
    Point2 a0 = {1.0, 1.0};
    Point2 b0 = {1.0, 1.0};
    Point2 c0 = {1.0, 1.0};
};

struct SdeTrajectories {
    TimeSeriesMatrix a;
    TimeSeriesMatrix b;
    TimeSeriesMatrix c;
};

/// Each trajectory is 2 x steps, column 0 being the initial state.
[[nodiscard]] SdeTrajectories gen_sde(const SdeConfig& cfg);

/// Block-triangular vector autoregression in which Y drives X but not the
/// reverse.
struct ArConfig {
    Index block_dim = 4;
    Index order = 3;
    std::vector<double> coeff_stds = {0.1, 0.05, 0.03};
    double noise_cov_scale = 0.01;
    Index length = 1000;
    std::uint64_t seed = 0;
    /// 2*block_dim x order starting columns; zero when absent.
    std::optional<Matrix> initial;

    void validate() const;
};

/// One (2*block_dim)^2 matrix per lag, lower-left block zero.
struct ArCoefficients {
    std::vector<Matrix> lags;
};

[[nodiscard]] ArCoefficients draw_ar_coefficients(const ArConfig& cfg);

/// Simulates with given coefficients. Noise draws depend only on the seed,
/// never on the coefficients.
[[nodiscard]] TimeSeriesMatrix simulate_ar(const ArConfig& cfg, const ArCoefficients& coeffs);

/// draw_ar_coefficients followed by simulate_ar; rows are (X; Y).
[[nodiscard]] TimeSeriesMatrix gen_ar(const ArConfig& cfg);

}  // namespace spadep
