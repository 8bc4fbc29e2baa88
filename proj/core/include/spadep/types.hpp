#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

#include "spadep/error.hpp"

namespace spadep {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace tol {
/// Allowed deviation of a column sum from 1.
inline constexpr double kColumnSum = 1e-8;
/// Negative entries down to -kNonNegative are treated as zero and clipped.
inline constexpr double kNonNegative = 1e-10;
/// Two landmarks closer than this are considered identical.
inline constexpr double kDuplicateLandmark = 1e-12;
}  // namespace tol

/// D x T observations, one column per time step.
class TimeSeriesMatrix {
public:
    explicit TimeSeriesMatrix(Matrix data, std::vector<std::string> labels = {});

    [[nodiscard]] const Matrix& data() const noexcept { return data_; }
    [[nodiscard]] Index dim() const noexcept { return data_.rows(); }
    [[nodiscard]] Index length() const noexcept { return data_.cols(); }
    [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }

    /// Rows [first, first + count) as a new series (labels carried over).
    [[nodiscard]] TimeSeriesMatrix row_block(Index first, Index count) const;
    /// Columns [first, first + count).
    [[nodiscard]] TimeSeriesMatrix time_window(Index first, Index count) const;
    /// First differences X_{t+1} - X_t; length shrinks by one. Requires T >= 2.
    [[nodiscard]] TimeSeriesMatrix differenced() const;

private:
    Matrix data_;
    std::vector<std::string> labels_;
};

/// D x K landmark points, one per column.
class LandmarkSet {
public:
    explicit LandmarkSet(Matrix sigma);

    [[nodiscard]] const Matrix& sigma() const noexcept { return sigma_; }
    [[nodiscard]] Index dim() const noexcept { return sigma_.rows(); }
    [[nodiscard]] Index count() const noexcept { return sigma_.cols(); }

private:
    Matrix sigma_;
};

/// K x T barycentric coordinates; every column lies on the probability simplex.
class AffiliationSeries {
public:
    explicit AffiliationSeries(Matrix gamma);

    [[nodiscard]] const Matrix& gamma() const noexcept { return gamma_; }
    [[nodiscard]] Index count() const noexcept { return gamma_.rows(); }
    [[nodiscard]] Index length() const noexcept { return gamma_.cols(); }

    [[nodiscard]] AffiliationSeries time_window(Index first, Index count) const;

private:
    Matrix gamma_;
};

/// Column-stochastic K_Y x K_X matrix. Only obtainable through validate_stochastic.
class StochasticMatrix {
public:
    [[nodiscard]] const Matrix& matrix() const noexcept { return m_; }
    [[nodiscard]] Index rows() const noexcept { return m_.rows(); }
    [[nodiscard]] Index cols() const noexcept { return m_.cols(); }

private:
    explicit StochasticMatrix(Matrix m) : m_(std::move(m)) {}
    friend StochasticMatrix validate_stochastic(const Matrix& m);

    Matrix m_;
};

/// Clips entries within tolerance into [0, 1] and renormalizes columns whose
/// sum is within tol::kColumnSum of 1. Throws NotColumnStochastic otherwise.
StochasticMatrix validate_stochastic(const Matrix& m);

/// Checks that `v` is a stochastic vector within the library tolerances.
[[nodiscard]] bool is_stochastic_vector(const Vector& v) noexcept;

/// Segments of paired affiliation series with a common time shift. Segments
/// with length <= tau carry no lagged pair and are dropped on construction.
class SegmentedAffiliationPair {
public:
    using Segment = std::pair<AffiliationSeries, AffiliationSeries>;

    SegmentedAffiliationPair(std::vector<Segment> segments, Index tau);

    [[nodiscard]] const std::vector<Segment>& segments() const noexcept { return segments_; }
    [[nodiscard]] Index tau() const noexcept { return tau_; }
    [[nodiscard]] std::size_t dropped() const noexcept { return dropped_; }

private:
    std::vector<Segment> segments_;
    Index tau_;
    std::size_t dropped_ = 0;
};

}  // namespace spadep
