#include "spadep/types.hpp"

#include <algorithm>
#include <cmath>

namespace spadep {

namespace {

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) throw Error(ErrorCode::InvalidInput, std::string(what) + " contains NaN or Inf");
}

}  // namespace

TimeSeriesMatrix::TimeSeriesMatrix(Matrix data, std::vector<std::string> labels)
    : data_(std::move(data)), labels_(std::move(labels)) {
    if (data_.rows() == 0 || data_.cols() == 0) throw Error(ErrorCode::InvalidInput, "empty time series");
    require_finite(data_, "time series");
    if (!labels_.empty() && static_cast<Index>(labels_.size()) != data_.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "label count does not match series dimension");
    }
}

TimeSeriesMatrix TimeSeriesMatrix::row_block(Index first, Index count) const {
    if (first < 0 || count <= 0 || first + count > dim()) {
        throw Error(ErrorCode::DimensionMismatch, "row block outside series");
    }
    std::vector<std::string> sub;
    if (!labels_.empty()) sub.assign(labels_.begin() + first, labels_.begin() + first + count);
    return TimeSeriesMatrix(data_.middleRows(first, count), std::move(sub));
}

TimeSeriesMatrix TimeSeriesMatrix::time_window(Index first, Index count) const {
    if (first < 0 || count <= 0 || first + count > length()) {
        throw Error(ErrorCode::DimensionMismatch, "time window outside series");
    }
    return TimeSeriesMatrix(data_.middleCols(first, count), labels_);
}

TimeSeriesMatrix TimeSeriesMatrix::differenced() const {
    if (length() < 2) throw Error(ErrorCode::InsufficientData, "differencing needs at least two time steps");
    const Index t = length();
    return TimeSeriesMatrix(data_.rightCols(t - 1) - data_.leftCols(t - 1), labels_);
}

LandmarkSet::LandmarkSet(Matrix sigma) : sigma_(std::move(sigma)) {
    if (sigma_.rows() == 0 || sigma_.cols() == 0) throw Error(ErrorCode::InvalidInput, "empty landmark set");
    require_finite(sigma_, "landmark set");
    for (Index i = 0; i < sigma_.cols(); ++i) {
        for (Index j = i + 1; j < sigma_.cols(); ++j) {
            if ((sigma_.col(i) - sigma_.col(j)).norm() <= tol::kDuplicateLandmark) {
                throw Error(ErrorCode::InvalidInput,
                            "landmarks " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
            }
        }
    }
}

AffiliationSeries::AffiliationSeries(Matrix gamma) : gamma_(std::move(gamma)) {
    if (gamma_.rows() == 0 || gamma_.cols() == 0) throw Error(ErrorCode::InvalidInput, "empty affiliation series");
    require_finite(gamma_, "affiliation series");
    if (gamma_.minCoeff() < -tol::kNonNegative) {
        throw Error(ErrorCode::InvalidInput, "affiliation series has a negative entry");
    }
    gamma_ = gamma_.cwiseMax(0.0);
    for (Index t = 0; t < gamma_.cols(); ++t) {
        if (std::abs(gamma_.col(t).sum() - 1.0) > tol::kColumnSum) {
            throw Error(ErrorCode::NotColumnStochastic,
                        "affiliation column " + std::to_string(t) + " does not sum to one");
        }
    }
}

AffiliationSeries AffiliationSeries::time_window(Index first, Index count) const {
    if (first < 0 || count <= 0 || first + count > length()) {
        throw Error(ErrorCode::DimensionMismatch, "time window outside affiliation series");
    }
    return AffiliationSeries(gamma_.middleCols(first, count));
}

StochasticMatrix validate_stochastic(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) throw Error(ErrorCode::InvalidInput, "empty matrix");
    require_finite(m, "matrix");
    if (m.minCoeff() < -tol::kNonNegative || m.maxCoeff() > 1.0 + tol::kNonNegative) {
        throw Error(ErrorCode::NotColumnStochastic, "entry outside [0, 1]");
    }
    Matrix clipped = m.cwiseMax(0.0).cwiseMin(1.0);
    for (Index j = 0; j < clipped.cols(); ++j) {
        const double s = clipped.col(j).sum();
        if (std::abs(s - 1.0) > tol::kColumnSum) {
            throw Error(ErrorCode::NotColumnStochastic,
                        "column " + std::to_string(j) + " sums to " + std::to_string(s));
        }
        if (s != 1.0) clipped.col(j) /= s;
    }
    return StochasticMatrix(std::move(clipped));
}

bool is_stochastic_vector(const Vector& v) noexcept {
    return v.size() > 0 && v.allFinite() && v.minCoeff() >= -tol::kNonNegative &&
           std::abs(v.sum() - 1.0) <= tol::kColumnSum;
}

SegmentedAffiliationPair::SegmentedAffiliationPair(std::vector<Segment> segments, Index tau) : tau_(tau) {
    if (tau < 0) throw Error(ErrorCode::InvalidInput, "negative time shift");
    for (auto& seg : segments) {
        if (seg.first.length() != seg.second.length()) {
            throw Error(ErrorCode::DimensionMismatch, "segment source and target lengths differ");
        }
        if (!segments_.empty() && (seg.first.count() != segments_.front().first.count() ||
                                   seg.second.count() != segments_.front().second.count())) {
            throw Error(ErrorCode::DimensionMismatch, "segments use different landmark counts");
        }
        if (seg.first.length() > tau) {
            segments_.push_back(std::move(seg));
        } else {
            ++dropped_;
        }
    }
}

}  // namespace spadep
