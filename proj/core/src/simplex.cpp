#include "spadep/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace spadep {

void project_to_simplex_inplace(double* v, std::size_t n, double* scratch) {
    // Summation error of a projected vector is bounded by a few ulps per entry.
    const double slack = 4.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon();
    double sum = 0.0;
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        sum += v[i];
        lowest = std::min(lowest, v[i]);
    }
    if (lowest >= 0.0 && std::abs(sum - 1.0) <= slack) return;

    std::copy(v, v + n, scratch);
    if (n <= 16) {
        // Insertion sort (descending); faster than std::sort at these sizes.
        for (std::size_t i = 1; i < n; ++i) {
            const double key = scratch[i];
            std::size_t j = i;
            for (; j > 0 && scratch[j - 1] < key; --j) scratch[j] = scratch[j - 1];
            scratch[j] = key;
        }
    } else {
        std::sort(scratch, scratch + n, std::greater<>());
    }
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        cumulative += scratch[j];
        const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (!(scratch[j] - candidate > 0.0)) break;
        theta = candidate;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = std::max(v[i] - theta, 0.0);
}

void project_to_simplex_ordered(double* v, std::size_t n, std::size_t* order) {
    // Insertion sort of the index permutation; linear when the order from the
    // previous call still holds.
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t key = order[i];
        const double value = v[key];
        std::size_t j = i;
        for (; j > 0 && v[order[j - 1]] < value; --j) order[j] = order[j - 1];
        order[j] = key;
    }
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double entry = v[order[j]];
        cumulative += entry;
        const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (!(entry - candidate > 0.0)) break;
        theta = candidate;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = std::max(v[i] - theta, 0.0);
}

void project_to_simplex_inplace(Eigen::Ref<Vector> v, std::vector<double>& scratch) {
    const auto n = static_cast<std::size_t>(v.size());
    if (scratch.size() < n) scratch.resize(n);
    project_to_simplex_inplace(v.data(), n, scratch.data());
}

Vector project_to_simplex(const Vector& v) {
    if (v.size() == 0) throw Error(ErrorCode::InvalidInput, "cannot project an empty vector");
    if (!v.allFinite()) throw Error(ErrorCode::InvalidInput, "non-finite entry in vector to project");
    Vector out = v;
    std::vector<double> scratch;
    project_to_simplex_inplace(out, scratch);
    return out;
}

}  // namespace spadep
