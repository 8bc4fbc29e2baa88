#pragma once

#include <cstddef>
#include <vector>

#include "spadep/types.hpp"

namespace spadep {

/// Euclidean projection onto {u : u >= 0, sum(u) = 1}.
///
/// Sort-based exact algorithm. Vectors that are already feasible to within
/// rounding are returned unchanged, which makes the projection idempotent
/// bit for bit. Throws InvalidInput on non-finite or empty input.
[[nodiscard]] Vector project_to_simplex(const Vector& v);

/// In-place variant used by the inner solver loops. `scratch` is resized as needed.
void project_to_simplex_inplace(Eigen::Ref<Vector> v, std::vector<double>& scratch);

/// Raw-array variant; `scratch` must hold at least n values.
void project_to_simplex_inplace(double* v, std::size_t n, double* scratch);

/// Raw-array variant for repeated projections of slowly changing vectors.
/// `order` must hold a permutation of 0..n-1; it is used as the starting
/// order of the sort and left sorted by decreasing entry of v.
void project_to_simplex_ordered(double* v, std::size_t n, std::size_t* order);

}  // namespace spadep
