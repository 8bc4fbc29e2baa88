#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spadep/mapping.hpp"
#include "spadep/types.hpp"

namespace spadep {

/// Sum of all singular values of the raw matrix.
[[nodiscard]] double schatten1(const StochasticMatrix& m);

/// Mean over rows of the sample variance (divisor K_X - 1) of the row entries.
/// Throws DegenerateShape when the matrix has a single column.
[[nodiscard]] double avg_row_variance(const StochasticMatrix& m);

/// Antisymmetric relative difference (M_ij - M_ji) / max(M_ij, M_ji); zero
/// where both entries vanish and on the diagonal.
[[nodiscard]] Matrix relative_difference(const Matrix& m);

/// Pairwise measure tables. Entry (i, j) describes the map from variable i to
/// variable j, i.e. how strongly j depends on i.
struct DependencyReport {
    std::vector<std::string> variable_names;
    Matrix m_schatten;
    Matrix m_rowvar;
    Matrix delta_schatten;
    Matrix delta_rowvar;
    Index tau = 0;
};

/// `fits[i][j]` is the map from variable i to variable j. Diagonal entries may
/// be empty (recorded as 0); off-diagonal entries are required.
using FitTable = std::vector<std::vector<std::optional<LambdaFit>>>;

[[nodiscard]] DependencyReport build_report(const FitTable& fits, const std::vector<std::string>& names);

}  // namespace spadep
