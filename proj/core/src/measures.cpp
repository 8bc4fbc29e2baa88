#include "spadep/measures.hpp"

#include <algorithm>

namespace spadep {

double schatten1(const StochasticMatrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m.matrix());
    return svd.singularValues().sum();
}

double avg_row_variance(const StochasticMatrix& m) {
    const Index kx = m.cols();
    if (kx < 2) throw Error(ErrorCode::DegenerateShape, "row variance needs at least two columns");
    const Matrix& a = m.matrix();
    const Vector row_mean = a.rowwise().mean();
    const Vector row_var = (a.colwise() - row_mean).rowwise().squaredNorm() / static_cast<double>(kx - 1);
    return row_var.mean();
}

Matrix relative_difference(const Matrix& m) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "measure table must be square");
    const Index n = m.rows();
    Matrix delta = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const double denom = std::max(m(i, j), m(j, i));
            const double d = denom == 0.0 ? 0.0 : (m(i, j) - m(j, i)) / denom;
            delta(i, j) = d;
            delta(j, i) = -d;
        }
    }
    return delta;
}

DependencyReport build_report(const FitTable& fits, const std::vector<std::string>& names) {
    const auto n = names.size();
    if (fits.size() != n) throw Error(ErrorCode::DimensionMismatch, "fit table rows differ from name count");
    const auto ni = static_cast<Index>(n);

    DependencyReport report;
    report.variable_names = names;
    report.m_schatten = Matrix::Zero(ni, ni);
    report.m_rowvar = Matrix::Zero(ni, ni);
    bool tau_set = false;

    for (std::size_t i = 0; i < n; ++i) {
        if (fits[i].size() != n) throw Error(ErrorCode::DimensionMismatch, "fit table is not square");
        for (std::size_t j = 0; j < n; ++j) {
            const auto& fit = fits[i][j];
            if (!fit) {
                if (i != j) {
                    throw Error(ErrorCode::DimensionMismatch,
                                "missing fit from " + names[i] + " to " + names[j]);
                }
                continue;
            }
            if (!tau_set) {
                report.tau = fit->tau;
                tau_set = true;
            } else if (fit->tau != report.tau) {
                throw Error(ErrorCode::DimensionMismatch, "fits use different time shifts");
            }
            const auto ii = static_cast<Index>(i);
            const auto jj = static_cast<Index>(j);
            report.m_schatten(ii, jj) = schatten1(fit->lambda);
            report.m_rowvar(ii, jj) = avg_row_variance(fit->lambda);
        }
    }
    report.delta_schatten = relative_difference(report.m_schatten);
    report.delta_rowvar = relative_difference(report.m_rowvar);
    return report;
}

}  // namespace spadep
