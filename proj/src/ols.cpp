#include "gepcc/ols.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "gepcc/error.hpp"

namespace gepcc::evolution {

OlsFit ols_link(std::span<const std::vector<double>> regressors, std::span<const double> targets) {
    const auto n = static_cast<Eigen::Index>(targets.size());
    const auto p = static_cast<Eigen::Index>(regressors.size()) + 1;
    if (n <= p) {
        throw DataError("least squares needs more than " + std::to_string(p) + " rows, got " + std::to_string(n));
    }

    Eigen::MatrixXd design(n, p);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        y(i) = targets[static_cast<std::size_t>(i)];
    }
    for (Eigen::Index j = 1; j < p; ++j) {
        const auto& col = regressors[static_cast<std::size_t>(j - 1)];
        if (static_cast<Eigen::Index>(col.size()) != n) throw DataError("regressor length mismatch");
        for (Eigen::Index i = 0; i < n; ++i) design(i, j) = col[static_cast<std::size_t>(i)];
    }
    if (!design.allFinite() || !y.allFinite()) throw DataError("least squares input is not finite");

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
    const Eigen::VectorXd beta = cod.solve(y);

    OlsFit fit;
    fit.coefficients.assign(beta.data(), beta.data() + beta.size());
    fit.rank = static_cast<std::size_t>(cod.rank());
    fit.rank_deficient = cod.rank() < p;
    return fit;
}

}  // namespace gepcc::evolution
