#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gepcc::evolution {

struct OlsFit {
    /// Intercept first, then one weight per regressor.
    std::vector<double> coefficients;
    std::size_t rank = 0;
    bool rank_deficient = false;
};

/// Least-squares fit of `targets` on an intercept plus the given regressor
/// columns. Rank-deficient designs get the minimum-norm solution.
///
/// Requires more rows than coefficients and finite inputs; throws DataError
/// otherwise.
OlsFit ols_link(std::span<const std::vector<double>> regressors, std::span<const double> targets);

}  // namespace gepcc::evolution
