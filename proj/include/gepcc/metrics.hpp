#pragma once

// Goodness-of-fit statistics for measured (h) versus predicted (t) series and
// the regression-through-origin acceptance battery (k, k', Ro^2, Ro'^2, Rm).

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gepcc::metrics {

/// Measured and predicted values of equal, nonzero length, all finite.
class PairedSeries {
public:
    /// Throws DataError when the invariants do not hold.
    PairedSeries(std::vector<double> measured, std::vector<double> predicted);

    std::span<const double> measured() const noexcept { return measured_; }
    std::span<const double> predicted() const noexcept { return predicted_; }
    std::size_t size() const noexcept { return measured_.size(); }

private:
    std::vector<double> measured_;
    std::vector<double> predicted_;
};

/// Pearson correlation: covariance over the product of root sums of squares.
/// Undefined for n < 2 or a constant column.
std::optional<double> pearson_r(const PairedSeries& s);

/// Square of pearson_r. This is what reports label "R2".
std::optional<double> r_squared(const PairedSeries& s);

double rmse(const PairedSeries& s);
double mae(const PairedSeries& s);

/// RMSE over raw spans, for callers that have not built a PairedSeries.
/// Returns NaN on any non-finite input.
double rmse(std::span<const double> measured, std::span<const double> predicted);

struct ValidationCriteria {
    double k_low = 0.85;
    double k_high = 1.15;
    double rm_min = 0.5;
    /// Ro^2 and Ro'^2 pass when |1 - value| < this.
    double ro_tolerance = 0.1;
};

enum class Correlation { Strong, Weak };

/// "strong" when |r| > 0.8.
Correlation smith_classification(double r) noexcept;
const char* to_string(Correlation c) noexcept;

struct ValidationReport {
    std::size_t n = 0;
    std::optional<double> r;
    std::optional<double> r_squared;
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> k;
    std::optional<double> k_prime;
    std::optional<double> ro_squared;
    std::optional<double> ro_prime_squared;
    std::optional<double> rm;
    /// Criterion name -> verdict. An undefined statistic fails its criterion.
    std::map<std::string, bool> criteria;

    bool all_pass() const;
};

/// Computes every statistic and evaluates the acceptance criteria:
///
///   k    = sum(h t) / sum(h^2)          0.85 < k  < 1.15
///   k'   = sum(h t) / sum(t^2)          0.85 < k' < 1.15
///   Ro^2 = 1 - sum(t - k t)^2  / sum(t - mean t)^2      |1 - Ro^2|  < tol
///   Ro'^2= 1 - sum(h - k' h)^2 / sum(h - mean h)^2      |1 - Ro'^2| < tol
///   Rm   = r^2 (1 - sqrt(|r^2 - Ro^2|))                  Rm > 0.5
///
/// Statistics with a zero denominator are left empty.
ValidationReport external_validation(const PairedSeries& s, const ValidationCriteria& criteria = {});

/// One "key = value" line per statistic; undefined values print as "undefined".
std::string to_text(const ValidationReport& report);

}  // namespace gepcc::metrics
