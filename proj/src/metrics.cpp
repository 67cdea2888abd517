#include "gepcc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gepcc/error.hpp"
#include "gepcc/expr.hpp"

namespace gepcc::metrics {

PairedSeries::PairedSeries(std::vector<double> measured, std::vector<double> predicted)
    : measured_(std::move(measured)), predicted_(std::move(predicted)) {
    if (measured_.empty()) throw DataError("paired series is empty");
    if (measured_.size() != predicted_.size()) {
        throw DataError("paired series length mismatch: " + std::to_string(measured_.size()) + " measured vs " +
                        std::to_string(predicted_.size()) + " predicted");
    }
    for (std::size_t i = 0; i < measured_.size(); ++i) {
        if (!std::isfinite(measured_[i]) || !std::isfinite(predicted_[i])) {
            throw DataError("paired series has a non-finite value at index " + std::to_string(i));
        }
    }
}

namespace {

double mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Exact test; a rounded mean makes the sum of squares of a constant column
// slightly positive.
bool is_constant(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

double sum_sq_dev(std::span<const double> v, double m) {
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s;
}

}  // namespace

std::optional<double> pearson_r(const PairedSeries& s) {
    const auto h = s.measured();
    const auto t = s.predicted();
    if (s.size() < 2 || is_constant(h) || is_constant(t)) return std::nullopt;
    const double hm = mean(h);
    const double tm = mean(t);
    double cov = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) cov += (h[i] - hm) * (t[i] - tm);
    const double shh = sum_sq_dev(h, hm);
    const double stt = sum_sq_dev(t, tm);
    if (shh == 0.0 || stt == 0.0) return std::nullopt;
    const double r = cov / std::sqrt(shh * stt);
    return std::clamp(r, -1.0, 1.0);
}

std::optional<double> r_squared(const PairedSeries& s) {
    auto r = pearson_r(s);
    if (!r) return std::nullopt;
    return *r * *r;
}

double rmse(std::span<const double> measured, std::span<const double> predicted) {
    double s = 0.0;
    for (std::size_t i = 0; i < measured.size(); ++i) {
        const double d = measured[i] - predicted[i];
        s += d * d;
    }
    return std::isfinite(s) ? std::sqrt(s / static_cast<double>(measured.size())) : expr::kNonFinite;
}

double rmse(const PairedSeries& s) { return rmse(s.measured(), s.predicted()); }

double mae(const PairedSeries& s) {
    const auto h = s.measured();
    const auto t = s.predicted();
    double sum = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) sum += std::abs(h[i] - t[i]);
    return sum / static_cast<double>(h.size());
}

Correlation smith_classification(double r) noexcept {
    return std::abs(r) > 0.8 ? Correlation::Strong : Correlation::Weak;
}

const char* to_string(Correlation c) noexcept { return c == Correlation::Strong ? "strong" : "weak"; }

bool ValidationReport::all_pass() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const auto& kv) { return kv.second; });
}

ValidationReport external_validation(const PairedSeries& s, const ValidationCriteria& c) {
    ValidationReport rep;
    rep.n = s.size();
    rep.r = pearson_r(s);
    rep.r_squared = r_squared(s);
    rep.rmse = rmse(s);
    rep.mae = mae(s);

    const auto h = s.measured();
    const auto t = s.predicted();
    double sht = 0.0, shh = 0.0, stt = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        sht += h[i] * t[i];
        shh += h[i] * h[i];
        stt += t[i] * t[i];
    }
    if (shh != 0.0) rep.k = sht / shh;
    if (stt != 0.0) rep.k_prime = sht / stt;

    const double tvar = sum_sq_dev(t, mean(t));
    const double hvar = sum_sq_dev(h, mean(h));
    if (rep.k && !is_constant(t)) {
        double num = 0.0;
        for (double ti : t) {
            const double d = ti - *rep.k * ti;
            num += d * d;
        }
        rep.ro_squared = 1.0 - num / tvar;
    }
    if (rep.k_prime && !is_constant(h)) {
        double num = 0.0;
        for (double hi : h) {
            const double d = hi - *rep.k_prime * hi;
            num += d * d;
        }
        rep.ro_prime_squared = 1.0 - num / hvar;
    }
    if (rep.r_squared && rep.ro_squared) {
        rep.rm = *rep.r_squared * (1.0 - std::sqrt(std::abs(*rep.r_squared - *rep.ro_squared)));
    }

    auto within = [](const std::optional<double>& v, double lo, double hi) { return v && *v > lo && *v < hi; };
    auto near_one = [&](const std::optional<double>& v) { return v && std::abs(1.0 - *v) < c.ro_tolerance; };
    rep.criteria["k"] = within(rep.k, c.k_low, c.k_high);
    rep.criteria["k_prime"] = within(rep.k_prime, c.k_low, c.k_high);
    rep.criteria["rm"] = rep.rm && *rep.rm > c.rm_min;
    rep.criteria["ro_squared"] = near_one(rep.ro_squared);
    rep.criteria["ro_prime_squared"] = near_one(rep.ro_prime_squared);
    return rep;
}

std::string to_text(const ValidationReport& rep) {
    std::ostringstream os;
    auto line = [&](const char* key, const std::optional<double>& v) {
        os << key << " = " << (v ? expr::format_number(*v) : std::string("undefined")) << '\n';
    };
    os << "n = " << rep.n << '\n';
    line("r", rep.r);
    line("r_squared", rep.r_squared);
    line("rmse", rep.rmse);
    line("mae", rep.mae);
    line("k", rep.k);
    line("k_prime", rep.k_prime);
    line("ro_squared", rep.ro_squared);
    line("ro_prime_squared", rep.ro_prime_squared);
    line("rm", rep.rm);
    os << "correlation = " << (rep.r ? to_string(smith_classification(*rep.r)) : "undefined") << '\n';
    for (const auto& [name, ok] : rep.criteria) os << "criterion." << name << " = " << (ok ? "pass" : "fail") << '\n';
    return os.str();
}

}  // namespace gepcc::metrics
