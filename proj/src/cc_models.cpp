#include "gepcc/cc_models.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "gepcc/error.hpp"
#include "gepcc/expr.hpp"

namespace gepcc::cc_models {

double eval_eq5(double ll, double pl, double e0, LogBase base) noexcept {
    const double ratio = expr::apply(expr::Function::Div, e0 + 2.0 * ll, e0 - 6.87);
    const double quad = -0.35 + ll * ll;
    const double arg = 2.0 * e0 + 2.0 * ll - 2.0 * pl + 0.15;
    const double lg = expr::apply(base == LogBase::Ten ? expr::Function::Log10 : expr::Function::Ln, arg);
    return e0 + ratio * quad + lg * lg;
}

const char* to_string(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::BuiltinEq5: return "builtin_eq5";
        case ModelKind::ParsedFormula: return "parsed_formula";
        case ModelKind::GepLinked: return "gep_linked";
    }
    return "unknown";
}

NamedModel::NamedModel(std::string name, ModelKind kind, std::string source, Predictor predictor)
    : name_(std::move(name)), kind_(kind), source_(std::move(source)), predictor_(std::move(predictor)) {}

NamedModel make_eq5_model(std::string name, Eq5Options options) {
    const double scale = options.units == LlUnits::Fraction ? 0.01 : 1.0;
    std::string source = std::string("eq5(units=") + (options.units == LlUnits::Fraction ? "fraction" : "percent") +
                         ", log=" + (options.log_base == LogBase::Ten ? "10" : "e") + ")";
    return NamedModel(std::move(name), ModelKind::BuiltinEq5, std::move(source),
                      [scale, base = options.log_base](double ll, double pl, double e0) {
                          return eval_eq5(ll * scale, pl * scale, e0, base);
                      });
}

NamedModel make_formula_model(std::string name, const std::string& formula) {
    auto tree = expr::parse_formula(formula, dataset::kFeatureNames);
    return NamedModel(std::move(name), ModelKind::ParsedFormula, formula,
                      [tree = std::move(tree)](double ll, double pl, double e0) {
                          const std::array<double, 3> b{ll, pl, e0};
                          return expr::eval(tree, b);
                      });
}

NamedModel make_gep_model(std::string name, evolution::LinkedModel model) {
    // Map the model's variable order onto (LL, PL, e0).
    std::vector<std::size_t> slot;
    for (const auto& v : model.variables) {
        auto it = std::find(dataset::kFeatureNames.begin(), dataset::kFeatureNames.end(), v);
        if (it == dataset::kFeatureNames.end()) throw DataError("model variable '" + v + "' is not one of LL, PL, e0");
        slot.push_back(static_cast<std::size_t>(it - dataset::kFeatureNames.begin()));
    }
    std::string source = model.equation();
    return NamedModel(std::move(name), ModelKind::GepLinked, std::move(source),
                      [m = std::move(model), slot = std::move(slot)](double ll, double pl, double e0) {
                          const std::array<double, 3> in{ll, pl, e0};
                          std::vector<double> b(slot.size());
                          for (std::size_t i = 0; i < slot.size(); ++i) b[i] = in[slot[i]];
                          return m.predict(b);
                      });
}

const NamedModel& ModelRegistry::add(NamedModel model) {
    const std::string key = model.name();
    auto [it, inserted] = models_.emplace(key, std::move(model));
    if (!inserted) throw ConfigError("model '" + key + "' is already registered");
    return it->second;
}

const NamedModel& ModelRegistry::register_model(const std::string& name, ModelKind kind, const std::string& source) {
    if (contains(name)) throw ConfigError("model '" + name + "' is already registered");
    switch (kind) {
        case ModelKind::BuiltinEq5: return add(make_eq5_model(name));
        case ModelKind::ParsedFormula: return add(make_formula_model(name, source));
        case ModelKind::GepLinked: break;
    }
    throw ConfigError("register GEP models with add(make_gep_model(...))");
}

const NamedModel& ModelRegistry::get(const std::string& name) const {
    auto it = models_.find(name);
    if (it == models_.end()) throw ConfigError("unknown model '" + name + "'");
    return it->second;
}

std::vector<std::string> ModelRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& kv : models_) out.push_back(kv.first);
    return out;
}

ScoreReport score_model(const NamedModel& model, const dataset::Dataset& data,
                        const metrics::ValidationCriteria& criteria) {
    std::vector<double> measured, predicted;
    ScoreReport out;
    std::size_t row = 0;
    for (const auto& r : data.records) {
        ++row;
        if (!r.cc) throw DataError("row " + std::to_string(row) + ": missing measured Cc");
        const double p = model.predict(r);
        if (!std::isfinite(p)) {
            ++out.n_excluded;
            continue;
        }
        measured.push_back(*r.cc);
        predicted.push_back(p);
    }
    if (measured.empty()) throw DataError("model '" + model.name() + "' produced no finite prediction");
    out.n_used = measured.size();
    out.report = metrics::external_validation(metrics::PairedSeries(std::move(measured), std::move(predicted)), criteria);
    return out;
}

std::vector<GridRow> surface_grid(const NamedModel& model, double e0, Range ll, Range pl, std::size_t steps) {
    if (steps < 2) throw ConfigError("surface grid needs steps >= 2");
    if (!(ll.lo <= ll.hi) || !(pl.lo <= pl.hi)) throw ConfigError("surface grid range is inverted");
    auto at = [steps](Range r, std::size_t i) {
        if (i + 1 == steps) return r.hi;
        return r.lo + (r.hi - r.lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
    };
    std::vector<GridRow> rows;
    rows.reserve(steps * steps);
    for (std::size_t i = 0; i < steps; ++i) {
        const double x = at(ll, i);
        for (std::size_t j = 0; j < steps; ++j) {
            const double y = at(pl, j);
            rows.push_back({x, y, model.predict(x, y, e0)});
        }
    }
    return rows;
}

std::string grid_to_csv(const std::vector<GridRow>& rows) {
    std::string out = "LL,PL,Cc\n";
    for (const auto& r : rows) {
        out += expr::format_number(r.ll) + ',' + expr::format_number(r.pl) + ',' +
               (std::isfinite(r.cc) ? expr::format_number(r.cc) : std::string("NA")) + '\n';
    }
    return out;
}

}  // namespace gepcc::cc_models
