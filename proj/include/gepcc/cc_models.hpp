#pragma once

// Named compression-index predictors Cc = f(LL, PL, e0): the built-in
// closed-form equation, user formulas, and trained GEP models.

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gepcc/dataset.hpp"
#include "gepcc/evolution.hpp"
#include "gepcc/metrics.hpp"

namespace gepcc::cc_models {

enum class LlUnits { Fraction, Percent };
enum class LogBase { Ten, E };

struct Eq5Options {
    /// How stored LL/PL (percent) enter the formula. Fraction divides by 100.
    LlUnits units = LlUnits::Fraction;
    LogBase log_base = LogBase::Ten;
};

/// Cc = e0 + [(e0 + 2 LL) / (e0 - 6.87)] * [-0.35 + LL^2]
///         + [log(2 e0 + 2 LL - 2 PL + 0.15)]^2
///
/// evaluated on the arguments exactly as given. Non-finite at e0 = 6.87 and
/// where the log argument is not positive.
double eval_eq5(double ll, double pl, double e0, LogBase base = LogBase::Ten) noexcept;

enum class ModelKind { BuiltinEq5, ParsedFormula, GepLinked };

const char* to_string(ModelKind kind) noexcept;

class NamedModel {
public:
    using Predictor = std::function<double(double ll, double pl, double e0)>;

    NamedModel(std::string name, ModelKind kind, std::string source, Predictor predictor);

    const std::string& name() const noexcept { return name_; }
    ModelKind kind() const noexcept { return kind_; }
    /// Formula text, builtin tag, or closed-form GEP equation.
    const std::string& source() const noexcept { return source_; }

    /// Inputs in dataset units (LL and PL in percent).
    double predict(double ll, double pl, double e0) const { return predictor_(ll, pl, e0); }
    double predict(const dataset::SoilRecord& r) const { return predictor_(r.ll, r.pl, r.e0); }

private:
    std::string name_;
    ModelKind kind_;
    std::string source_;
    Predictor predictor_;
};

NamedModel make_eq5_model(std::string name, Eq5Options options = {});
/// Formulas may use LL, PL and e0 only. Throws ParseError/UnknownIdentifierError.
NamedModel make_formula_model(std::string name, const std::string& formula);
/// The model's variables must be a subset of {LL, PL, e0}; throws DataError.
NamedModel make_gep_model(std::string name, evolution::LinkedModel model);

class ModelRegistry {
public:
    /// Throws ConfigError on a duplicate name.
    const NamedModel& add(NamedModel model);
    const NamedModel& register_model(const std::string& name, ModelKind kind, const std::string& source);
    const NamedModel& get(const std::string& name) const;
    bool contains(const std::string& name) const { return models_.count(name) > 0; }
    std::vector<std::string> names() const;

private:
    std::map<std::string, NamedModel> models_;
};

struct ScoreReport {
    metrics::ValidationReport report;
    std::size_t n_used = 0;
    std::size_t n_excluded = 0;
};

/// Predicts every row, drops non-finite predictions (counted), and scores the
/// rest. Throws DataError if a row lacks Cc or every row is excluded.
ScoreReport score_model(const NamedModel& model, const dataset::Dataset& data,
                        const metrics::ValidationCriteria& criteria = {});

struct Range {
    double lo;
    double hi;
};

struct GridRow {
    double ll;
    double pl;
    double cc;
};

/// steps x steps lattice, LL-major then PL. End points are hit exactly.
/// Throws ConfigError for steps < 2 or an inverted range.
std::vector<GridRow> surface_grid(const NamedModel& model, double e0, Range ll, Range pl, std::size_t steps);

/// Header "LL,PL,Cc"; non-finite cells are written as NA.
std::string grid_to_csv(const std::vector<GridRow>& rows);

}  // namespace gepcc::cc_models
