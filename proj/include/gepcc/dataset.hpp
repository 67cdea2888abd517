#pragma once

// Soil observations (LL, PL, e0, Cc): CSV ingestion, seeded splitting,
// descriptive statistics and a truncated-normal fixture generator.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gepcc/evolution.hpp"

namespace gepcc::dataset {

/// LL and PL in percent, e0 and Cc dimensionless.
struct SoilRecord {
    double ll = 0.0;
    double pl = 0.0;
    double e0 = 0.0;
    std::optional<double> cc;

    friend bool operator==(const SoilRecord&, const SoilRecord&) = default;
};

struct Dataset {
    std::vector<SoilRecord> records;
    std::string provenance;
    /// Soft-check findings, e.g. "row 7: PL exceeds LL".
    std::vector<std::string> warnings;

    std::size_t size() const noexcept { return records.size(); }
    bool has_cc() const noexcept;
};

/// Feature names in column order of to_samples().
inline const std::vector<std::string> kFeatureNames{"LL", "PL", "e0"};

/// Reads a CSV with header columns LL, PL, e0 and optionally Cc (case
/// insensitive, any order, extra columns ignored). Rows are numbered from 1
/// after the header. Throws DataError.
Dataset load_csv(const std::filesystem::path& path);
Dataset parse_csv(const std::string& text, std::string provenance = "<memory>");

/// LL,PL,e0[,Cc] with shortest round-trip numbers.
std::string to_csv(const Dataset& data);

/// Hard invariants (positive LL, PL, e0 and Cc) throw DataError; PL > LL is
/// appended to `warnings`.
void check_record(const SoilRecord& r, std::size_t row, std::vector<std::string>& warnings);

/// Seeded uniform permutation; the first round(n * fraction) rows (half away
/// from zero) train, the rest validate.
std::pair<Dataset, Dataset> split_train_validation(const Dataset& data, double train_fraction, std::uint64_t seed);

struct ColumnStats {
    std::string name;
    double mean = 0.0;
    /// Sample standard deviation (n - 1).
    double std_dev = 0.0;
    double min = 0.0;
    double max = 0.0;
    double range = 0.0;
};

struct SummaryStats {
    std::size_t n = 0;
    std::vector<ColumnStats> columns;
};

/// One entry per column; Cc only when every record carries it.
SummaryStats summary_stats(const Dataset& data);
ColumnStats column_stats(std::string name, const std::vector<double>& values);

/// Training table over LL, PL, e0 with Cc as target. Throws DataError when a
/// record lacks Cc.
evolution::Samples to_samples(const Dataset& data);

struct ColumnSpec {
    double mean;
    double std_dev;
    double min;
    double max;
};

/// Per-column generator spec. Defaults follow a typical fine-grained soil
/// sample set; the Cc maximum (0.26) is min + range.
struct SynthSpec {
    ColumnSpec ll{36.16, 12.79, 19.40, 72.00};
    ColumnSpec pl{22.61, 5.64, 14.80, 44.00};
    ColumnSpec e0{0.75, 0.12, 0.51, 1.03};
    ColumnSpec cc{0.17, 0.05, 0.08, 0.26};
};

/// Draws n records column by column from truncated normals whose location is
/// shifted so the truncated mean equals the requested mean. PL is redrawn
/// until PL <= LL. Deterministic per seed; throws ConfigError on an
/// infeasible spec or n == 0.
Dataset synth_generate(const SynthSpec& spec, std::size_t n, std::uint64_t seed);

}  // namespace gepcc::dataset
