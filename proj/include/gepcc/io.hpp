#pragma once

// On-disk formats: the INI-style run configuration and the JSON model file.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gepcc/evolution.hpp"
#include "gepcc/karva.hpp"
#include "json.hpp"

namespace gepcc::io {

using nlohmann::json;

/// Hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// Everything `train` needs. Sections and keys:
///
///   [layout]     head_size tail_size dc_size n_constants constant_min
///                constant_max functions (comma separated names)
///   [evolution]  population_size max_generations stagnation_window
///                elitism_count n_genes seed threads and every *_rate
///   [dataset]    path split_fraction
///   [output]     model history report
///
/// Unknown sections or keys are errors.
struct RunConfig {
    evolution::EvolutionConfig evolution;
    std::string data_path;
    double split_fraction = 0.75;
    std::string model_out;
    std::string history_out;
    std::string report_out;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical text of every setting that affects results (output paths and
/// thread count excluded), in the same INI syntax.
std::string resolved_config_text(const RunConfig& config);
json resolved_config_json(const RunConfig& config);

inline constexpr int kModelFormatVersion = 1;

struct ModelFile {
    karva::GeneLayout layout;
    std::vector<std::string> variables;
    karva::Chromosome chromosome;
    std::vector<double> coefficients;
    /// seed, config digest, data digest, resolved config, metrics.
    json training = json::object();

    evolution::LinkedModel linked_model() const;
};

/// Versioned JSON document. Genes carry the full symbol string (dot
/// separated), the expressed k-expression, Dc indices, constants and the
/// decoded infix form; numbers round-trip exactly.
std::string write_model(const ModelFile& model);

/// Throws DataError on malformed or invalid content.
ModelFile read_model(const std::string& text);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace gepcc::io
