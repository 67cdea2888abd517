#include "gepcc/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "gepcc/error.hpp"
#include "gepcc/expr.hpp"

namespace gepcc::dataset {

bool Dataset::has_cc() const noexcept {
    return !records.empty() && std::all_of(records.begin(), records.end(), [](const auto& r) { return r.cc.has_value(); });
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == line.npos ? line.npos : comma - start)));
        if (comma == line.npos) break;
        start = comma + 1;
    }
    return cells;
}

double parse_cell(std::string_view cell, std::size_t row, const char* column) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = first + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (cell.empty() || ec != std::errc{} || ptr != last) {
        throw DataError("row " + std::to_string(row) + ": cannot parse " + column + " value '" + std::string(cell) + "'");
    }
    return v;
}

}  // namespace

void check_record(const SoilRecord& r, std::size_t row, std::vector<std::string>& warnings) {
    auto positive = [&](double v, const char* column) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DataError("row " + std::to_string(row) + ": " + column + " must be positive and finite, got " +
                            expr::format_number(v));
        }
    };
    positive(r.ll, "LL");
    positive(r.pl, "PL");
    positive(r.e0, "e0");
    if (r.cc) positive(*r.cc, "Cc");
    if (r.pl > r.ll) warnings.push_back("row " + std::to_string(row) + ": PL exceeds LL");
}

Dataset parse_csv(const std::string& text, std::string provenance) {
    Dataset data;
    data.provenance = std::move(provenance);

    std::istringstream in(text);
    std::string line;
    std::optional<std::size_t> col_ll, col_pl, col_e0, col_cc;
    std::size_t n_header = 0;
    bool have_header = false;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        std::string_view view = trim(line);
        if (view.empty()) continue;
        if (!have_header) {
            if (view.size() >= 3 && static_cast<unsigned char>(view[0]) == 0xEF) view.remove_prefix(3);  // BOM
            const auto cells = split_cells(view);
            n_header = cells.size();
            for (std::size_t i = 0; i < cells.size(); ++i) {
                const std::string name = lower(cells[i]);
                if (name == "ll") col_ll = i;
                else if (name == "pl") col_pl = i;
                else if (name == "e0") col_e0 = i;
                else if (name == "cc") col_cc = i;
            }
            if (!col_ll) throw DataError(data.provenance + ": missing column LL");
            if (!col_pl) throw DataError(data.provenance + ": missing column PL");
            if (!col_e0) throw DataError(data.provenance + ": missing column e0");
            have_header = true;
            continue;
        }
        ++row;
        const auto cells = split_cells(view);
        if (cells.size() != n_header) {
            throw DataError("row " + std::to_string(row) + ": expected " + std::to_string(n_header) + " cells, got " +
                            std::to_string(cells.size()));
        }
        SoilRecord r;
        r.ll = parse_cell(cells[*col_ll], row, "LL");
        r.pl = parse_cell(cells[*col_pl], row, "PL");
        r.e0 = parse_cell(cells[*col_e0], row, "e0");
        if (col_cc && !cells[*col_cc].empty()) r.cc = parse_cell(cells[*col_cc], row, "Cc");
        check_record(r, row, data.warnings);
        data.records.push_back(r);
    }
    if (!have_header) throw DataError(data.provenance + ": empty file");
    if (data.records.empty()) throw DataError(data.provenance + ": no data rows");
    return data;
}

Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), path.string());
}

std::string to_csv(const Dataset& data) {
    const bool cc = data.has_cc();
    std::string out = cc ? "LL,PL,e0,Cc\n" : "LL,PL,e0\n";
    for (const auto& r : data.records) {
        out += expr::format_number(r.ll) + ',' + expr::format_number(r.pl) + ',' + expr::format_number(r.e0);
        if (cc) out += ',' + expr::format_number(*r.cc);
        out += '\n';
    }
    return out;
}

std::pair<Dataset, Dataset> split_train_validation(const Dataset& data, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train fraction must lie in (0, 1)");
    const std::size_t n = data.size();
    const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_fraction));
    if (n < 2 || n_train == 0 || n_train == n) {
        throw DataError("degenerate split: " + std::to_string(n) + " rows at fraction " +
                        expr::format_number(train_fraction));
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::pair<Dataset, Dataset> parts;
    parts.first.provenance = data.provenance + " [train]";
    parts.second.provenance = data.provenance + " [validation]";
    for (std::size_t i = 0; i < n; ++i) {
        (i < n_train ? parts.first : parts.second).records.push_back(data.records[order[i]]);
    }
    return parts;
}

ColumnStats column_stats(std::string name, const std::vector<double>& values) {
    ColumnStats s;
    s.name = std::move(name);
    if (values.empty()) return s;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.min = *lo;
    s.max = *hi;
    s.range = s.max - s.min;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = std::clamp(sum / static_cast<double>(values.size()), s.min, s.max);
    if (values.size() < 2) {
        s.std_dev = expr::kNonFinite;
        return s;
    }
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_dev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    return s;
}

SummaryStats summary_stats(const Dataset& data) {
    if (data.records.empty()) throw DataError("summary of an empty dataset");
    SummaryStats out;
    out.n = data.size();
    std::vector<double> ll, pl, e0, cc;
    for (const auto& r : data.records) {
        ll.push_back(r.ll);
        pl.push_back(r.pl);
        e0.push_back(r.e0);
        if (r.cc) cc.push_back(*r.cc);
    }
    out.columns.push_back(column_stats("LL", ll));
    out.columns.push_back(column_stats("PL", pl));
    out.columns.push_back(column_stats("e0", e0));
    if (data.has_cc()) out.columns.push_back(column_stats("Cc", cc));
    return out;
}

evolution::Samples to_samples(const Dataset& data) {
    evolution::Samples s;
    s.variables = kFeatureNames;
    s.columns.assign(3, {});
    for (auto& c : s.columns) c.reserve(data.size());
    s.targets.reserve(data.size());
    std::size_t row = 0;
    for (const auto& r : data.records) {
        ++row;
        if (!r.cc) throw DataError("row " + std::to_string(row) + ": missing Cc");
        s.columns[0].push_back(r.ll);
        s.columns[1].push_back(r.pl);
        s.columns[2].push_back(r.e0);
        s.targets.push_back(*r.cc);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Synthetic fixtures

namespace {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Mean of N(mu, sigma^2) restricted to [a, b].
double truncated_mean(double mu, double sigma, double a, double b) {
    const double alpha = (a - mu) / sigma;
    const double beta = (b - mu) / sigma;
    const double mass = normal_cdf(beta) - normal_cdf(alpha);
    return mu + sigma * (normal_pdf(alpha) - normal_pdf(beta)) / mass;
}

class TruncatedNormal {
public:
    TruncatedNormal(const ColumnSpec& c, const char* column) : spec_(c) {
        if (!(c.min < c.max) && !(c.min == c.max && c.std_dev == 0.0)) {
            throw ConfigError(std::string("synth: ") + column + " bounds are inverted");
        }
        if (!(c.min > 0.0)) throw ConfigError(std::string("synth: ") + column + " lower bound must be positive");
        if (!(c.mean >= c.min && c.mean <= c.max)) {
            throw ConfigError(std::string("synth: ") + column + " mean lies outside its bounds");
        }
        if (!(c.std_dev >= 0.0)) throw ConfigError(std::string("synth: ") + column + " std_dev must be >= 0");
        if (c.std_dev == 0.0) {
            location_ = c.mean;
            return;
        }
        if (!(c.mean > c.min && c.mean < c.max)) {
            throw ConfigError(std::string("synth: ") + column + " mean must lie strictly inside its bounds");
        }
        // The truncated mean increases with the location; bisect for it.
        double lo = c.min - 6.0 * c.std_dev;
        double hi = c.max + 6.0 * c.std_dev;
        if (truncated_mean(lo, c.std_dev, c.min, c.max) > c.mean ||
            truncated_mean(hi, c.std_dev, c.min, c.max) < c.mean) {
            throw ConfigError(std::string("synth: ") + column + " mean unreachable with this std_dev and bounds");
        }
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (truncated_mean(mid, c.std_dev, c.min, c.max) < c.mean ? lo : hi) = mid;
        }
        location_ = 0.5 * (lo + hi);
    }

    double draw(std::mt19937_64& rng, double upper) const {
        if (spec_.std_dev == 0.0) return location_;
        std::normal_distribution<double> normal(location_, spec_.std_dev);
        const double hi = std::min(upper, spec_.max);
        for (int attempt = 0; attempt < 1'000'000; ++attempt) {
            const double v = normal(rng);
            if (v >= spec_.min && v <= hi) return v;
        }
        throw ConfigError("synth: rejection sampling did not converge");
    }

private:
    ColumnSpec spec_;
    double location_ = 0.0;
};

}  // namespace

Dataset synth_generate(const SynthSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ConfigError("synth: n must be positive");
    if (spec.pl.min > spec.ll.min) throw ConfigError("synth: PL lower bound exceeds LL lower bound");
    const TruncatedNormal ll(spec.ll, "LL");
    const TruncatedNormal pl(spec.pl, "PL");
    const TruncatedNormal e0(spec.e0, "e0");
    const TruncatedNormal cc(spec.cc, "Cc");

    Dataset data;
    data.provenance = "synthetic(n=" + std::to_string(n) + ", seed=" + std::to_string(seed) + ")";
    data.records.reserve(n);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        SoilRecord r;
        r.ll = ll.draw(rng, spec.ll.max);
        r.pl = pl.draw(rng, r.ll);
        r.e0 = e0.draw(rng, spec.e0.max);
        r.cc = cc.draw(rng, spec.cc.max);
        data.records.push_back(r);
    }
    return data;
}

}  // namespace gepcc::dataset
