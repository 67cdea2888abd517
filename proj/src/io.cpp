#include "gepcc/io.hpp"

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "gepcc/error.hpp"
#include "gepcc/expr.hpp"

namespace gepcc::io {

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xF];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Run configuration

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* first = value.data();
    const char* last = first + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (value.empty() || ec != std::errc{} || ptr != last) {
        throw ConfigError("config: cannot parse " + key + " = '" + value + "'");
    }
    return out;
}

std::vector<expr::Function> parse_functions(const std::string& value) {
    std::vector<expr::Function> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        const std::string name = b == std::string::npos ? std::string() : item.substr(b, e - b + 1);
        auto f = expr::function_from_name(name);
        if (!f) throw ConfigError("config: unknown function '" + name + "'");
        out.push_back(*f);
    }
    if (out.empty()) throw ConfigError("config: empty function set");
    return out;
}

std::string functions_text(const std::vector<expr::Function>& fs) {
    std::string s;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        if (i) s += ',';
        s += expr::name(fs[i]);
    }
    return s;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

template <typename T, typename Field>
Setter set_number(Field field) {
    return [field](RunConfig& c, const std::string& key, const std::string& value) {
        field(c) = parse_number<T>(key, value);
    };
}

const std::map<std::string, std::map<std::string, Setter>>& setters() {
    using evolution::EvolutionConfig;
    static const std::map<std::string, std::map<std::string, Setter>> table = [] {
        std::map<std::string, std::map<std::string, Setter>> t;
        auto& layout = t["layout"];
        layout["head_size"] = set_number<std::size_t>([](RunConfig& c) -> auto& { return c.evolution.layout.head_size; });
        layout["tail_size"] = set_number<std::size_t>([](RunConfig& c) -> auto& { return c.evolution.layout.tail_size; });
        layout["dc_size"] = set_number<std::size_t>([](RunConfig& c) -> auto& { return c.evolution.layout.dc_size; });
        layout["n_constants"] =
            set_number<std::size_t>([](RunConfig& c) -> auto& { return c.evolution.layout.n_constants; });
        layout["constant_min"] =
            set_number<double>([](RunConfig& c) -> auto& { return c.evolution.layout.constant_min; });
        layout["constant_max"] =
            set_number<double>([](RunConfig& c) -> auto& { return c.evolution.layout.constant_max; });
        layout["functions"] = [](RunConfig& c, const std::string&, const std::string& v) {
            c.evolution.layout.functions = parse_functions(v);
        };

        auto& evo = t["evolution"];
#define GEPCC_EVO_FIELD(type, field) \
    evo[#field] = set_number<type>([](RunConfig& c) -> auto& { return c.evolution.field; })
        GEPCC_EVO_FIELD(std::size_t, population_size);
        GEPCC_EVO_FIELD(std::size_t, max_generations);
        GEPCC_EVO_FIELD(std::size_t, stagnation_window);
        GEPCC_EVO_FIELD(std::size_t, elitism_count);
        GEPCC_EVO_FIELD(std::size_t, n_genes);
        GEPCC_EVO_FIELD(std::uint64_t, seed);
        GEPCC_EVO_FIELD(int, threads);
        GEPCC_EVO_FIELD(double, mutation_rate);
        GEPCC_EVO_FIELD(double, inversion_rate);
        GEPCC_EVO_FIELD(double, is_transposition_rate);
        GEPCC_EVO_FIELD(double, ris_transposition_rate);
        GEPCC_EVO_FIELD(double, gene_transposition_rate);
        GEPCC_EVO_FIELD(double, one_point_recombination_rate);
        GEPCC_EVO_FIELD(double, two_point_recombination_rate);
        GEPCC_EVO_FIELD(double, gene_recombination_rate);
        GEPCC_EVO_FIELD(double, dc_mutation_rate);
        GEPCC_EVO_FIELD(double, constant_mutation_rate);
#undef GEPCC_EVO_FIELD

        auto& data = t["dataset"];
        data["path"] = [](RunConfig& c, const std::string&, const std::string& v) { c.data_path = v; };
        data["split_fraction"] = set_number<double>([](RunConfig& c) -> auto& { return c.split_fraction; });

        auto& out = t["output"];
        out["model"] = [](RunConfig& c, const std::string&, const std::string& v) { c.model_out = v; };
        out["history"] = [](RunConfig& c, const std::string&, const std::string& v) { c.history_out = v; };
        out["report"] = [](RunConfig& c, const std::string&, const std::string& v) { c.report_out = v; };
        return t;
    }();
    return table;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("config: " + std::string(e.what()));
    }

    RunConfig config;
    const auto& table = setters();
    for (const auto& [section, body] : tree) {
        auto sec = table.find(section);
        if (body.empty() || sec == table.end()) throw ConfigError("config: unknown section [" + section + "]");
        for (const auto& [key, value] : body) {
            auto it = sec->second.find(key);
            if (it == sec->second.end()) throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
            it->second(config, key, value.get_value<std::string>());
        }
    }
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

json resolved_config_json(const RunConfig& c) {
    const auto& e = c.evolution;
    const auto& l = e.layout;
    json j;
    j["layout"] = {{"head_size", l.head_size},       {"tail_size", l.tail_size},
                   {"dc_size", l.dc_size},           {"n_constants", l.n_constants},
                   {"constant_min", l.constant_min}, {"constant_max", l.constant_max},
                   {"functions", functions_text(l.functions)}};
    j["evolution"] = {{"population_size", e.population_size},
                      {"max_generations", e.max_generations},
                      {"stagnation_window", e.stagnation_window},
                      {"elitism_count", e.elitism_count},
                      {"n_genes", e.n_genes},
                      {"seed", e.seed},
                      {"mutation_rate", e.mutation_rate},
                      {"inversion_rate", e.inversion_rate},
                      {"is_transposition_rate", e.is_transposition_rate},
                      {"ris_transposition_rate", e.ris_transposition_rate},
                      {"gene_transposition_rate", e.gene_transposition_rate},
                      {"one_point_recombination_rate", e.one_point_recombination_rate},
                      {"two_point_recombination_rate", e.two_point_recombination_rate},
                      {"gene_recombination_rate", e.gene_recombination_rate},
                      {"dc_mutation_rate", e.dc_mutation_rate},
                      {"constant_mutation_rate", e.constant_mutation_rate}};
    j["dataset"] = {{"split_fraction", c.split_fraction}};
    return j;
}

std::string resolved_config_text(const RunConfig& c) {
    const json j = resolved_config_json(c);
    std::string out;
    for (const auto& [section, body] : j.items()) {
        out += "[" + section + "]\n";
        for (const auto& [key, value] : body.items()) {
            std::string v;
            if (value.is_string()) v = value.get<std::string>();
            else if (value.is_number_float()) v = expr::format_number(value.get<double>());
            else v = value.dump();
            out += key + " = " + v + "\n";
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Model file

evolution::LinkedModel ModelFile::linked_model() const {
    evolution::LinkedModel m;
    m.variables = variables;
    m.coefficients = coefficients;
    for (const auto& g : chromosome.genes) m.gene_trees.push_back(karva::decode_gene(g, layout));
    return m;
}

std::string write_model(const ModelFile& model) {
    const auto& l = model.layout;
    json doc;
    doc["format"] = "gepcc-model";
    doc["version"] = kModelFormatVersion;
    doc["variables"] = model.variables;
    json fns = json::array();
    for (auto f : l.functions) fns.push_back(std::string(expr::name(f)));
    doc["layout"] = {{"head_size", l.head_size},       {"tail_size", l.tail_size},
                     {"dc_size", l.dc_size},           {"n_constants", l.n_constants},
                     {"constant_min", l.constant_min}, {"constant_max", l.constant_max},
                     {"functions", fns}};
    json genes = json::array();
    for (const auto& g : model.chromosome.genes) {
        genes.push_back({{"symbols", karva::symbols_string(g, l, model.variables)},
                         {"k_expression", karva::k_expression(g, l, model.variables)},
                         {"dc_indices", g.dc},
                         {"constants", g.constants},
                         {"expression", expr::render_infix(karva::decode_gene(g, l), model.variables)}});
    }
    doc["genes"] = genes;
    doc["coefficients"] = model.coefficients;
    doc["equation"] = model.linked_model().equation();
    doc["training"] = model.training;
    return doc.dump(2) + "\n";
}

ModelFile read_model(const std::string& text) {
    ModelFile m;
    try {
        const json doc = json::parse(text);
        if (doc.at("format").get<std::string>() != "gepcc-model") throw DataError("not a gepcc model file");
        const int version = doc.at("version").get<int>();
        if (version != kModelFormatVersion) throw DataError("unsupported model version " + std::to_string(version));
        m.variables = doc.at("variables").get<std::vector<std::string>>();
        const auto& l = doc.at("layout");
        m.layout.head_size = l.at("head_size").get<std::size_t>();
        m.layout.tail_size = l.at("tail_size").get<std::size_t>();
        m.layout.dc_size = l.at("dc_size").get<std::size_t>();
        m.layout.n_constants = l.at("n_constants").get<std::size_t>();
        m.layout.constant_min = l.at("constant_min").get<double>();
        m.layout.constant_max = l.at("constant_max").get<double>();
        m.layout.n_variables = m.variables.size();
        m.layout.functions.clear();
        for (const auto& f : l.at("functions")) {
            auto fn = expr::function_from_name(f.get<std::string>());
            if (!fn) throw DataError("model file: unknown function " + f.get<std::string>());
            m.layout.functions.push_back(*fn);
        }
        try {
            m.layout.validate();
        } catch (const ConfigError& e) {
            throw DataError(std::string("model file: ") + e.what());
        }
        for (const auto& g : doc.at("genes")) {
            karva::Gene gene;
            gene.symbols = karva::parse_symbols(g.at("symbols").get<std::string>(), m.layout, m.variables);
            gene.dc = g.at("dc_indices").get<std::vector<std::uint16_t>>();
            gene.constants = g.at("constants").get<std::vector<double>>();
            m.chromosome.genes.push_back(std::move(gene));
        }
        m.coefficients = doc.at("coefficients").get<std::vector<double>>();
        if (doc.contains("training")) m.training = doc.at("training");
    } catch (const json::exception& e) {
        throw DataError(std::string("model file: ") + e.what());
    }
    if (auto v = karva::validate_chromosome(m.chromosome, m.layout, m.chromosome.genes.size())) {
        throw DataError("model file: " + karva::to_string(*v));
    }
    if (m.chromosome.genes.empty() || m.coefficients.size() != m.chromosome.genes.size() + 1) {
        throw DataError("model file: expected one coefficient per gene plus an intercept");
    }
    return m;
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_model(buf.str());
}

}  // namespace gepcc::io
