#include "gepcc/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "gepcc/cc_models.hpp"
#include "gepcc/dataset.hpp"
#include "gepcc/error.hpp"
#include "gepcc/evolution.hpp"
#include "gepcc/io.hpp"
#include "gepcc/metrics.hpp"

namespace gepcc::cli {

namespace {

using io::json;

struct GlobalFlags {
    std::optional<std::uint64_t> seed;
    std::string config;
    bool quiet = false;
    bool json = false;
};

struct ModelFlags {
    std::string model_path;
    std::string formula;
    bool eq5 = false;
    std::string ll_units = "fraction";
    std::string log_base = "10";
};

void add_model_flags(CLI::App& cmd, ModelFlags& m) {
    auto* model = cmd.add_option("--model", m.model_path, "Trained model file");
    auto* formula = cmd.add_option("--formula", m.formula, "Formula over LL, PL, e0");
    auto* eq5 = cmd.add_flag("--eq5", m.eq5, "Built-in closed-form Cc equation");
    model->excludes(formula)->excludes(eq5);
    formula->excludes(eq5);
    cmd.add_option("--ll-units", m.ll_units, "Units LL/PL enter the built-in equation")
        ->check(CLI::IsMember({"fraction", "percent"}));
    cmd.add_option("--log-base", m.log_base, "Log base of the built-in equation")->check(CLI::IsMember({"10", "e"}));
}

cc_models::NamedModel resolve_model(const ModelFlags& m) {
    if (!m.model_path.empty()) {
        const auto file = io::load_model(m.model_path);
        return cc_models::make_gep_model(m.model_path, file.linked_model());
    }
    if (!m.formula.empty()) return cc_models::make_formula_model("formula", m.formula);
    if (m.eq5) {
        cc_models::Eq5Options opt;
        opt.units = m.ll_units == "percent" ? cc_models::LlUnits::Percent : cc_models::LlUnits::Fraction;
        opt.log_base = m.log_base == "e" ? cc_models::LogBase::E : cc_models::LogBase::Ten;
        return cc_models::make_eq5_model("eq5", opt);
    }
    throw ConfigError("one of --model, --formula or --eq5 is required");
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
    if (path == "-") {
        out << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path);
    f << content;
    if (!f) throw DataError("failed writing " + path);
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json report_json(const metrics::ValidationReport& r) {
    json j;
    j["n"] = r.n;
    j["r"] = optional_json(r.r);
    j["r_squared"] = optional_json(r.r_squared);
    j["rmse"] = r.rmse;
    j["mae"] = r.mae;
    j["k"] = optional_json(r.k);
    j["k_prime"] = optional_json(r.k_prime);
    j["ro_squared"] = optional_json(r.ro_squared);
    j["ro_prime_squared"] = optional_json(r.ro_prime_squared);
    j["rm"] = optional_json(r.rm);
    j["correlation"] = r.r ? metrics::to_string(metrics::smith_classification(*r.r)) : "undefined";
    j["criteria"] = r.criteria;
    j["all_pass"] = r.all_pass();
    return j;
}

json score_json(const cc_models::ScoreReport& s) {
    json j = report_json(s.report);
    j["n_used"] = s.n_used;
    j["n_excluded"] = s.n_excluded;
    return j;
}

json try_score(const cc_models::NamedModel& model, const dataset::Dataset& data) {
    try {
        return score_json(cc_models::score_model(model, data));
    } catch (const DataError& e) {
        return json{{"error", e.what()}};
    }
}

std::string score_text(const cc_models::ScoreReport& s) {
    return "n_used = " + std::to_string(s.n_used) + "\nn_excluded = " + std::to_string(s.n_excluded) + "\n" +
           metrics::to_text(s.report);
}

void print_warnings(const dataset::Dataset& d, const GlobalFlags& g, std::ostream& err) {
    if (g.quiet) return;
    for (const auto& w : d.warnings) err << "warning: " << d.provenance << ": " << w << '\n';
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// --- train ------------------------------------------------------------------

struct TrainFlags {
    std::string data;
    std::string out;
    std::string history;
    std::string report;
    std::optional<double> split;
    std::optional<std::size_t> population;
    std::optional<std::size_t> generations;
};

int cmd_train(const GlobalFlags& g, const TrainFlags& f, std::ostream& out, std::ostream& err) {
    io::RunConfig cfg = g.config.empty() ? io::RunConfig{} : io::load_run_config(g.config);
    if (!f.data.empty()) cfg.data_path = f.data;
    if (!f.out.empty()) cfg.model_out = f.out;
    if (!f.history.empty()) cfg.history_out = f.history;
    if (!f.report.empty()) cfg.report_out = f.report;
    if (f.split) cfg.split_fraction = *f.split;
    if (f.population) cfg.evolution.population_size = *f.population;
    if (f.generations) cfg.evolution.max_generations = *f.generations;
    if (g.seed) cfg.evolution.seed = *g.seed;
    cfg.evolution.layout.n_variables = dataset::kFeatureNames.size();
    if (cfg.data_path.empty()) throw ConfigError("train: --data is required");
    if (cfg.model_out.empty()) cfg.model_out = "model.json";
    if (cfg.history_out.empty()) cfg.history_out = cfg.model_out == "-" ? "" : cfg.model_out + ".history.csv";
    if (cfg.report_out.empty()) cfg.report_out = cfg.model_out == "-" ? "" : cfg.model_out + ".report.json";
    cfg.evolution.validate();

    const std::string raw = read_file(cfg.data_path);
    const auto data = dataset::parse_csv(raw, cfg.data_path);
    print_warnings(data, g, err);
    if (!data.has_cc()) throw DataError(cfg.data_path + ": training data needs a Cc value on every row");

    const auto [train, valid] = dataset::split_train_validation(data, cfg.split_fraction, cfg.evolution.seed);
    const auto result = evolution::run_evolution(cfg.evolution, dataset::to_samples(train), dataset::to_samples(valid));

    const std::string config_digest = io::sha256_hex(io::resolved_config_text(cfg));
    const std::string data_digest = io::sha256_hex(raw);

    io::ModelFile model;
    model.layout = cfg.evolution.layout;
    model.variables = dataset::kFeatureNames;
    model.chromosome = result.best.chromosome;
    model.coefficients = result.best.model->coefficients;

    const auto named = cc_models::make_gep_model("gep", model.linked_model());
    json metrics_json = {{"train", try_score(named, train)},
                         {"validation", try_score(named, valid)},
                         {"entire", try_score(named, data)}};
    std::size_t fallbacks = 0;
    for (const auto& r : result.history.records) fallbacks += r.uniform_fallback ? 1 : 0;

    model.training = {{"seed", cfg.evolution.seed},
                      {"config_digest", config_digest},
                      {"data_digest", data_digest},
                      {"config", io::resolved_config_json(cfg)},
                      {"n_train", train.size()},
                      {"n_validation", valid.size()},
                      {"generations", result.history.records.size()},
                      {"uniform_selection_fallbacks", fallbacks},
                      {"rank_deficient_link", result.best.model->rank_deficient},
                      {"metrics", metrics_json}};

    write_output(cfg.model_out, io::write_model(model), out);
    const std::string stamp =
        "# seed=" + std::to_string(cfg.evolution.seed) + " config_digest=" + config_digest + "\n";
    if (!cfg.history_out.empty()) write_output(cfg.history_out, stamp + result.history.to_csv(), out);
    if (!cfg.report_out.empty()) {
        json rep = {{"seed", cfg.evolution.seed},
                    {"config_digest", config_digest},
                    {"data_digest", data_digest},
                    {"config", io::resolved_config_json(cfg)},
                    {"metrics", metrics_json}};
        write_output(cfg.report_out, rep.dump(2) + "\n", out);
    }

    if (!g.quiet) {
        err << "equation: Cc = " << result.best.model->equation() << '\n';
        for (const char* set : {"train", "validation", "entire"}) {
            const auto& m = metrics_json[set];
            err << set << ": ";
            if (m.contains("error")) {
                err << m["error"].get<std::string>() << '\n';
                continue;
            }
            err << "R2 = " << m["r_squared"].dump() << ", RMSE = " << m["rmse"].dump() << ", MAE = " << m["mae"].dump()
                << ", n = " << m["n_used"].dump() << '\n';
        }
    }
    return kOk;
}

// --- predict / eval / stats / surface ----------------------------------------

int cmd_predict(const GlobalFlags& g, const ModelFlags& m, const std::string& data_path, const std::string& out_path,
                std::ostream& out, std::ostream& err) {
    const auto model = resolve_model(m);
    const auto data = dataset::load_csv(data_path);
    print_warnings(data, g, err);
    const bool cc = data.has_cc();
    std::string csv = cc ? "LL,PL,e0,Cc,Cc_pred\n" : "LL,PL,e0,Cc_pred\n";
    for (const auto& r : data.records) {
        const double p = model.predict(r);
        csv += expr::format_number(r.ll) + ',' + expr::format_number(r.pl) + ',' + expr::format_number(r.e0) + ',';
        if (cc) csv += expr::format_number(*r.cc) + ',';
        csv += (std::isfinite(p) ? expr::format_number(p) : std::string("NA")) + '\n';
    }
    write_output(out_path, csv, out);
    return kOk;
}

int cmd_eval(const GlobalFlags& g, const ModelFlags& m, const std::string& data_path, std::ostream& out,
             std::ostream& err) {
    const auto model = resolve_model(m);
    const auto data = dataset::load_csv(data_path);
    print_warnings(data, g, err);
    const auto score = cc_models::score_model(model, data);
    if (g.json) {
        json j = score_json(score);
        j["model"] = model.name();
        j["source"] = model.source();
        out << j.dump(2) << '\n';
    } else {
        out << "model = " << model.name() << '\n' << "source = " << model.source() << '\n' << score_text(score);
    }
    return kOk;
}

int cmd_stats(const GlobalFlags& g, const std::string& data_path, std::ostream& out, std::ostream& err) {
    const auto data = dataset::load_csv(data_path);
    print_warnings(data, g, err);
    const auto stats = dataset::summary_stats(data);
    auto num = [](double v) { return std::isfinite(v) ? expr::format_number(v) : std::string("NA"); };
    if (g.json) {
        json cols = json::array();
        for (const auto& c : stats.columns) {
            cols.push_back({{"name", c.name},
                            {"mean", c.mean},
                            {"std_dev", std::isfinite(c.std_dev) ? json(c.std_dev) : json(nullptr)},
                            {"min", c.min},
                            {"max", c.max},
                            {"range", c.range}});
        }
        out << json{{"n", stats.n}, {"columns", cols}}.dump(2) << '\n';
        return kOk;
    }
    out << "column,n,mean,std_dev,min,max,range\n";
    for (const auto& c : stats.columns) {
        out << c.name << ',' << stats.n << ',' << num(c.mean) << ',' << num(c.std_dev) << ',' << num(c.min) << ','
            << num(c.max) << ',' << num(c.range) << '\n';
    }
    return kOk;
}

struct SurfaceFlags {
    double e0 = 0.75;
    std::vector<double> ll_range;
    std::vector<double> pl_range;
    std::size_t steps = 21;
    std::string out = "-";
};

int cmd_surface(const ModelFlags& m, const SurfaceFlags& s, std::ostream& out) {
    const auto model = resolve_model(m);
    const auto rows = cc_models::surface_grid(model, s.e0, {s.ll_range[0], s.ll_range[1]},
                                              {s.pl_range[0], s.pl_range[1]}, s.steps);
    write_output(s.out, cc_models::grid_to_csv(rows), out);
    return kOk;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gene expression programming for compression-index models", "gepcc"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags g;
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Random seed");
    app.add_option("--config", g.config, "Run configuration file");
    app.add_flag("--quiet", g.quiet, "Suppress diagnostics");
    app.add_flag("--json", g.json, "Structured JSON output");

    TrainFlags tf;
    auto* train = app.add_subcommand("train", "Evolve a model and write model, history and report");
    train->add_option("--data", tf.data, "CSV with LL, PL, e0, Cc");
    train->add_option("--out", tf.out, "Model file ('-' for stdout)");
    train->add_option("--history", tf.history, "Per-generation CSV");
    train->add_option("--report", tf.report, "Validation report JSON");
    train->add_option("--split", tf.split, "Training fraction")->check(CLI::Range(0.0, 1.0));
    train->add_option("--population", tf.population, "Population size");
    train->add_option("--generations", tf.generations, "Maximum generations");

    ModelFlags pm;
    std::string p_data, p_out = "-";
    auto* predict = app.add_subcommand("predict", "Append Cc_pred to a data file");
    add_model_flags(*predict, pm);
    predict->add_option("--data", p_data, "CSV with LL, PL, e0")->required();
    predict->add_option("--out", p_out, "Output CSV ('-' for stdout)");

    ModelFlags em;
    std::string e_data;
    auto* eval = app.add_subcommand("eval", "Score a model against measured Cc");
    add_model_flags(*eval, em);
    eval->add_option("--data", e_data, "CSV with LL, PL, e0, Cc")->required();

    std::string s_data;
    auto* stats = app.add_subcommand("stats", "Descriptive statistics per column");
    stats->add_option("--data", s_data, "CSV with LL, PL, e0[, Cc]")->required();

    ModelFlags sm;
    SurfaceFlags sf;
    auto* surface = app.add_subcommand("surface", "Cc over an LL x PL grid at fixed e0");
    add_model_flags(*surface, sm);
    surface->add_option("--e0", sf.e0, "Initial void ratio")->required();
    surface->add_option("--ll-range", sf.ll_range, "LL range: LO HI")->expected(2)->required();
    surface->add_option("--pl-range", sf.pl_range, "PL range: LO HI")->expected(2)->required();
    surface->add_option("--steps", sf.steps, "Points per axis");
    surface->add_option("--out", sf.out, "Output CSV ('-' for stdout)");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }
    if (*seed_opt) g.seed = seed;

    try {
        if (*train) return cmd_train(g, tf, out, err);
        if (*predict) return cmd_predict(g, pm, p_data, p_out, out, err);
        if (*eval) return cmd_eval(g, em, e_data, out, err);
        if (*stats) return cmd_stats(g, s_data, out, err);
        if (*surface) return cmd_surface(sm, sf, out);
    } catch (const NumericError& e) {
        err << "error: " << e.what() << '\n';
        return kNumericError;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
    return kConfigError;
}

}  // namespace gepcc::cli
