#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "gepcc/cc_models.hpp"
#include "gepcc/cli.hpp"
#include "gepcc/dataset.hpp"
#include "gepcc/io.hpp"

namespace fs = std::filesystem;
using namespace gepcc;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("gepcc_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

// Cc linear in LL, so a short run finds it exactly.
std::string linear_fixture(const TempDir& dir) {
    auto d = dataset::synth_generate(dataset::SynthSpec{}, 60, 5);
    for (auto& r : d.records) r.cc = 0.009 * (r.ll - 10.0);
    const std::string path = dir.file("linear.csv");
    std::ofstream(path) << dataset::to_csv(d);
    return path;
}

}  // namespace

TEST_CASE("usage errors exit 1") {
    CHECK(run({}).code == cli::kConfigError);
    CHECK(run({"frobnicate"}).code == cli::kConfigError);
    CHECK(run({"predict", "--data", "x.csv", "--eq5", "--formula", "LL"}).code == cli::kConfigError);
    CHECK(run({"predict", "--data", "x.csv"}).code != cli::kOk);
    CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("train, predict and determinism") {
    TempDir dir;
    const std::string data = linear_fixture(dir);
    const std::string model = dir.file("model.json");
    const auto r = run({"--seed", "3", "--quiet", "train", "--data", data, "--out", model, "--generations", "30"});
    REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
    CHECK(r.err.empty());
    const std::string first = slurp(model);
    const auto doc = io::json::parse(first);
    CHECK(doc["training"]["metrics"]["train"]["r_squared"].get<double>() >= 0.999);
    CHECK(doc["training"]["seed"] == 3);
    CHECK(doc["training"]["n_train"] == 45);
    CHECK(doc["training"]["n_validation"] == 15);
    CHECK(doc["training"]["data_digest"] == io::sha256_hex(slurp(data)));

    const std::string history = slurp(model + ".history.csv");
    CHECK(history.rfind("# seed=3 config_digest=", 0) == 0);
    CHECK(history.find("generation,best_fitness,mean_fitness,best_train_rmse,best_valid_rmse\n") !=
          std::string::npos);
    CHECK(io::json::parse(slurp(model + ".report.json")).contains("metrics"));

    REQUIRE(run({"--seed", "3", "--quiet", "train", "--data", data, "--out", model, "--generations", "30"}).code ==
            cli::kOk);
    CHECK(slurp(model) == first);

    const auto other = run({"--seed", "4", "--quiet", "train", "--data", data, "--out", "-", "--generations", "30"});
    CHECK(other.code == cli::kOk);
    CHECK(io::json::parse(other.out)["training"]["seed"] == 4);

    // Predictions through the saved model equal the training-time model's.
    const auto pred = run({"predict", "--model", model, "--data", data});
    REQUIRE(pred.code == cli::kOk);
    const auto file = io::load_model(model);
    const auto linked = file.linked_model();
    const auto d = dataset::load_csv(data);
    const auto samples = dataset::to_samples(d);
    const auto direct = linked.predict(samples.columns, samples.rows());
    std::istringstream lines(pred.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "LL,PL,e0,Cc,Cc_pred");
    std::size_t i = 0;
    while (std::getline(lines, line)) {
        const std::string last = line.substr(line.rfind(',') + 1);
        CHECK(std::stod(last) == direct[i]);
        ++i;
    }
    CHECK(i == d.size());
}

TEST_CASE("train failures") {
    TempDir dir;
    const auto missing = run({"train", "--data", dir.file("absent.csv")});
    CHECK(missing.code == cli::kDataError);
    CHECK(missing.err.find("absent.csv") != std::string::npos);

    const std::string no_cc = dir.file("no_cc.csv");
    std::ofstream(no_cc) << "LL,PL,e0\n40,20,0.8\n";
    CHECK(run({"train", "--data", no_cc}).code == cli::kDataError);

    const std::string cfg = dir.file("bad.ini");
    std::ofstream(cfg) << "[evolution]\npopulation_size = 1\n";
    CHECK(run({"--config", cfg, "train", "--data", no_cc}).code == cli::kConfigError);
    CHECK(run({"train"}).code == cli::kConfigError);
}

TEST_CASE("config file drives train") {
    TempDir dir;
    const std::string data = linear_fixture(dir);
    const std::string cfg = dir.file("run.ini");
    std::ofstream(cfg) << "[evolution]\npopulation_size = 30\nmax_generations = 5\nseed = 8\n\n[dataset]\npath = "
                       << data << "\n\n[output]\nmodel = " << dir.file("cfg_model.json") << "\n";
    const auto r = run({"--config", cfg, "--quiet", "train"});
    REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
    const auto doc = io::json::parse(slurp(dir.file("cfg_model.json")));
    CHECK(doc["training"]["seed"] == 8);
    CHECK(doc["training"]["config"]["evolution"]["population_size"] == 30);
    CHECK(doc["training"]["generations"].get<int>() <= 5);
}

TEST_CASE("predict with the closed-form model marks domain failures") {
    TempDir dir;
    const std::string data = dir.file("d.csv");
    std::ofstream(data) << "LL,PL,e0\n36.16,22.61,0.75\n10,50,0.1\n";
    const auto r = run({"predict", "--eq5", "--data", data});
    REQUIRE(r.code == cli::kOk);
    CHECK(r.out == "LL,PL,e0,Cc_pred\n36.16,22.61,0.75," +
                       expr::format_number(cc_models::eval_eq5(0.3616, 0.2261, 0.75)) + "\n10,50,0.1,NA\n");

    const std::string big = dir.file("big.csv");
    std::ofstream(big) << dataset::to_csv(dataset::synth_generate(dataset::SynthSpec{}, 108, 1));
    const auto rows = run({"predict", "--formula", "0.009*(LL-10)", "--data", big});
    CHECK(std::count(rows.out.begin(), rows.out.end(), '\n') == 109);

    CHECK(run({"predict", "--formula", "0.009*(wc-10)", "--data", big}).code == cli::kConfigError);
}

TEST_CASE("eval text and json agree") {
    TempDir dir;
    const std::string data = dir.file("d.csv");
    std::ofstream(data) << "LL,PL,e0,Cc\n30,20,0.7,0.1\n40,22,0.8,0.2\n50,25,0.9,0.3\n";
    const auto perfect = run({"eval", "--formula", "0.01*LL - 0.2", "--data", data});
    REQUIRE(perfect.code == cli::kOk);
    CHECK(perfect.out.find("criterion.k = pass") != std::string::npos);
    CHECK(perfect.out.find("criterion.rm = pass") != std::string::npos);

    const auto twice = run({"--json", "eval", "--formula", "2*(0.01*LL - 0.2)", "--data", data});
    REQUIRE(twice.code == cli::kOk);
    const auto j = io::json::parse(twice.out);
    CHECK(j["criteria"]["k"] == false);
    CHECK(j["criteria"]["k_prime"] == false);
    const auto text = run({"eval", "--formula", "2*(0.01*LL - 0.2)", "--data", data});
    CHECK(text.out.find("k = " + expr::format_number(j["k"].get<double>()) + "\n") != std::string::npos);
    CHECK(text.out.find("rmse = " + expr::format_number(j["rmse"].get<double>()) + "\n") != std::string::npos);
}

TEST_CASE("stats") {
    TempDir dir;
    const std::string data = dir.file("d.csv");
    std::ofstream(data) << "LL,PL,e0,Cc\n19.4,14.8,0.51,0.08\n72,44,1.03,0.26\n";
    const auto r = run({"stats", "--data", data});
    REQUIRE(r.code == cli::kOk);
    CHECK(r.out.find("LL,2,45.7,") != std::string::npos);
    CHECK(r.out.find(",19.4,72,52.6\n") != std::string::npos);
    const auto j = io::json::parse(run({"--json", "stats", "--data", data}).out);
    CHECK(j["columns"][0]["range"] == 52.6);

    const std::string empty = dir.file("empty.csv");
    std::ofstream(empty) << "";
    CHECK(run({"stats", "--data", empty}).code == cli::kDataError);
}

TEST_CASE("surface") {
    const auto r = run({"surface", "--eq5", "--e0", "0.75", "--ll-range", "20", "70", "--pl-range", "15", "40",
                        "--steps", "2"});
    REQUIRE(r.code == cli::kOk);
    CHECK(r.out.rfind("LL,PL,Cc\n20,15,", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 5);
    CHECK(run({"surface", "--eq5", "--e0", "0.75", "--ll-range", "20", "70", "--pl-range", "15", "40", "--steps",
               "1"})
              .code == cli::kConfigError);
}
