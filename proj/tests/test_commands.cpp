#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "ppf/commands.hpp"
#include "ppf/config.hpp"

using namespace ppf;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// tiny end-to-end config on IEEE-30
nlohmann::json small_config(const std::string& out) {
    nlohmann::json j;
    j["case"] = std::string(PPF_DATA_DIR) + "/case30.m";
    j["out"] = out;
    j["seed"] = 5;
    j["threads"] = 2;
    j["sampling"] = {{"sample_count", 120},      {"split", {80, 20, 20}},
                     {"load_std_fraction", 0.05}, {"pv_buses", {7, 21}},
                     {"corr_p", 0.2},            {"corr_q", 0.8}};
    nlohmann::json spec{{"hidden", {8}}, {"learning_rate", 1e-3},
                        {"epochs", 3},   {"batch_size", 32},
                        {"patience", 3}};
    j["training"] = {{"M2", spec},
                     {"M3", {{"angle", spec}, {"magnitude", spec}}},
                     {"M4", {{"gamma", 1e-3}, {"alpha", 1.0}}}};
    j["sweep"] = {{"gammas", {1e-4, 1e-3}}, {"alphas", {0.1, 1.0}}, {"epochs", 2}};
    return j;
}

std::string write_config(const nlohmann::json& j, const std::string& name) {
    std::ofstream f(name);
    f << j.dump(2);
    return name;
}

}  // namespace

TEST_CASE("gen-data is deterministic and refuses stale training") {
    const std::string out = "cmd_test_run";
    fs::remove_all(out);
    auto cfg_path = write_config(small_config(out), "cmd_test_cfg.json");

    cmd::Options opt;
    opt.config_path = cfg_path;
    REQUIRE(cmd::gen_data(opt) == cmd::kExitOk);
    const std::string first = slurp(fs::path(out) / "dataset.csv");

    REQUIRE(cmd::gen_data(opt) == cmd::kExitOk);
    CHECK(slurp(fs::path(out) / "dataset.csv") == first);

    // train all methods once
    opt.methods = {"M1", "M2", "M3", "M4"};
    REQUIRE(cmd::train(opt) == cmd::kExitOk);
    CHECK(fs::exists(fs::path(out) / "bundles/M4/manifest.json"));
    CHECK(fs::exists(fs::path(out) / "bundles/M2/loss_history_stacked_net.csv"));

    // retraining without --force refuses
    CHECK(cmd::train(opt) == cmd::kExitUsage);
    opt.force = true;
    CHECK(cmd::train(opt) == cmd::kExitOk);
    opt.force = false;

    // eval produces the reports
    REQUIRE(cmd::eval(opt) == cmd::kExitOk);
    CHECK(fs::exists(fs::path(out) / "reports/metrics.csv"));
    CHECK(fs::exists(fs::path(out) / "reports/metrics.txt"));
    CHECK(fs::exists(fs::path(out) / "reports/w1_p_flow_M4.csv"));
    CHECK(cmd::report(opt) == cmd::kExitOk);

    // metrics.csv carries the schema row and all methods
    const std::string csv = slurp(fs::path(out) / "reports/metrics.csv");
    CHECK(csv.find("quantity,method,rmse,awd,e1,e2") != std::string::npos);
    for (const char* q : {"angle", "angle_diff", "magnitude", "p_flow", "q_flow"})
        for (const char* m : {"M1", "M2", "M3", "M4"}) {
            CAPTURE(q);
            CAPTURE(m);
            CHECK(csv.find(std::string(q) + "," + m + ",") != std::string::npos);
        }

    // a changed seed invalidates the stored dataset
    cmd::Options stale = opt;
    stale.seed = 6;
    CHECK(cmd::train(stale) == cmd::kExitUsage);

    fs::remove_all(out);
    fs::remove(cfg_path);
}

TEST_CASE("the fixture config reproduces its frozen dataset hash") {
    const std::string out = "cmd_hash_run";
    fs::remove_all(out);
    cmd::Options opt;
    opt.config_path = std::string(PPF_CONFIG_DIR) + "/case30_small.json";
    opt.out = out;
    REQUIRE(cmd::gen_data(opt) == cmd::kExitOk);
    // recorded on the first accepted run of configs/case30_small.json
    CHECK(fingerprint(slurp(fs::path(out) / "dataset.csv")) == "cb848deed7c7bae4");
    fs::remove_all(out);
}

TEST_CASE("sweep writes both grids") {
    const std::string out = "cmd_sweep_run";
    fs::remove_all(out);
    auto cfg_path = write_config(small_config(out), "cmd_sweep_cfg.json");
    cmd::Options opt;
    opt.config_path = cfg_path;
    REQUIRE(cmd::gen_data(opt) == cmd::kExitOk);
    REQUIRE(cmd::sweep(opt) == cmd::kExitOk);
    CHECK(fs::exists(fs::path(out) / "reports/sweep_gamma.csv"));
    CHECK(fs::exists(fs::path(out) / "reports/sweep_alpha.csv"));
    fs::remove_all(out);
    fs::remove(cfg_path);
}

TEST_CASE("missing case file exits with the usage code and names the path") {
    nlohmann::json j = small_config("cmd_missing_run");
    j["case"] = "no/such/case.m";
    auto cfg_path = write_config(j, "cmd_missing_cfg.json");
    cmd::Options opt;
    opt.config_path = cfg_path;
    CHECK(cmd::gen_data(opt) == cmd::kExitUsage);
    fs::remove(cfg_path);
}

TEST_CASE("missing config exits with the usage code") {
    cmd::Options opt;
    opt.config_path = "nonexistent_config.json";
    CHECK(cmd::gen_data(opt) == cmd::kExitUsage);
}

TEST_CASE("invalid method ids exit with the usage code") {
    auto cfg_path = write_config(small_config("cmd_badmethod_run"), "cmd_bad_cfg.json");
    cmd::Options opt;
    opt.config_path = cfg_path;
    opt.methods = {"M7"};
    CHECK(cmd::train(opt) == cmd::kExitUsage);
    fs::remove(cfg_path);
}

TEST_CASE("eval without a bundle names the missing method") {
    const std::string out = "cmd_nobundle_run";
    fs::remove_all(out);
    auto cfg_path = write_config(small_config(out), "cmd_nobundle_cfg.json");
    cmd::Options opt;
    opt.config_path = cfg_path;
    REQUIRE(cmd::gen_data(opt) == cmd::kExitOk);
    opt.methods = {"M1"};
    CHECK(cmd::eval(opt) == cmd::kExitRuntime);
    fs::remove_all(out);
    fs::remove(cfg_path);
}
