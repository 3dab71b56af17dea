#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "ppf/dataset.hpp"
#include "ppf/matpower.hpp"
#include "ppf/ybus.hpp"

using namespace ppf;

namespace {

NetworkCase load_case30() {
    std::ifstream f(std::string(PPF_DATA_DIR) + "/case30.m");
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_case(ss.str());
}

SamplingConfig small_config() {
    SamplingConfig cfg;
    cfg.load_std_fraction = 0.05;
    cfg.seed = 11;
    cfg.sample_count = 60;
    cfg.split = {40, 10, 10};
    cfg.pv_buses = {7, 21};
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("dataset rows satisfy nodal balance when pushed back through the network") {
    NetworkCase c = load_case30();
    AdmittanceMatrix y = build_ybus(c);
    Dataset ds = build_dataset(c, small_config(), {1e-10, 20}, 1);
    REQUIRE(ds.n() == 60);
    CHECK(ds.rejected_count == 0);

    const double slack_ang = c.buses()[c.slack()].v_ang_init;
    for (int r = 0; r < ds.n(); r += 7) {
        PfState s;
        s.v_mag.resize(c.n_buses());
        s.v_ang.resize(c.n_buses());
        s.v_ang(c.slack()) = slack_ang;
        s.v_mag(c.slack()) = c.held_voltage(c.slack());
        const auto& order = c.angle_order();
        for (std::size_t k = 0; k < order.size(); ++k)
            s.v_ang(order[k]) = ds.angles(r, static_cast<Eigen::Index>(k)) + slack_ang;
        for (int i : c.pv_buses()) s.v_mag(i) = c.held_voltage(i);
        const auto& pq = c.pq_buses();
        for (std::size_t k = 0; k < pq.size(); ++k)
            s.v_mag(pq[k]) = ds.magnitudes(r, static_cast<Eigen::Index>(k));

        Vec x_back = injections_from_state(c, y, s);
        CHECK((x_back - ds.inputs.row(r).transpose()).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("datasets are identical regardless of worker count") {
    NetworkCase c = load_case30();
    Dataset a = build_dataset(c, small_config(), {}, 1);
    Dataset b = build_dataset(c, small_config(), {}, 4);
    CHECK((a.inputs.array() == b.inputs.array()).all());
    CHECK((a.angles.array() == b.angles.array()).all());
    CHECK((a.magnitudes.array() == b.magnitudes.array()).all());
}

TEST_CASE("per-bus magnitude stds are strictly positive on the fixture config") {
    NetworkCase c = load_case30();
    SamplingConfig cfg = small_config();
    cfg.sample_count = 200;
    cfg.split = {150, 25, 25};
    Dataset ds = build_dataset(c, cfg, {}, 2);
    CHECK(ds.rejected_count == 0);
    const Mat m = ds.train_magnitudes();
    const double n = static_cast<double>(m.rows());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double mu = m.col(j).mean();
        const double sd = std::sqrt((m.col(j).array() - mu).square().sum() / (n - 1));
        CHECK(sd > 0.0);
    }
}

TEST_CASE("undersized sample budget is a config error") {
    NetworkCase c = load_case30();
    SamplingConfig cfg = small_config();
    cfg.sample_count = 10;
    CHECK_THROWS_AS(build_dataset(c, cfg), ConfigError);
}

TEST_CASE("save then load round-trips bytes and values") {
    NetworkCase c = load_case30();
    Dataset ds = build_dataset(c, small_config(), {}, 2);
    const std::string path = "dataset_roundtrip_test.csv";
    save_dataset(ds, c, path);
    Dataset back = load_dataset(path, c);
    CHECK((back.inputs.array() == ds.inputs.array()).all());
    CHECK((back.angles.array() == ds.angles.array()).all());
    CHECK((back.magnitudes.array() == ds.magnitudes.array()).all());
    CHECK(back.split == ds.split);
    CHECK(back.rejected_count == ds.rejected_count);

    const std::string first = slurp(path);
    save_dataset(back, c, path);
    CHECK(slurp(path) == first);  // load-then-save is byte stable

    std::remove(path.c_str());
    std::remove((path + ".meta.json").c_str());
}

TEST_CASE("empty dataset persists as header only") {
    NetworkCase c = load_case30();
    Dataset ds;
    ds.inputs.resize(0, 53);
    ds.angles.resize(0, 29);
    ds.magnitudes.resize(0, 24);
    const std::string path = "dataset_empty_test.csv";
    save_dataset(ds, c, path);
    Dataset back = load_dataset(path, c);
    CHECK(back.n() == 0);
    std::remove(path.c_str());
    std::remove((path + ".meta.json").c_str());
}

TEST_CASE("column mismatch with metadata is a format error") {
    NetworkCase c = load_case30();
    Dataset ds = build_dataset(c, small_config(), {}, 2);
    const std::string path = "dataset_badmeta_test.csv";
    save_dataset(ds, c, path);

    // corrupt the metadata column count
    nlohmann::json meta = nlohmann::json::parse(slurp(path + ".meta.json"));
    meta["columns"] = 9;
    std::ofstream(path + ".meta.json") << meta.dump(2);
    CHECK_THROWS_AS(load_dataset(path, c), FormatError);
    std::remove(path.c_str());
    std::remove((path + ".meta.json").c_str());
}

TEST_CASE("rejections above five percent raise a dataset error") {
    NetworkCase c = load_case30();
    SamplingConfig cfg = small_config();
    // grotesque variation: most samples will fail to converge
    cfg.load_std_fraction = 40.0;
    cfg.pv_buses.clear();
    cfg.sample_count = 40;
    cfg.split = {20, 10, 10};
    CHECK_THROWS_AS(build_dataset(c, cfg, {1e-8, 6}), DatasetError);
}
