#include "ppf/dataset.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "ppf/ybus.hpp"

namespace ppf {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int worker_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PPF_LAB_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

}  // namespace

std::vector<std::string> dataset_columns(const NetworkCase& c) {
    std::vector<std::string> cols;
    for (int i : c.pv_buses()) cols.push_back("p_g:" + std::to_string(c.buses()[i].id));
    for (int i : c.pq_buses()) cols.push_back("p_l:" + std::to_string(c.buses()[i].id));
    for (int i : c.pq_buses()) cols.push_back("q_l:" + std::to_string(c.buses()[i].id));
    for (int i : c.angle_order())
        cols.push_back("theta:" + std::to_string(c.buses()[i].id));
    for (int i : c.pq_buses()) cols.push_back("vm:" + std::to_string(c.buses()[i].id));
    return cols;
}

Dataset build_dataset(const NetworkCase& c, const SamplingConfig& cfg,
                      const PfOptions& solver_opts, int threads) {
    const int total = cfg.split[0] + cfg.split[1] + cfg.split[2];
    if (cfg.sample_count < total)
        throw ConfigError("sample_count " + std::to_string(cfg.sample_count) +
                          " is below the requested split total " + std::to_string(total));

    const AdmittanceMatrix y = build_ybus(c);
    const Sampler sampler(c, cfg);
    const int n_samples = cfg.sample_count;
    const int dx = sampler.dim();
    const int na = c.n_buses() - 1;
    const int nl = static_cast<int>(c.pq_buses().size());

    Mat xs(n_samples, dx), as(n_samples, na), ms(n_samples, nl);
    std::vector<char> ok(n_samples, 0);

    auto run_range = [&](int begin, int end) {
        for (int k = begin; k < end; ++k) {
            Vec x = sampler.sample(k);
            PfSolution sol = solve_pf(c, y, x, solver_opts);
            if (!sol.converged) continue;
            ok[k] = 1;
            xs.row(k) = x.transpose();
            int col = 0;
            for (int i : c.angle_order())
                as(k, col++) = sol.state.v_ang(i) - sol.state.v_ang(c.slack());
            col = 0;
            for (int i : c.pq_buses()) ms(k, col++) = sol.state.v_mag(i);
        }
    };

    const int nthreads = std::min(worker_count(threads), n_samples > 0 ? n_samples : 1);
    if (nthreads <= 1) {
        run_range(0, n_samples);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        const int chunk = 64;
        for (int t = 0; t < nthreads; ++t) {
            pool.emplace_back([&]() {
                for (;;) {
                    int begin = next.fetch_add(chunk);
                    if (begin >= n_samples) return;
                    run_range(begin, std::min(begin + chunk, n_samples));
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    int accepted = 0;
    for (char f : ok) accepted += f;
    const int rejected = n_samples - accepted;
    if (rejected > 0.05 * n_samples)
        throw DatasetError("rejection rate " + std::to_string(rejected) + "/" +
                           std::to_string(n_samples) +
                           " exceeds 5%; the sampling config looks ill-posed");
    if (accepted < total)
        throw DatasetError("only " + std::to_string(accepted) +
                           " converged samples for a split of " + std::to_string(total));

    Dataset ds;
    ds.inputs.resize(total, dx);
    ds.angles.resize(total, na);
    ds.magnitudes.resize(total, nl);
    ds.split = cfg.split;
    ds.rejected_count = rejected;
    int row = 0;
    for (int k = 0; k < n_samples && row < total; ++k) {
        if (!ok[k]) continue;
        ds.inputs.row(row) = xs.row(k);
        ds.angles.row(row) = as.row(k);
        ds.magnitudes.row(row) = ms.row(k);
        ++row;
    }
    return ds;
}

void save_dataset(const Dataset& ds, const NetworkCase& c, const std::string& path,
                  const std::string& meta_extra_json) {
    const auto cols = dataset_columns(c);
    const int dx = static_cast<int>(ds.inputs.cols());
    const int na = static_cast<int>(ds.angles.cols());
    const int nl = static_cast<int>(ds.magnitudes.cols());
    if (static_cast<int>(cols.size()) != dx + na + nl)
        throw FormatError("dataset width does not match the case");

    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write dataset file: " + path);
    for (std::size_t i = 0; i < cols.size(); ++i)
        f << cols[i] << (i + 1 < cols.size() ? "," : "\n");
    for (int r = 0; r < ds.n(); ++r) {
        for (int j = 0; j < dx; ++j) f << fmt17(ds.inputs(r, j)) << ",";
        for (int j = 0; j < na; ++j) f << fmt17(ds.angles(r, j)) << ",";
        for (int j = 0; j < nl; ++j)
            f << fmt17(ds.magnitudes(r, j)) << (j + 1 < nl ? "," : "\n");
    }
    f.close();

    json meta = json::parse(meta_extra_json);
    meta["columns"] = cols.size();
    meta["rows"] = ds.n();
    meta["split"] = ds.split;
    meta["rejected_count"] = ds.rejected_count;
    meta["input_width"] = dx;
    meta["angle_width"] = na;
    meta["magnitude_width"] = nl;
    std::ofstream mf(path + ".meta.json");
    if (!mf) throw ConfigError("cannot write dataset metadata: " + path + ".meta.json");
    mf << meta.dump(2) << "\n";
}

Dataset load_dataset(const std::string& path, const NetworkCase& c) {
    std::ifstream mf(path + ".meta.json");
    if (!mf) throw FormatError("missing dataset metadata: " + path + ".meta.json");
    json meta = json::parse(mf);

    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open dataset file: " + path);
    std::string header;
    if (!std::getline(f, header)) throw FormatError("dataset file is empty: " + path);

    const auto expect_cols = dataset_columns(c);
    std::vector<std::string> cols;
    {
        std::stringstream hs(header);
        std::string cell;
        while (std::getline(hs, cell, ',')) cols.push_back(cell);
    }
    if (cols.size() != meta.at("columns").get<std::size_t>())
        throw FormatError("dataset column count disagrees with its metadata");
    if (cols != expect_cols)
        throw FormatError("dataset columns do not match the requested case");

    const int dx = meta.at("input_width").get<int>();
    const int na = meta.at("angle_width").get<int>();
    const int nl = meta.at("magnitude_width").get<int>();
    const int rows = meta.at("rows").get<int>();

    Dataset ds;
    ds.inputs.resize(rows, dx);
    ds.angles.resize(rows, na);
    ds.magnitudes.resize(rows, nl);
    auto split = meta.at("split").get<std::vector<int>>();
    if (split.size() != 3) throw FormatError("dataset metadata split must have 3 sizes");
    ds.split = {split[0], split[1], split[2]};
    ds.rejected_count = meta.at("rejected_count").get<int>();
    if (ds.split[0] + ds.split[1] + ds.split[2] != rows)
        throw FormatError("dataset metadata split sizes do not sum to the row count");

    std::string line;
    int r = 0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (r >= rows) throw FormatError("dataset has more rows than its metadata");
        std::stringstream ls(line);
        std::string cell;
        int j = 0;
        while (std::getline(ls, cell, ',')) {
            if (j >= dx + na + nl)
                throw FormatError("row " + std::to_string(r + 2) + " has extra columns");
            double v = std::stod(cell);
            if (j < dx)
                ds.inputs(r, j) = v;
            else if (j < dx + na)
                ds.angles(r, j - dx) = v;
            else
                ds.magnitudes(r, j - dx - na) = v;
            ++j;
        }
        if (j != dx + na + nl)
            throw FormatError("row " + std::to_string(r + 2) + " has " +
                              std::to_string(j) + " columns, expected " +
                              std::to_string(dx + na + nl));
        ++r;
    }
    if (r != rows) throw FormatError("dataset has fewer rows than its metadata");
    return ds;
}

}  // namespace ppf
