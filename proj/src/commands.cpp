#include "ppf/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ppf/config.hpp"
#include "ppf/dataset.hpp"
#include "ppf/incidence.hpp"
#include "ppf/matpower.hpp"
#include "ppf/metrics.hpp"
#include "ppf/pipeline.hpp"

namespace ppf::cmd {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int guarded(const char* what, const std::function<void()>& body) {
    try {
        body();
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << what << ": " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << what << ": " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << what << ": " << e.what() << "\n";
        return kExitRuntime;
    }
}

RunConfig load_config(const Options& opt) {
    ConfigOverrides ov;
    ov.seed = opt.seed;
    ov.out_dir = opt.out;
    return RunConfig::load(opt.config_path, ov);
}

void write_text(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write " + p.string());
    f << text;
}

std::string dataset_path(const RunConfig& cfg) {
    return (fs::path(cfg.out_dir) / "dataset.csv").string();
}

Dataset load_checked_dataset(const RunConfig& cfg, const NetworkCase& c) {
    const std::string path = dataset_path(cfg);
    std::ifstream mf(path + ".meta.json");
    if (!mf)
        throw ConfigError("no dataset at " + path + "; run gen-data first");
    json meta = json::parse(mf);
    if (meta.value("data_fingerprint", "") != cfg.data_fingerprint())
        throw ConfigError("dataset at " + path +
                          " was generated from a different config or seed; "
                          "re-run gen-data");
    return load_dataset(path, c);
}

void validate_methods(const std::vector<std::string>& methods) {
    for (const auto& m : methods)
        if (m != "M1" && m != "M2" && m != "M3" && m != "M4")
            throw ConfigError("invalid method id '" + m +
                              "'; choose from M1, M2, M3, M4");
}

std::vector<std::string> branch_labels(const NetworkCase& c) {
    std::vector<std::string> labels;
    int k = 0;
    for (std::size_t i = 0; i < c.branches().size(); ++i) {
        if (!c.branches()[i].in_service) continue;
        const Branch& br = c.branches()[i];
        labels.push_back("branch" + std::to_string(k++) + ":" +
                         std::to_string(br.from_bus) + "-" + std::to_string(br.to_bus));
    }
    return labels;
}

std::vector<std::string> angle_labels(const NetworkCase& c) {
    std::vector<std::string> labels;
    for (int i : c.angle_order())
        labels.push_back("theta:" + std::to_string(c.buses()[i].id));
    return labels;
}

std::vector<std::string> magnitude_labels(const NetworkCase& c) {
    std::vector<std::string> labels;
    for (int i : c.pq_buses())
        labels.push_back("vm:" + std::to_string(c.buses()[i].id));
    return labels;
}

std::string history_csv(const TrainResult& h) {
    std::ostringstream os;
    os << "epoch,train_loss,val_loss\n";
    char buf[80];
    for (std::size_t e = 0; e < h.train_loss.size(); ++e) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", e, h.train_loss[e],
                      h.val_loss[e]);
        os << buf;
    }
    return os.str();
}

}  // namespace

int gen_data(const Options& opt) {
    return guarded("gen-data", [&]() {
        const RunConfig cfg = load_config(opt);
        const NetworkCase c = parse_case(cfg.case_text);
        const auto t0 = std::chrono::steady_clock::now();
        Dataset ds = build_dataset(c, cfg.sampling, cfg.solver, cfg.threads);
        const auto dt = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0).count();

        json extra{{"data_fingerprint", cfg.data_fingerprint()},
                   {"seed", cfg.seed},
                   {"case", cfg.case_path},
                   {"sampling", json::parse(cfg.sampling_json)}};
        fs::create_directories(cfg.out_dir);
        save_dataset(ds, c, dataset_path(cfg), extra.dump());

        std::cout << "dataset: " << ds.n() << " rows (" << ds.rejected_count
                  << " rejected) in " << dataset_path(cfg) << "  [" << dt << " s]\n";
        const Mat train_m = ds.train_magnitudes();
        if (train_m.rows() >= 2) {
            BusSplit s = split_buses(train_m, 0.0);
            std::cout << "per-bus voltage magnitude std (training block):\n";
            const auto labels = magnitude_labels(c);
            for (Eigen::Index j = 0; j < s.per_bus_std.size(); ++j)
                std::printf("  %-10s %.3e\n", labels[static_cast<std::size_t>(j)].c_str(),
                            s.per_bus_std(j));
        }
    });
}

int train(const Options& opt) {
    return guarded("train", [&]() {
        validate_methods(opt.methods);
        const RunConfig cfg = load_config(opt);
        const NetworkCase c = parse_case(cfg.case_text);
        const Dataset ds = load_checked_dataset(cfg, c);

        for (const std::string& method : opt.methods) {
            const fs::path dir = fs::path(cfg.out_dir) / "bundles" / method;
            if (fs::exists(dir / "manifest.json") && !opt.force)
                throw ConfigError("bundle already exists at " + dir.string() +
                                  "; pass --force to retrain");
            const auto t0 = std::chrono::steady_clock::now();
            MethodBundle b = train_method(method, c, ds, cfg.method_configs(method));
            b.data_fingerprint = cfg.data_fingerprint();
            b.config_fingerprint = cfg.train_fingerprint(method);
            save_bundle(b, dir.string());
            for (const auto& [name, hist] : b.histories)
                write_text(dir / ("loss_history_" + name + ".csv"), history_csv(hist));
            const auto dt = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0).count();
            std::cout << "trained " << method << " -> " << dir.string() << "  [" << dt
                      << " s]\n";
        }
    });
}

int eval(const Options& opt) {
    return guarded("eval", [&]() {
        validate_methods(opt.methods);
        const RunConfig cfg = load_config(opt);
        const NetworkCase c = parse_case(cfg.case_text);
        const Dataset ds = load_checked_dataset(cfg, c);
        const Mat a_inc = build_reduced_incidence(c);

        const Mat x_test = ds.test_inputs();
        const Mat true_angles = ds.test_angles();
        const Mat true_mags = ds.test_magnitudes();
        const StateEstimates true_states = assemble_states(c, true_angles, true_mags);
        const FlowSet true_flows = estimate_branch_flows(c, true_states);
        const Mat true_diffs = true_angles * a_inc.transpose();

        EvalReport rep;
        rep.quantities = cfg.eval_quantities;
        for (const std::string& method : opt.methods) {
            const fs::path dir = fs::path(cfg.out_dir) / "bundles" / method;
            if (!fs::exists(dir / "manifest.json"))
                throw Error("missing bundle for " + method + " at " + dir.string());
            MethodBundle b = load_bundle(dir.string());
            if (b.data_fingerprint != cfg.data_fingerprint())
                throw ConfigError("bundle " + method +
                                  " was trained on a different dataset; retrain");
            rep.methods.push_back(method);

            const auto t0 = std::chrono::steady_clock::now();
            const Mat est_angles = predict_angles(b, x_test);
            const Mat est_mags = predict_magnitudes(b, x_test);
            const StateEstimates est_states = assemble_states(c, est_angles, est_mags);
            const FlowSet est_flows = estimate_branch_flows(c, est_states);
            const Mat est_diffs = est_angles * a_inc.transpose();
            const auto dt = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0).count();
            std::cout << method << " inference over " << x_test.rows() << " samples: "
                      << dt << " s\n";

            auto add = [&](const std::string& q, const Mat& est, const Mat& truth,
                           const std::vector<std::string>& labels) {
                if (std::find(rep.quantities.begin(), rep.quantities.end(), q) ==
                    rep.quantities.end())
                    return;
                rep.rows[q][method] = evaluate_pair(est, truth);
                AwdResult w = awd(est, truth);
                rep.per_response_wd[q][method] = w.per_response;
                write_text(fs::path(cfg.out_dir) / "reports" /
                               ("w1_" + q + "_" + method + ".csv"),
                           "# config_fingerprint=" + cfg.data_fingerprint() + "\n" +
                               per_response_csv(w.per_response, labels));
            };
            add("angle", est_angles, true_angles, angle_labels(c));
            add("angle_diff", est_diffs, true_diffs, branch_labels(c));
            add("magnitude", est_mags, true_mags, magnitude_labels(c));
            add("p_flow", est_flows.p_from, true_flows.p_from, branch_labels(c));
            add("q_flow", est_flows.q_from, true_flows.q_from, branch_labels(c));
        }

        write_text(fs::path(cfg.out_dir) / "reports" / "metrics.csv",
                   "# config_fingerprint=" + cfg.data_fingerprint() + "\n" +
                       report_to_csv(rep));
        write_text(fs::path(cfg.out_dir) / "reports" / "metrics.txt", report_to_text(rep));
        std::cout << report_to_text(rep);
    });
}

int sweep(const Options& opt) {
    return guarded("sweep", [&]() {
        const RunConfig cfg = load_config(opt);
        const NetworkCase c = parse_case(cfg.case_text);
        const Dataset ds = load_checked_dataset(cfg, c);

        MethodConfigs mc = cfg.method_configs("M4");
        mc.angle.epochs = cfg.sweep_epochs;
        mc.magnitude.epochs = cfg.sweep_epochs;

        GammaSweepResult gs = tune_gamma(cfg.sweep_gammas, ds, mc);
        std::ostringstream gcsv;
        gcsv << "# config_fingerprint=" << cfg.data_fingerprint() << "\n";
        gcsv << "gamma,val_magnitude_rmse\n";
        for (auto [g, r] : gs.candidates) gcsv << g << "," << r << "\n";
        write_text(fs::path(cfg.out_dir) / "reports" / "sweep_gamma.csv", gcsv.str());
        std::cout << "gamma sweep winner: " << gs.gamma << "\n";

        mc.gamma = gs.gamma;
        AlphaSweepResult as = tune_alpha(cfg.sweep_alphas, c, ds, mc);
        std::ostringstream acsv;
        acsv << "# config_fingerprint=" << cfg.data_fingerprint() << "\n";
        acsv << "alpha,val_flow_rmse\n";
        for (auto [a, r] : as.candidates) acsv << a << "," << r << "\n";
        write_text(fs::path(cfg.out_dir) / "reports" / "sweep_alpha.csv", acsv.str());
        std::cout << "alpha sweep winner: " << as.alpha << "\n";
    });
}

int report(const Options& opt) {
    return guarded("report", [&]() {
        const RunConfig cfg = load_config(opt);
        const fs::path path = fs::path(cfg.out_dir) / "reports" / "metrics.txt";
        std::ifstream f(path);
        if (!f)
            throw ConfigError("no report at " + path.string() + "; run eval first");
        std::cout << f.rdbuf();
    });
}

}  // namespace ppf::cmd
