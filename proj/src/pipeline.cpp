#include "ppf/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ppf/incidence.hpp"
#include "ppf/metrics.hpp"

namespace ppf {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

TrainConfig make_train_config(const MlpSpec& spec, std::uint64_t run_seed,
                              const std::string& tag) {
    TrainConfig t;
    t.learning_rate = spec.learning_rate;
    t.batch_size = spec.batch_size;
    t.epochs = spec.epochs;
    t.early_stop_patience = spec.patience;
    t.shuffle_seed = rng::mix(run_seed, rng::hash_str(tag));
    return t;
}

std::vector<int> mlp_dims(int d_in, const MlpSpec& spec, int d_out) {
    std::vector<int> dims{d_in};
    dims.insert(dims.end(), spec.hidden.begin(), spec.hidden.end());
    dims.push_back(d_out);
    return dims;
}

MlpModel fresh_net(int d_in, const MlpSpec& spec, int d_out, std::uint64_t run_seed,
                   const std::string& tag) {
    rng::Engine eng(rng::mix(run_seed, rng::hash_str(tag)));
    return make_mlp(mlp_dims(d_in, spec, d_out), eng);
}

Mat select_columns(const Mat& m, const std::vector<int>& cols) {
    Mat out(m.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = m.col(cols[j]);
    return out;
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p);
    if (!f) throw FormatError("missing bundle component: " + p.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write " + p.string());
    f << text;
}

// Trains the M4 magnitude side for a given split: a network over the
// big-variation columns, least squares over the small ones.
void train_split_magnitudes(MethodBundle& b, const Dataset& ds, const MethodConfigs& cfg,
                            const BusSplit& split) {
    b.split = split;
    if (!split.big_std.empty()) {
        Mat y_tr = select_columns(ds.train_magnitudes(), split.big_std);
        Mat y_val = select_columns(ds.val_magnitudes(), split.big_std);
        MlpModel net = fresh_net(static_cast<int>(ds.inputs.cols()), cfg.magnitude,
                                 static_cast<int>(split.big_std.size()), cfg.run_seed,
                                 "magnitude");
        TrainConfig t = make_train_config(cfg.magnitude, cfg.run_seed, "magnitude");
        t.standardized_loss = true;  // pure regression task, unit-variance targets
        TrainResult hist = train_mlp(net, ds.train_inputs(), y_tr, ds.val_inputs(), y_val, t);
        b.magnitude_net = std::move(net);
        b.histories.emplace_back("magnitude_net", std::move(hist));
    }
    if (!split.small_std.empty()) {
        Mat y_tr = select_columns(ds.train_magnitudes(), split.small_std);
        b.magnitude_linear = fit_ols(ds.train_inputs(), y_tr);
    }
}

}  // namespace

BusSplit split_buses(const Mat& train_magnitudes, double gamma) {
    if (gamma < 0.0) throw ConfigError("split threshold gamma must be non-negative");
    if (train_magnitudes.rows() < 2)
        throw ContractError("bus split needs at least two samples");
    const double n = static_cast<double>(train_magnitudes.rows());
    BusSplit s;
    s.gamma = gamma;
    s.per_bus_std.resize(train_magnitudes.cols());
    for (Eigen::Index j = 0; j < train_magnitudes.cols(); ++j) {
        const double mu = train_magnitudes.col(j).mean();
        s.per_bus_std(j) =
            std::sqrt((train_magnitudes.col(j).array() - mu).square().sum() / (n - 1.0));
        if (s.per_bus_std(j) <= gamma)
            s.small_std.push_back(static_cast<int>(j));
        else
            s.big_std.push_back(static_cast<int>(j));
    }
    return s;
}

MethodBundle train_method(const std::string& method_id, const NetworkCase& c,
                          const Dataset& ds, const MethodConfigs& cfg) {
    if (ds.train_size() <= 0 || ds.val_size() <= 0)
        throw ContractError("dataset split has no training or validation rows");

    MethodBundle b;
    b.method_id = method_id;
    b.run_seed = cfg.run_seed;
    b.n_angles = static_cast<int>(ds.angles.cols());
    b.n_magnitudes = static_cast<int>(ds.magnitudes.cols());

    const int dx = static_cast<int>(ds.inputs.cols());
    Mat stacked_tr(ds.train_size(), b.n_angles + b.n_magnitudes);
    stacked_tr << ds.train_angles(), ds.train_magnitudes();

    if (method_id == "M1") {
        b.stacked_linear = fit_ols(ds.train_inputs(), stacked_tr);
    } else if (method_id == "M2") {
        Mat stacked_val(ds.val_size(), b.n_angles + b.n_magnitudes);
        stacked_val << ds.val_angles(), ds.val_magnitudes();
        MlpModel net = fresh_net(dx, cfg.stacked, b.n_angles + b.n_magnitudes,
                                 cfg.run_seed, "stacked");
        TrainConfig t = make_train_config(cfg.stacked, cfg.run_seed, "stacked");
        t.standardized_loss = true;  // single-net baseline trains on normalized outputs
        TrainResult hist =
            train_mlp(net, ds.train_inputs(), stacked_tr, ds.val_inputs(), stacked_val, t);
        b.stacked_net = std::move(net);
        b.histories.emplace_back("stacked_net", std::move(hist));
    } else if (method_id == "M3" || method_id == "M4") {
        MlpModel angle_net = fresh_net(dx, cfg.angle, b.n_angles, cfg.run_seed, "angle");
        TrainConfig t = make_train_config(cfg.angle, cfg.run_seed, "angle");
        if (method_id == "M4") {
            b.alpha = cfg.alpha;
            t.alpha = cfg.alpha;
            t.incidence = build_reduced_incidence(c);
        }
        TrainResult hist = train_mlp(angle_net, ds.train_inputs(), ds.train_angles(),
                                     ds.val_inputs(), ds.val_angles(), t);
        b.angle_net = std::move(angle_net);
        b.histories.emplace_back("angle_net", std::move(hist));

        if (method_id == "M3") {
            MlpModel mag_net =
                fresh_net(dx, cfg.magnitude, b.n_magnitudes, cfg.run_seed, "magnitude");
            TrainConfig tm = make_train_config(cfg.magnitude, cfg.run_seed, "magnitude");
            tm.standardized_loss = true;
            TrainResult mh = train_mlp(mag_net, ds.train_inputs(), ds.train_magnitudes(),
                                       ds.val_inputs(), ds.val_magnitudes(), tm);
            b.magnitude_net = std::move(mag_net);
            b.histories.emplace_back("magnitude_net", std::move(mh));
        } else {
            b.gamma = cfg.gamma;
            train_split_magnitudes(b, ds, cfg, split_buses(ds.train_magnitudes(), cfg.gamma));
        }
    } else {
        throw ConfigError("unknown method id '" + method_id +
                          "'; expected one of M1, M2, M3, M4");
    }
    return b;
}

Mat predict_angles(const MethodBundle& b, const Mat& inputs) {
    if (b.stacked_linear) return b.stacked_linear->predict(inputs).leftCols(b.n_angles);
    if (b.stacked_net) return mlp_forward(*b.stacked_net, inputs).leftCols(b.n_angles);
    if (b.angle_net) return mlp_forward(*b.angle_net, inputs);
    throw ContractError("bundle has no angle component");
}

Mat predict_magnitudes(const MethodBundle& b, const Mat& inputs) {
    if (b.stacked_linear)
        return b.stacked_linear->predict(inputs).rightCols(b.n_magnitudes);
    if (b.stacked_net) return mlp_forward(*b.stacked_net, inputs).rightCols(b.n_magnitudes);
    if (b.split) {
        Mat out(inputs.rows(), b.n_magnitudes);
        if (b.magnitude_net) {
            Mat big = mlp_forward(*b.magnitude_net, inputs);
            for (std::size_t j = 0; j < b.split->big_std.size(); ++j)
                out.col(b.split->big_std[j]) = big.col(static_cast<Eigen::Index>(j));
        }
        if (b.magnitude_linear) {
            Mat small = b.magnitude_linear->predict(inputs);
            for (std::size_t j = 0; j < b.split->small_std.size(); ++j)
                out.col(b.split->small_std[j]) = small.col(static_cast<Eigen::Index>(j));
        }
        return out;
    }
    if (b.magnitude_net) return mlp_forward(*b.magnitude_net, inputs);
    throw ContractError("bundle has no magnitude component");
}

StateEstimates assemble_states(const NetworkCase& c, const Mat& angles,
                               const Mat& magnitudes) {
    const int n = static_cast<int>(angles.rows());
    const int nb = c.n_buses();
    const double slack_ang = c.buses()[c.slack()].v_ang_init;

    StateEstimates est;
    est.v_ang.resize(n, nb);
    est.v_mag.resize(n, nb);
    est.v_ang.col(c.slack()).setConstant(slack_ang);
    const auto& order = c.angle_order();
    for (std::size_t k = 0; k < order.size(); ++k)
        est.v_ang.col(order[k]) = angles.col(static_cast<Eigen::Index>(k)).array() + slack_ang;

    for (int i = 0; i < nb; ++i)
        if (c.buses()[i].kind != BusKind::Load)
            est.v_mag.col(i).setConstant(c.held_voltage(i));
    const auto& pq = c.pq_buses();
    for (std::size_t k = 0; k < pq.size(); ++k)
        est.v_mag.col(pq[k]) = magnitudes.col(static_cast<Eigen::Index>(k));
    return est;
}

StateEstimates predict_states(const NetworkCase& c, const MethodBundle& b,
                              const Mat& inputs) {
    return assemble_states(c, predict_angles(b, inputs), predict_magnitudes(b, inputs));
}

FlowSet estimate_branch_flows(const NetworkCase& c, const StateEstimates& est) {
    const int n = static_cast<int>(est.v_mag.rows());
    const int m = c.n_lines();
    FlowSet fl;
    fl.p_from.resize(n, m);
    fl.q_from.resize(n, m);
    fl.p_to.resize(n, m);
    fl.q_to.resize(n, m);
    PfState s;
    for (int r = 0; r < n; ++r) {
        s.v_mag = est.v_mag.row(r).transpose();
        s.v_ang = est.v_ang.row(r).transpose();
        BranchFlows bf = branch_flows(c, s);
        fl.p_from.row(r) = bf.p_from.transpose();
        fl.q_from.row(r) = bf.q_from.transpose();
        fl.p_to.row(r) = bf.p_to.transpose();
        fl.q_to.row(r) = bf.q_to.transpose();
    }
    return fl;
}

GammaSweepResult tune_gamma(const std::vector<double>& candidates, const Dataset& ds,
                            const MethodConfigs& cfg) {
    if (candidates.empty()) throw ConfigError("gamma sweep needs at least one candidate");
    std::vector<double> sorted = candidates;
    std::sort(sorted.begin(), sorted.end());

    GammaSweepResult res;
    res.degenerate = true;
    double best = std::numeric_limits<double>::infinity();
    for (double gamma : sorted) {
        MethodBundle b;
        b.method_id = "M4";
        b.run_seed = cfg.run_seed;
        b.n_magnitudes = static_cast<int>(ds.magnitudes.cols());
        MethodConfigs local = cfg;
        local.gamma = gamma;
        train_split_magnitudes(b, ds, local, split_buses(ds.train_magnitudes(), gamma));
        if (!b.split->big_std.empty()) res.degenerate = false;
        const double rmse =
            average_rmse(predict_magnitudes(b, ds.val_inputs()), ds.val_magnitudes());
        res.candidates.emplace_back(gamma, rmse);
        if (rmse <= best) {  // ties favour the larger gamma, hence '<=' ascending
            best = rmse;
            res.gamma = gamma;
        }
    }
    if (res.degenerate)
        std::cerr << "warning: every gamma candidate produced an all-linear split\n";
    return res;
}

AlphaSweepResult tune_alpha(const std::vector<double>& candidates, const NetworkCase& c,
                            const Dataset& ds, const MethodConfigs& cfg) {
    if (candidates.empty()) throw ConfigError("alpha sweep needs at least one candidate");
    std::vector<double> sorted = candidates;
    std::sort(sorted.begin(), sorted.end());

    // magnitude side is independent of alpha; train it once
    MethodBundle mag;
    mag.method_id = "M4";
    mag.run_seed = cfg.run_seed;
    mag.n_magnitudes = static_cast<int>(ds.magnitudes.cols());
    train_split_magnitudes(mag, ds, cfg, split_buses(ds.train_magnitudes(), cfg.gamma));
    const Mat val_mags = predict_magnitudes(mag, ds.val_inputs());
    const FlowSet truth =
        estimate_branch_flows(c, assemble_states(c, ds.val_angles(), ds.val_magnitudes()));

    AlphaSweepResult res;
    double best = std::numeric_limits<double>::infinity();
    const Mat incidence = build_reduced_incidence(c);
    for (double alpha : sorted) {
        MlpModel net = fresh_net(static_cast<int>(ds.inputs.cols()), cfg.angle,
                                 static_cast<int>(ds.angles.cols()), cfg.run_seed, "angle");
        TrainConfig t = make_train_config(cfg.angle, cfg.run_seed, "angle");
        t.alpha = alpha;
        t.incidence = incidence;
        train_mlp(net, ds.train_inputs(), ds.train_angles(), ds.val_inputs(),
                  ds.val_angles(), t);
        const FlowSet est = estimate_branch_flows(
            c, assemble_states(c, mlp_forward(net, ds.val_inputs()), val_mags));
        const double score = average_rmse(est.p_from, truth.p_from) +
                             average_rmse(est.q_from, truth.q_from);
        res.candidates.emplace_back(alpha, score);
        if (score <= best) {
            best = score;
            res.alpha = alpha;
        }
    }
    return res;
}

void save_bundle(const MethodBundle& b, const std::string& dir) {
    fs::create_directories(dir);
    json manifest;
    manifest["format"] = "ppf-bundle";
    manifest["version"] = 1;
    manifest["method"] = b.method_id;
    manifest["gamma"] = b.gamma;
    manifest["alpha"] = b.alpha;
    manifest["run_seed"] = b.run_seed;
    manifest["data_fingerprint"] = b.data_fingerprint;
    manifest["config_fingerprint"] = b.config_fingerprint;
    manifest["n_angles"] = b.n_angles;
    manifest["n_magnitudes"] = b.n_magnitudes;
    json comps = json::array();
    if (b.stacked_linear) {
        comps.push_back("stacked_linear");
        write_file(fs::path(dir) / "stacked_linear.json",
                   serialize_linear(*b.stacked_linear, b.config_fingerprint));
    }
    if (b.stacked_net) {
        comps.push_back("stacked_net");
        write_file(fs::path(dir) / "stacked_net.json",
                   serialize_mlp(*b.stacked_net, b.config_fingerprint));
    }
    if (b.angle_net) {
        comps.push_back("angle_net");
        write_file(fs::path(dir) / "angle_net.json",
                   serialize_mlp(*b.angle_net, b.config_fingerprint));
    }
    if (b.magnitude_net) {
        comps.push_back("magnitude_net");
        write_file(fs::path(dir) / "magnitude_net.json",
                   serialize_mlp(*b.magnitude_net, b.config_fingerprint));
    }
    if (b.magnitude_linear) {
        comps.push_back("magnitude_linear");
        write_file(fs::path(dir) / "magnitude_linear.json",
                   serialize_linear(*b.magnitude_linear, b.config_fingerprint));
    }
    manifest["components"] = comps;
    if (b.split) {
        manifest["split"] = {
            {"gamma", b.split->gamma},
            {"small_std", b.split->small_std},
            {"big_std", b.split->big_std},
            {"per_bus_std",
             std::vector<double>(b.split->per_bus_std.data(),
                                 b.split->per_bus_std.data() + b.split->per_bus_std.size())},
        };
    }
    write_file(fs::path(dir) / "manifest.json", manifest.dump(2) + "\n");
}

MethodBundle load_bundle(const std::string& dir) {
    json manifest = json::parse(read_file(fs::path(dir) / "manifest.json"));
    if (manifest.value("format", "") != "ppf-bundle" || manifest.value("version", 0) != 1)
        throw FormatError("not a version-1 ppf-bundle directory: " + dir);
    MethodBundle b;
    b.method_id = manifest.at("method").get<std::string>();
    b.gamma = manifest.at("gamma").get<double>();
    b.alpha = manifest.at("alpha").get<double>();
    b.run_seed = manifest.at("run_seed").get<std::uint64_t>();
    b.data_fingerprint = manifest.at("data_fingerprint").get<std::string>();
    b.config_fingerprint = manifest.at("config_fingerprint").get<std::string>();
    b.n_angles = manifest.at("n_angles").get<int>();
    b.n_magnitudes = manifest.at("n_magnitudes").get<int>();
    for (const auto& comp : manifest.at("components")) {
        const std::string name = comp.get<std::string>();
        const std::string text = read_file(fs::path(dir) / (name + ".json"));
        if (name == "stacked_linear")
            b.stacked_linear = deserialize_linear(text);
        else if (name == "stacked_net")
            b.stacked_net = deserialize_mlp(text);
        else if (name == "angle_net")
            b.angle_net = deserialize_mlp(text);
        else if (name == "magnitude_net")
            b.magnitude_net = deserialize_mlp(text);
        else if (name == "magnitude_linear")
            b.magnitude_linear = deserialize_linear(text);
        else
            throw FormatError("unknown bundle component '" + name + "'");
    }
    if (manifest.contains("split")) {
        BusSplit s;
        const auto& js = manifest.at("split");
        s.gamma = js.at("gamma").get<double>();
        s.small_std = js.at("small_std").get<std::vector<int>>();
        s.big_std = js.at("big_std").get<std::vector<int>>();
        auto stds = js.at("per_bus_std").get<std::vector<double>>();
        s.per_bus_std = Eigen::Map<const Vec>(stds.data(), static_cast<Eigen::Index>(stds.size()));
        b.split = std::move(s);
    }
    return b;
}

}  // namespace ppf
