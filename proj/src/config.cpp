#include "ppf/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ppf/errors.hpp"
#include "ppf/rng.hpp"

namespace ppf {

namespace {

using nlohmann::json;

MlpSpec parse_spec(const json& j, const MlpSpec& defaults) {
    MlpSpec s = defaults;
    if (j.contains("hidden")) s.hidden = j.at("hidden").get<std::vector<int>>();
    s.learning_rate = j.value("learning_rate", s.learning_rate);
    s.batch_size = j.value("batch_size", s.batch_size);
    s.epochs = j.value("epochs", s.epochs);
    s.patience = j.value("patience", s.patience);
    return s;
}

json spec_to_json(const MlpSpec& s) {
    return json{{"hidden", s.hidden},
                {"learning_rate", s.learning_rate},
                {"batch_size", s.batch_size},
                {"epochs", s.epochs},
                {"patience", s.patience}};
}

}  // namespace

std::string fingerprint(const std::string& bytes) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(rng::hash_str(bytes)));
    return buf;
}

RunConfig RunConfig::load(const std::string& path, const ConfigOverrides& ov) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }

    RunConfig c;
    c.case_path = j.value("case", "");
    if (c.case_path.empty()) throw ConfigError("config is missing the 'case' path");
    // relative input paths resolve against the config file's directory
    const auto cfg_dir = std::filesystem::path(path).parent_path();
    auto resolve = [&cfg_dir](const std::string& p) {
        if (p.empty() || std::filesystem::path(p).is_absolute()) return p;
        return (cfg_dir / p).string();
    };
    c.case_path = resolve(c.case_path);
    c.out_dir = j.value("out", c.out_dir);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", 0);

    if (j.contains("sampling")) {
        const json& s = j.at("sampling");
        c.sampling.pv_buses = s.value("pv_buses", c.sampling.pv_buses);
        c.sampling.load_std_fraction =
            s.value("load_std_fraction", c.sampling.load_std_fraction);
        c.sampling.corr_p = s.value("corr_p", c.sampling.corr_p);
        c.sampling.corr_q = s.value("corr_q", c.sampling.corr_q);
        c.sampling.sample_count = s.value("sample_count", c.sampling.sample_count);
        if (s.contains("split")) {
            auto sp = s.at("split").get<std::vector<int>>();
            if (sp.size() != 3)
                throw ConfigError("sampling.split must list train, validation, test");
            c.sampling.split = {sp[0], sp[1], sp[2]};
        }
        c.sampling.pv_capacity_factor =
            s.value("pv_capacity_factor", c.sampling.pv_capacity_factor);
        c.sampling.pv_beta_a = s.value("pv_beta_a", c.sampling.pv_beta_a);
        c.sampling.pv_beta_b = s.value("pv_beta_b", c.sampling.pv_beta_b);
        c.sampling.profile_csv = resolve(s.value("profile_csv", c.sampling.profile_csv));
    }
    if (j.contains("solver")) {
        c.solver.tol = j.at("solver").value("tol", c.solver.tol);
        c.solver.max_iter = j.at("solver").value("max_iter", c.solver.max_iter);
    }

    const json training = j.value("training", json::object());
    if (training.contains("M2")) c.m2 = parse_spec(training.at("M2"), c.m2);
    if (training.contains("M3")) {
        const json& m3 = training.at("M3");
        if (m3.contains("angle")) c.m3_angle = parse_spec(m3.at("angle"), c.m3_angle);
        if (m3.contains("magnitude"))
            c.m3_magnitude = parse_spec(m3.at("magnitude"), c.m3_magnitude);
    }
    // M4 component specs default to M3's so the two methods stay comparable
    c.m4_angle = c.m3_angle;
    c.m4_magnitude = c.m3_magnitude;
    if (training.contains("M4")) {
        const json& m4 = training.at("M4");
        if (m4.contains("angle")) c.m4_angle = parse_spec(m4.at("angle"), c.m4_angle);
        if (m4.contains("magnitude"))
            c.m4_magnitude = parse_spec(m4.at("magnitude"), c.m4_magnitude);
        c.m4_gamma = m4.value("gamma", c.m4_gamma);
        c.m4_alpha = m4.value("alpha", c.m4_alpha);
    }

    if (j.contains("evaluation") && j.at("evaluation").contains("quantities"))
        c.eval_quantities =
            j.at("evaluation").at("quantities").get<std::vector<std::string>>();
    if (j.contains("sweep")) {
        const json& sw = j.at("sweep");
        c.sweep_gammas = sw.value("gammas", c.sweep_gammas);
        c.sweep_alphas = sw.value("alphas", c.sweep_alphas);
        c.sweep_epochs = sw.value("epochs", c.sweep_epochs);
    }

    if (ov.seed) c.seed = *ov.seed;
    if (ov.out_dir) c.out_dir = *ov.out_dir;
    c.sampling.seed = c.seed;

    std::ifstream cf(c.case_path);
    if (!cf) throw ConfigError("cannot open case file: " + c.case_path);
    std::ostringstream ss;
    ss << cf.rdbuf();
    c.case_text = ss.str();

    json sampling_echo{{"pv_buses", c.sampling.pv_buses},
                       {"load_std_fraction", c.sampling.load_std_fraction},
                       {"corr_p", c.sampling.corr_p},
                       {"corr_q", c.sampling.corr_q},
                       {"sample_count", c.sampling.sample_count},
                       {"split", c.sampling.split},
                       {"pv_capacity_factor", c.sampling.pv_capacity_factor},
                       {"pv_beta_a", c.sampling.pv_beta_a},
                       {"pv_beta_b", c.sampling.pv_beta_b},
                       {"profile_csv", c.sampling.profile_csv},
                       {"solver_tol", c.solver.tol},
                       {"solver_max_iter", c.solver.max_iter},
                       {"seed", c.seed}};
    c.sampling_json = sampling_echo.dump();

    json training_echo{{"M2", spec_to_json(c.m2)},
                       {"M3", {{"angle", spec_to_json(c.m3_angle)},
                               {"magnitude", spec_to_json(c.m3_magnitude)}}},
                       {"M4", {{"angle", spec_to_json(c.m4_angle)},
                               {"magnitude", spec_to_json(c.m4_magnitude)},
                               {"gamma", c.m4_gamma},
                               {"alpha", c.m4_alpha}}}};
    c.training_json = training_echo.dump();
    return c;
}

MethodConfigs RunConfig::method_configs(const std::string& method) const {
    MethodConfigs mc;
    mc.run_seed = seed;
    mc.stacked = m2;
    if (method == "M4") {
        mc.angle = m4_angle;
        mc.magnitude = m4_magnitude;
        mc.gamma = m4_gamma;
        mc.alpha = m4_alpha;
    } else {
        mc.angle = m3_angle;
        mc.magnitude = m3_magnitude;
        mc.gamma = m4_gamma;
        mc.alpha = m4_alpha;
    }
    return mc;
}

std::string RunConfig::data_fingerprint() const {
    return fingerprint(case_text + "|" + sampling_json);
}

std::string RunConfig::train_fingerprint(const std::string& method) const {
    nlohmann::json t = nlohmann::json::parse(training_json);
    std::string section;
    if (method == "M1")
        section = "{}";
    else if (method == "M2")
        section = t.at("M2").dump();
    else if (method == "M3")
        section = t.at("M3").dump();
    else if (method == "M4")
        section = t.at("M4").dump();
    else
        throw ConfigError("unknown method id '" + method + "'");
    return fingerprint(data_fingerprint() + "|" + method + "|" + section);
}

}  // namespace ppf
