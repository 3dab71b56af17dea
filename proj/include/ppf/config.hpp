#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ppf/pf.hpp"
#include "ppf/pipeline.hpp"
#include "ppf/sampling.hpp"

namespace ppf {

/// Command-line overrides; flags always win over file values.
struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
};

/// One structured config file drives every stage. Sections: case, out, seed,
/// sampling, solver, training.{M2,M3,M4}, evaluation, sweep.
struct RunConfig {
    std::string case_path;
    std::string out_dir = "runs/out";
    std::uint64_t seed = 0;
    int threads = 0;

    SamplingConfig sampling;
    PfOptions solver;

    MlpSpec m2, m3_angle, m3_magnitude, m4_angle, m4_magnitude;
    double m4_gamma = 1e-3;
    double m4_alpha = 1.0;

    std::vector<std::string> eval_quantities{"angle", "angle_diff", "magnitude",
                                             "p_flow", "q_flow"};
    std::vector<double> sweep_gammas{1e-4, 1e-3, 1e-2};
    std::vector<double> sweep_alphas{0.1, 1.0, 10.0};
    int sweep_epochs = 40;

    std::string case_text;        // contents of the case file
    std::string sampling_json;    // canonical dump of the sampling section
    std::string training_json;    // canonical dump of the training section

    static RunConfig load(const std::string& path, const ConfigOverrides& ov = {});

    /// Trainer settings for one method, seeds derived from the run seed.
    MethodConfigs method_configs(const std::string& method) const;

    /// Fingerprint of everything that shapes the dataset.
    std::string data_fingerprint() const;
    /// Fingerprint of the dataset inputs plus one method's training section.
    std::string train_fingerprint(const std::string& method) const;
};

/// FNV-1a over the bytes, rendered as 16 hex digits.
std::string fingerprint(const std::string& bytes);

}  // namespace ppf
