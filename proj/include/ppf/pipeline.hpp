#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ppf/dataset.hpp"
#include "ppf/linear_model.hpp"
#include "ppf/mlp.hpp"
#include "ppf/pf.hpp"
#include "ppf/train.hpp"
#include "ppf/types.hpp"

namespace ppf {

/// Load buses partitioned by the sample std of their voltage magnitudes:
/// std <= gamma goes to the linear side, the rest to the network side.
struct BusSplit {
    std::vector<int> small_std;  // load-bus slots (indices into V_l columns)
    std::vector<int> big_std;
    double gamma = 0.0;
    Vec per_bus_std;
};

BusSplit split_buses(const Mat& train_magnitudes, double gamma);

/// Network architecture and trainer settings for one component.
struct MlpSpec {
    std::vector<int> hidden{100, 100};
    double learning_rate = 1e-4;
    int batch_size = 32;
    int epochs = 200;
    int patience = 20;
};

struct MethodConfigs {
    MlpSpec stacked;    // M2
    MlpSpec angle;      // M3 and M4 angle nets
    MlpSpec magnitude;  // M3 and M4 magnitude nets
    double gamma = 1e-3;  // M4 split threshold
    double alpha = 1.0;   // M4 multitask weight
    std::uint64_t run_seed = 0;
};

/// A trained estimator of the full inverse mapping. Which components exist
/// depends on the method: M1 one linear model over [angles; magnitudes],
/// M2 one stacked network, M3 separate angle/magnitude networks, M4 the
/// multitask angle network plus a split magnitude model.
struct MethodBundle {
    std::string method_id;
    std::optional<LinearModel> stacked_linear;
    std::optional<MlpModel> stacked_net;
    std::optional<MlpModel> angle_net;
    std::optional<MlpModel> magnitude_net;
    std::optional<LinearModel> magnitude_linear;
    std::optional<BusSplit> split;
    double gamma = 0.0;
    double alpha = 0.0;
    std::uint64_t run_seed = 0;
    std::string data_fingerprint;
    std::string config_fingerprint;
    int n_angles = 0;
    int n_magnitudes = 0;

    // per-component loss histories for reporting, keyed by component name
    std::vector<std::pair<std::string, TrainResult>> histories;
};

MethodBundle train_method(const std::string& method_id, const NetworkCase& c,
                          const Dataset& ds, const MethodConfigs& cfg);

/// Component predictions in dataset layout (angles relative to slack).
Mat predict_angles(const MethodBundle& b, const Mat& inputs);
Mat predict_magnitudes(const MethodBundle& b, const Mat& inputs);

/// Full per-sample voltage states: predicted quantities interleaved with the
/// known slack values and generator setpoints (copied, never predicted).
struct StateEstimates {
    Mat v_mag;  // n x N
    Mat v_ang;  // n x N, absolute angles
};

StateEstimates predict_states(const NetworkCase& c, const MethodBundle& b,
                              const Mat& inputs);

/// Assemble full states directly from dataset-layout angle/magnitude rows.
StateEstimates assemble_states(const NetworkCase& c, const Mat& angles,
                               const Mat& magnitudes);

struct FlowSet {
    Mat p_from, q_from, p_to, q_to;  // n x M
};

FlowSet estimate_branch_flows(const NetworkCase& c, const StateEstimates& est);

struct GammaSweepResult {
    double gamma = 0.0;
    std::vector<std::pair<double, double>> candidates;  // (gamma, validation rmse)
    bool degenerate = false;  // every candidate ended with an all-linear split
};

/// Trains the split magnitude model per candidate and keeps the gamma with
/// the lowest validation average RMSE; ties break toward the larger gamma.
GammaSweepResult tune_gamma(const std::vector<double>& candidates, const Dataset& ds,
                            const MethodConfigs& cfg);

struct AlphaSweepResult {
    double alpha = 0.0;
    std::vector<std::pair<double, double>> candidates;  // (alpha, validation flow rmse)
};

/// Trains the multitask angle net per candidate alpha and scores validation
/// branch-flow RMSE (active plus reactive) with shared magnitude components.
AlphaSweepResult tune_alpha(const std::vector<double>& candidates, const NetworkCase& c,
                            const Dataset& ds, const MethodConfigs& cfg);

void save_bundle(const MethodBundle& b, const std::string& dir);
MethodBundle load_bundle(const std::string& dir);

}  // namespace ppf
