#pragma once

#include <string>
#include <vector>

#include "ppf/rng.hpp"
#include "ppf/standardizer.hpp"
#include "ppf/types.hpp"

namespace ppf {

/// Fully connected network: affine + ReLU on hidden layers, affine output.
/// The raw network operates in standardized coordinates; mlp_forward maps
/// physical inputs to physical outputs through the attached standardizers.
struct MlpModel {
    std::vector<int> layer_dims;     // [d_in, hidden..., d_out]
    std::vector<Mat> weights;        // weights[l]: dims[l+1] x dims[l]
    std::vector<Vec> biases;
    Standardizer in_std, out_std;

    int d_in() const { return layer_dims.front(); }
    int d_out() const { return layer_dims.back(); }
    std::size_t n_layers() const { return weights.size(); }
    std::size_t parameter_count() const;
};

/// Fresh model with He-uniform weights (fan-in scaled) and zero biases drawn
/// from `eng`; standardizers start as identity.
MlpModel make_mlp(const std::vector<int>& layer_dims, rng::Engine& eng);

/// Raw pass in standardized coordinates: batch rows in, batch rows out.
/// When `cache` is non-null the post-activation of every layer is recorded
/// for backpropagation.
Mat mlp_raw_forward(const MlpModel& m, const Mat& batch_std,
                    std::vector<Mat>* cache = nullptr);

/// Physical-units pass: standardize inputs, run the network, de-standardize.
Mat mlp_forward(const MlpModel& m, const Mat& batch);

/// Versioned JSON container with layer dims, row-major weights, standardizer
/// vectors, and the producing config fingerprint.
std::string serialize_mlp(const MlpModel& m, const std::string& config_fingerprint = "");
MlpModel deserialize_mlp(const std::string& text);

}  // namespace ppf
