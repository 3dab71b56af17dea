#include "ppf/mlp.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "ppf/errors.hpp"

namespace ppf {

namespace {

using nlohmann::json;

json vec_to_json(const Vec& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vec vec_from_json(const json& j) {
    auto vals = j.get<std::vector<double>>();
    return Eigen::Map<const Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

}  // namespace

Standardizer Standardizer::fit(const Mat& data) {
    Standardizer s;
    const auto n = data.rows();
    s.mean = data.colwise().mean();
    if (n > 1) {
        Mat centered = data.rowwise() - s.mean.transpose();
        s.std = (centered.colwise().squaredNorm() / static_cast<double>(n - 1))
                    .cwiseSqrt()
                    .transpose();
    } else {
        s.std = Vec::Zero(data.cols());
    }
    s.std = s.std.cwiseMax(1e-12);
    return s;
}

Standardizer Standardizer::identity(int width) {
    Standardizer s;
    s.mean = Vec::Zero(width);
    s.std = Vec::Ones(width);
    return s;
}

Mat Standardizer::apply(const Mat& data) const {
    if (data.cols() != mean.size())
        throw ContractError("standardizer width " + std::to_string(mean.size()) +
                            " does not match data width " + std::to_string(data.cols()));
    Mat out = data.rowwise() - mean.transpose();
    out.array().rowwise() /= std.transpose().array();
    return out;
}

Mat Standardizer::invert(const Mat& data) const {
    if (data.cols() != mean.size())
        throw ContractError("standardizer width " + std::to_string(mean.size()) +
                            " does not match data width " + std::to_string(data.cols()));
    Mat out = data;
    out.array().rowwise() *= std.transpose().array();
    out.rowwise() += mean.transpose();
    return out;
}

std::size_t MlpModel::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
        n += static_cast<std::size_t>(weights[l].size()) +
             static_cast<std::size_t>(biases[l].size());
    return n;
}

MlpModel make_mlp(const std::vector<int>& layer_dims, rng::Engine& eng) {
    if (layer_dims.size() < 2)
        throw ConfigError("an MLP needs at least input and output layers");
    for (int d : layer_dims)
        if (d < 1) throw ConfigError("layer widths must be positive");

    MlpModel m;
    m.layer_dims = layer_dims;
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        const int fan_in = layer_dims[l];
        const int fan_out = layer_dims[l + 1];
        const double limit = std::sqrt(6.0 / fan_in);
        Mat w(fan_out, fan_in);
        for (int i = 0; i < fan_out; ++i)
            for (int j = 0; j < fan_in; ++j) w(i, j) = eng.uniform(-limit, limit);
        m.weights.push_back(std::move(w));
        m.biases.push_back(Vec::Zero(fan_out));
    }
    m.in_std = Standardizer::identity(layer_dims.front());
    m.out_std = Standardizer::identity(layer_dims.back());
    return m;
}

Mat mlp_raw_forward(const MlpModel& m, const Mat& batch_std, std::vector<Mat>* cache) {
    if (batch_std.cols() != m.d_in())
        throw ContractError("batch width " + std::to_string(batch_std.cols()) +
                            " does not match the input layer width " +
                            std::to_string(m.d_in()));
    Mat a = batch_std;
    if (cache) {
        cache->clear();
        cache->push_back(a);
    }
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        Mat z = a * m.weights[l].transpose();
        z.rowwise() += m.biases[l].transpose();
        if (l + 1 < m.weights.size()) z = z.cwiseMax(0.0);  // ReLU on hidden layers
        a = std::move(z);
        if (cache) cache->push_back(a);
    }
    return a;
}

Mat mlp_forward(const MlpModel& m, const Mat& batch) {
    return m.out_std.invert(mlp_raw_forward(m, m.in_std.apply(batch)));
}

std::string serialize_mlp(const MlpModel& m, const std::string& config_fingerprint) {
    json j;
    j["format"] = "ppf-mlp";
    j["version"] = 1;
    j["layer_dims"] = m.layer_dims;
    j["config_fingerprint"] = config_fingerprint;
    json ws = json::array(), bs = json::array();
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        const Mat& w = m.weights[l];
        std::vector<double> flat;  // row major
        flat.reserve(static_cast<std::size_t>(w.size()));
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index jx = 0; jx < w.cols(); ++jx) flat.push_back(w(i, jx));
        ws.push_back(flat);
        bs.push_back(vec_to_json(m.biases[l]));
    }
    j["weights"] = ws;
    j["biases"] = bs;
    j["in_mean"] = vec_to_json(m.in_std.mean);
    j["in_std"] = vec_to_json(m.in_std.std);
    j["out_mean"] = vec_to_json(m.out_std.mean);
    j["out_std"] = vec_to_json(m.out_std.std);
    return j.dump(2);
}

MlpModel deserialize_mlp(const std::string& text) {
    json j = json::parse(text);
    if (j.value("format", "") != "ppf-mlp" || j.value("version", 0) != 1)
        throw FormatError("not a version-1 ppf-mlp container");
    MlpModel m;
    m.layer_dims = j.at("layer_dims").get<std::vector<int>>();
    const auto& ws = j.at("weights");
    const auto& bs = j.at("biases");
    if (ws.size() + 1 != m.layer_dims.size() || bs.size() != ws.size())
        throw FormatError("mlp container layer counts are inconsistent");
    for (std::size_t l = 0; l + 1 < m.layer_dims.size(); ++l) {
        const int rows = m.layer_dims[l + 1], cols = m.layer_dims[l];
        auto flat = ws[l].get<std::vector<double>>();
        if (static_cast<int>(flat.size()) != rows * cols)
            throw FormatError("mlp container weight block has the wrong size");
        Mat w(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int c = 0; c < cols; ++c) w(i, c) = flat[static_cast<std::size_t>(i) * cols + c];
        m.weights.push_back(std::move(w));
        Vec b = vec_from_json(bs[l]);
        if (b.size() != rows) throw FormatError("mlp container bias block has the wrong size");
        m.biases.push_back(std::move(b));
    }
    m.in_std.mean = vec_from_json(j.at("in_mean"));
    m.in_std.std = vec_from_json(j.at("in_std"));
    m.out_std.mean = vec_from_json(j.at("out_mean"));
    m.out_std.std = vec_from_json(j.at("out_std"));
    if (m.in_std.width() != m.d_in() || m.out_std.width() != m.d_out())
        throw FormatError("mlp container standardizer widths are inconsistent");
    return m;
}

}  // namespace ppf
