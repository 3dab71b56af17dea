#include "ppf/linear_model.hpp"

#include <nlohmann/json.hpp>

#include "ppf/errors.hpp"

namespace ppf {

Mat LinearModel::predict(const Mat& inputs) const {
    if (inputs.cols() != d_in())
        throw ContractError("linear model expects " + std::to_string(d_in()) +
                            " inputs, got " + std::to_string(inputs.cols()));
    Mat out = inputs * h.leftCols(d_in()).transpose();
    out.rowwise() += h.col(d_in()).transpose();
    return out;
}

LinearModel fit_ols(const Mat& inputs, const Mat& targets) {
    const Eigen::Index n = inputs.rows();
    const Eigen::Index d_in = inputs.cols();
    if (targets.rows() != n)
        throw ContractError("inputs and targets disagree on the sample count");
    if (n <= d_in + 1)
        throw ValidationError("underdetermined least squares: " + std::to_string(n) +
                              " samples for " + std::to_string(d_in + 1) +
                              " coefficients");

    Mat design(n, d_in + 1);
    design.leftCols(d_in) = inputs;
    design.col(d_in).setOnes();

    Eigen::CompleteOrthogonalDecomposition<Mat> cod(design);
    Mat coef = cod.solve(targets);  // (d_in+1) x d_out, minimum norm

    LinearModel m;
    m.h = coef.transpose();
    if (!m.h.allFinite()) throw SolverError("least-squares solution is not finite");
    return m;
}

std::string serialize_linear(const LinearModel& m, const std::string& config_fingerprint) {
    nlohmann::json j;
    j["format"] = "ppf-linear";
    j["version"] = 1;
    j["rows"] = m.h.rows();
    j["cols"] = m.h.cols();
    j["config_fingerprint"] = config_fingerprint;
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(m.h.size()));
    for (Eigen::Index i = 0; i < m.h.rows(); ++i)
        for (Eigen::Index c = 0; c < m.h.cols(); ++c) flat.push_back(m.h(i, c));
    j["h"] = flat;
    return j.dump(2);
}

LinearModel deserialize_linear(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("format", "") != "ppf-linear" || j.value("version", 0) != 1)
        throw FormatError("not a version-1 ppf-linear container");
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    auto flat = j.at("h").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(flat.size()) != rows * cols)
        throw FormatError("linear container coefficient block has the wrong size");
    LinearModel m;
    m.h.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index c = 0; c < cols; ++c)
            m.h(i, c) = flat[static_cast<std::size_t>(i * cols + c)];
    return m;
}

}  // namespace ppf
