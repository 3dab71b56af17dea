#pragma once

#include "ppf/types.hpp"

namespace ppf {

/// Least-squares linear map with intercept; coefficient matrix is
/// d_out x (d_in + 1) with the intercept in the last column.
struct LinearModel {
    Mat h;

    int d_in() const { return static_cast<int>(h.cols()) - 1; }
    int d_out() const { return static_cast<int>(h.rows()); }
    Mat predict(const Mat& inputs) const;
};

/// Ordinary least squares per output column, solved through a rank-revealing
/// orthogonal factorization; rank-deficient designs get the minimum-norm
/// solution.
LinearModel fit_ols(const Mat& inputs, const Mat& targets);

std::string serialize_linear(const LinearModel& m,
                             const std::string& config_fingerprint = "");
LinearModel deserialize_linear(const std::string& text);

}  // namespace ppf
