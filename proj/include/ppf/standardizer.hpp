#pragma once

#include "ppf/types.hpp"

namespace ppf {

/// Per-feature affine map to zero mean and unit variance. Stds are floored
/// at 1e-12 so constant features map to zero instead of dividing by zero.
struct Standardizer {
    Vec mean;
    Vec std;

    static Standardizer fit(const Mat& data);
    static Standardizer identity(int width);

    Mat apply(const Mat& data) const;
    Mat invert(const Mat& data) const;
    int width() const { return static_cast<int>(mean.size()); }
};

}  // namespace ppf
