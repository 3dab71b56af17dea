#pragma once

#include "ppf/types.hpp"

namespace ppf {

struct LossGrad {
    double value = 0.0;
    Mat grad;  // d value / d pred, same shape as pred
};

/// Mean squared error averaged over batch rows and response columns.
LossGrad mse_loss(const Mat& pred, const Mat& truth);

/// Weighted two-task loss: angle MSE plus alpha times the MSE of branch
/// angle differences A pred^T vs A truth^T. Both terms are means over their
/// own batch x response grids, so alpha compares like with like:
///
///   L = |E|^2 / (b (N-1)) + alpha |E A^T|^2 / (b M),   E = pred - truth
///   dL/dpred = 2 E / (b (N-1)) + alpha 2 (E A^T) A / (b M)
///
/// alpha = 0 reduces to mse_loss exactly, bit for bit.
LossGrad multitask_loss(const Mat& pred, const Mat& truth, const Mat& incidence,
                        double alpha);

}  // namespace ppf
