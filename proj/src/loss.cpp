#include "ppf/loss.hpp"

#include "ppf/errors.hpp"

namespace ppf {

LossGrad mse_loss(const Mat& pred, const Mat& truth) {
    if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
        throw ContractError("prediction and truth shapes differ");
    const double denom = static_cast<double>(pred.rows()) * pred.cols();
    LossGrad out;
    Mat err = pred - truth;
    out.value = err.squaredNorm() / denom;
    out.grad = (2.0 / denom) * err;
    return out;
}

LossGrad multitask_loss(const Mat& pred, const Mat& truth, const Mat& incidence,
                        double alpha) {
    if (alpha < 0.0) throw ConfigError("multitask weight alpha must be non-negative");
    if (alpha == 0.0) return mse_loss(pred, truth);
    if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
        throw ContractError("prediction and truth shapes differ");
    if (incidence.cols() != pred.cols())
        throw ContractError("incidence matrix width does not match the angle count");

    const double b = static_cast<double>(pred.rows());
    const double na = static_cast<double>(pred.cols());
    const double m = static_cast<double>(incidence.rows());

    Mat err = pred - truth;
    Mat diff = err * incidence.transpose();  // b x M residuals of angle differences
    LossGrad out;
    out.value = err.squaredNorm() / (b * na) + alpha * diff.squaredNorm() / (b * m);
    out.grad = (2.0 / (b * na)) * err + (alpha * 2.0 / (b * m)) * (diff * incidence);
    return out;
}

}  // namespace ppf
