#pragma once

#include <optional>

#include "ppf/loss.hpp"
#include "ppf/mlp.hpp"
#include "ppf/types.hpp"

namespace ppf {

struct TrainConfig {
    double learning_rate = 1e-3;
    int batch_size = 32;
    int epochs = 200;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double alpha = 0.0;             // multitask weight; used when incidence is set
    std::optional<Mat> incidence;   // M x (N-1); enables the multitask loss
    std::uint64_t shuffle_seed = 0;
    int early_stop_patience = 20;

    /// Train against standardized targets instead of physical ones. This is
    /// the single-net baseline behaviour (normalized outputs); the separate
    /// angle/magnitude nets keep it off and optimize physical-unit errors
    /// through the output standardizer.
    bool standardized_loss = false;

    void validate() const;
};

struct TrainResult {
    std::vector<double> train_loss;  // per epoch
    std::vector<double> val_loss;
    int best_epoch = -1;             // epoch whose weights the model keeps
};

/// Mini-batch Adam with bias correction, one reshuffle per epoch, and early
/// stopping on validation loss. The model keeps the weights of the best
/// validation epoch. Deterministic given the seeds; standardizers are fitted
/// on the training block only.
TrainResult train_mlp(MlpModel& m, const Mat& x_train, const Mat& y_train,
                      const Mat& x_val, const Mat& y_val, const TrainConfig& cfg);

/// Loss and analytic parameter gradients at one batch, sharing the exact
/// code path the trainer uses. Gradient layout matches weights then biases,
/// layer by layer.
double loss_and_gradients(const MlpModel& m, const Mat& x, const Mat& y,
                          const TrainConfig& cfg, std::vector<Mat>& grad_w,
                          std::vector<Vec>& grad_b);

/// Central-difference check (step 1e-6) of every parameter gradient against
/// the analytic path; returns the worst relative error. Intended for models
/// of at most ~1e4 parameters.
double grad_check(const MlpModel& m, const Mat& x, const Mat& y,
                  const TrainConfig& cfg);

}  // namespace ppf
