#include "ppf/train.hpp"

#include <cmath>

#include "ppf/errors.hpp"

namespace ppf {

void TrainConfig::validate() const {
    if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
    if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
    if (epochs < 0) throw ConfigError("epochs must be non-negative");
    if (alpha < 0.0) throw ConfigError("multitask weight alpha must be non-negative");
    if (early_stop_patience < 1) throw ConfigError("patience must be at least 1");
}

namespace {

// Loss on a standardized-input batch. Physical-loss mode de-standardizes the
// raw outputs and chains d(phys)/d(raw) = out_std back into the gradient.
LossGrad batch_loss(const MlpModel& m, const Mat& raw_out, const Mat& y_phys,
                    const Mat& y_std, const TrainConfig& cfg) {
    if (cfg.standardized_loss) {
        if (cfg.incidence) {
            LossGrad lg = multitask_loss(raw_out, y_std, *cfg.incidence, cfg.alpha);
            return lg;
        }
        return mse_loss(raw_out, y_std);
    }
    Mat pred_phys = m.out_std.invert(raw_out);
    LossGrad lg = cfg.incidence
                      ? multitask_loss(pred_phys, y_phys, *cfg.incidence, cfg.alpha)
                      : mse_loss(pred_phys, y_phys);
    lg.grad.array().rowwise() *= m.out_std.std.transpose().array();
    return lg;
}

struct AdamState {
    std::vector<Mat> mw, vw;
    std::vector<Vec> mb, vb;
    long t = 0;

    explicit AdamState(const MlpModel& m) {
        for (std::size_t l = 0; l < m.weights.size(); ++l) {
            mw.push_back(Mat::Zero(m.weights[l].rows(), m.weights[l].cols()));
            vw.push_back(Mat::Zero(m.weights[l].rows(), m.weights[l].cols()));
            mb.push_back(Vec::Zero(m.biases[l].size()));
            vb.push_back(Vec::Zero(m.biases[l].size()));
        }
    }

    void step(MlpModel& m, const std::vector<Mat>& gw, const std::vector<Vec>& gb,
              const TrainConfig& cfg) {
        ++t;
        const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(t));
        const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(t));
        for (std::size_t l = 0; l < m.weights.size(); ++l) {
            mw[l] = cfg.adam_beta1 * mw[l] + (1.0 - cfg.adam_beta1) * gw[l];
            vw[l] = cfg.adam_beta2 * vw[l] + (1.0 - cfg.adam_beta2) * gw[l].cwiseProduct(gw[l]);
            m.weights[l].array() -=
                cfg.learning_rate * (mw[l].array() / c1) /
                ((vw[l].array() / c2).sqrt() + cfg.adam_eps);
            mb[l] = cfg.adam_beta1 * mb[l] + (1.0 - cfg.adam_beta1) * gb[l];
            vb[l] = cfg.adam_beta2 * vb[l] + (1.0 - cfg.adam_beta2) * gb[l].cwiseProduct(gb[l]);
            m.biases[l].array() -=
                cfg.learning_rate * (mb[l].array() / c1) /
                ((vb[l].array() / c2).sqrt() + cfg.adam_eps);
        }
    }
};

double backprop(const MlpModel& m, const Mat& x_std, const Mat& y_phys, const Mat& y_std,
                const TrainConfig& cfg, std::vector<Mat>& grad_w,
                std::vector<Vec>& grad_b) {
    std::vector<Mat> acts;
    Mat raw = mlp_raw_forward(m, x_std, &acts);
    LossGrad lg = batch_loss(m, raw, y_phys, y_std, cfg);

    const std::size_t layers = m.weights.size();
    grad_w.resize(layers);
    grad_b.resize(layers);
    Mat delta = lg.grad;  // b x d_out
    for (std::size_t l = layers; l-- > 0;) {
        grad_w[l] = delta.transpose() * acts[l];
        grad_b[l] = delta.colwise().sum();
        if (l > 0) {
            delta = delta * m.weights[l];
            delta.array() *= (acts[l].array() > 0.0).cast<double>();
        }
    }
    return lg.value;
}

}  // namespace

double loss_and_gradients(const MlpModel& m, const Mat& x, const Mat& y,
                          const TrainConfig& cfg, std::vector<Mat>& grad_w,
                          std::vector<Vec>& grad_b) {
    Mat x_std = m.in_std.apply(x);
    Mat y_std = cfg.standardized_loss ? m.out_std.apply(y) : Mat();
    return backprop(m, x_std, y, y_std, cfg, grad_w, grad_b);
}

TrainResult train_mlp(MlpModel& m, const Mat& x_train, const Mat& y_train,
                      const Mat& x_val, const Mat& y_val, const TrainConfig& cfg) {
    cfg.validate();
    if (x_train.rows() != y_train.rows() || x_val.rows() != y_val.rows())
        throw ContractError("inputs and targets disagree on the sample count");
    if (x_train.cols() != m.d_in() || y_train.cols() != m.d_out())
        throw ContractError("training data does not match the model dimensions");

    m.in_std = Standardizer::fit(x_train);
    m.out_std = Standardizer::fit(y_train);

    const Mat xt = m.in_std.apply(x_train);
    const Mat xv = m.in_std.apply(x_val);
    const Mat yt_std = cfg.standardized_loss ? m.out_std.apply(y_train) : Mat();
    const Mat yv_std = cfg.standardized_loss ? m.out_std.apply(y_val) : Mat();

    const int n = static_cast<int>(xt.rows());
    AdamState adam(m);
    rng::Engine shuffle_eng(rng::mix(cfg.shuffle_seed, rng::hash_str("shuffle")));
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;

    TrainResult res;
    std::vector<Mat> best_w = m.weights;
    std::vector<Vec> best_b = m.biases;
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;

    std::vector<Mat> gw;
    std::vector<Vec> gb;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng::shuffle(perm, shuffle_eng);
        double epoch_loss = 0.0;
        for (int start = 0; start < n; start += cfg.batch_size) {
            const int b = std::min(cfg.batch_size, n - start);
            Mat xb(b, xt.cols()), yb(b, y_train.cols());
            Mat yb_std(cfg.standardized_loss ? b : 0, y_train.cols());
            for (int i = 0; i < b; ++i) {
                xb.row(i) = xt.row(perm[start + i]);
                yb.row(i) = y_train.row(perm[start + i]);
                if (cfg.standardized_loss) yb_std.row(i) = yt_std.row(perm[start + i]);
            }
            const double loss = backprop(m, xb, yb, yb_std, cfg, gw, gb);
            if (!std::isfinite(loss))
                throw SolverError("training diverged at epoch " + std::to_string(epoch) +
                                  ", batch " + std::to_string(start / cfg.batch_size));
            adam.step(m, gw, gb, cfg);
            epoch_loss += loss * b;
        }
        res.train_loss.push_back(n > 0 ? epoch_loss / n : 0.0);

        Mat raw_val = mlp_raw_forward(m, xv);
        const double vloss = batch_loss(m, raw_val, y_val, yv_std, cfg).value;
        if (!std::isfinite(vloss))
            throw SolverError("validation loss diverged at epoch " + std::to_string(epoch));
        res.val_loss.push_back(vloss);

        if (vloss < best_val) {
            best_val = vloss;
            best_w = m.weights;
            best_b = m.biases;
            res.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= cfg.early_stop_patience) {
            break;
        }
    }

    if (res.best_epoch >= 0) {
        m.weights = std::move(best_w);
        m.biases = std::move(best_b);
    }
    return res;
}

double grad_check(const MlpModel& m, const Mat& x, const Mat& y, const TrainConfig& cfg) {
    if (m.parameter_count() > 10000)
        throw ContractError("grad_check is meant for models of at most 1e4 parameters");
    std::vector<Mat> gw;
    std::vector<Vec> gb;
    loss_and_gradients(m, x, y, cfg, gw, gb);

    MlpModel probe = m;
    const double h = 1e-6;
    auto loss_at = [&]() {
        std::vector<Mat> tw;
        std::vector<Vec> tb;
        return loss_and_gradients(probe, x, y, cfg, tw, tb);
    };
    auto rel = [](double a, double b) {
        return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-5});
    };

    double worst = 0.0;
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        for (Eigen::Index i = 0; i < m.weights[l].rows(); ++i) {
            for (Eigen::Index j = 0; j < m.weights[l].cols(); ++j) {
                const double orig = probe.weights[l](i, j);
                probe.weights[l](i, j) = orig + h;
                const double lp = loss_at();
                probe.weights[l](i, j) = orig - h;
                const double lm = loss_at();
                probe.weights[l](i, j) = orig;
                worst = std::max(worst, rel((lp - lm) / (2 * h), gw[l](i, j)));
            }
        }
        for (Eigen::Index i = 0; i < m.biases[l].size(); ++i) {
            const double orig = probe.biases[l](i);
            probe.biases[l](i) = orig + h;
            const double lp = loss_at();
            probe.biases[l](i) = orig - h;
            const double lm = loss_at();
            probe.biases[l](i) = orig;
            worst = std::max(worst, rel((lp - lm) / (2 * h), gb[l](i)));
        }
    }
    return worst;
}

}  // namespace ppf
