#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "ppf/matpower.hpp"
#include "ppf/mlp.hpp"

namespace ppf::testing {

inline NetworkCase load_fixture(const std::string& name) {
    std::ifstream f(std::string(PPF_DATA_DIR) + "/" + name);
    if (!f) throw std::runtime_error("missing fixture " + name);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_case(ss.str());
}

/// Nudges hidden biases until every pre-activation on the probe batch sits
/// at least `margin` away from the ReLU kink, so finite differences stay on
/// one side of it.
inline void push_off_kinks(MlpModel& m, const Mat& x_std, double margin = 1e-3) {
    for (int pass = 0; pass < 50; ++pass) {
        bool moved = false;
        Mat a = x_std;
        for (std::size_t l = 0; l < m.weights.size(); ++l) {
            Mat z = a * m.weights[l].transpose();
            z.rowwise() += m.biases[l].transpose();
            if (l + 1 < m.weights.size()) {
                for (Eigen::Index u = 0; u < z.cols(); ++u) {
                    const double closest = z.col(u).cwiseAbs().minCoeff();
                    if (closest < margin) {
                        m.biases[l](u) += 2 * margin;
                        moved = true;
                    }
                }
                if (moved) break;  // recompute from scratch after any change
                z = z.cwiseMax(0.0);
            }
            a = std::move(z);
        }
        if (!moved) return;
    }
    throw std::runtime_error("could not move pre-activations off the ReLU kinks");
}

}  // namespace ppf::testing
