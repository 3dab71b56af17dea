#pragma once

#include <string>

#include "ppf/pf.hpp"
#include "ppf/sampling.hpp"
#include "ppf/types.hpp"

namespace ppf {

/// Aligned (x, y_a, V_l) rows from converged Monte Carlo solves. Angles are
/// relative to the slack (slack entry dropped), ordered [generators; loads];
/// magnitudes cover the load buses.
struct Dataset {
    Mat inputs;      // n x (N_g + 2 N_l)
    Mat angles;      // n x (N-1), radians
    Mat magnitudes;  // n x N_l, per unit
    std::array<int, 3> split{0, 0, 0};
    int rejected_count = 0;

    int n() const { return static_cast<int>(inputs.rows()); }
    int train_size() const { return split[0]; }
    int val_size() const { return split[1]; }
    int test_size() const { return split[2]; }

    // contiguous blocks, train first
    Mat train_inputs() const { return inputs.topRows(split[0]); }
    Mat val_inputs() const { return inputs.middleRows(split[0], split[1]); }
    Mat test_inputs() const { return inputs.middleRows(split[0] + split[1], split[2]); }
    Mat train_angles() const { return angles.topRows(split[0]); }
    Mat val_angles() const { return angles.middleRows(split[0], split[1]); }
    Mat test_angles() const { return angles.middleRows(split[0] + split[1], split[2]); }
    Mat train_magnitudes() const { return magnitudes.topRows(split[0]); }
    Mat val_magnitudes() const { return magnitudes.middleRows(split[0], split[1]); }
    Mat test_magnitudes() const {
        return magnitudes.middleRows(split[0] + split[1], split[2]);
    }
};

/// Solves every sample and assembles index-ordered rows; non-converged
/// samples are counted and skipped. Rejection above 5% is an error. Workers
/// never change the result, only the wall time.
Dataset build_dataset(const NetworkCase& c, const SamplingConfig& cfg,
                      const PfOptions& solver_opts = {}, int threads = 0);

/// CSV with a named header (p_g:<bus>, p_l:<bus>, q_l:<bus>, theta:<bus>,
/// vm:<bus>) plus a JSON metadata sidecar at `<path>.meta.json`. Values are
/// written with 17 significant digits so load-then-save is byte stable.
void save_dataset(const Dataset& ds, const NetworkCase& c, const std::string& path,
                  const std::string& meta_extra_json = "{}");

Dataset load_dataset(const std::string& path, const NetworkCase& c);

/// Column names in file order for the given case.
std::vector<std::string> dataset_columns(const NetworkCase& c);

}  // namespace ppf
