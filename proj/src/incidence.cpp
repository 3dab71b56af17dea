#include "ppf/incidence.hpp"

namespace ppf {

Mat build_reduced_incidence(const NetworkCase& c) {
    const auto& order = c.angle_order();
    std::vector<int> col_of(c.n_buses(), -1);
    for (std::size_t k = 0; k < order.size(); ++k) col_of[order[k]] = static_cast<int>(k);

    Mat a = Mat::Zero(c.n_lines(), static_cast<Eigen::Index>(order.size()));
    int row = 0;
    for (std::size_t k = 0; k < c.branches().size(); ++k) {
        if (!c.branches()[k].in_service) continue;
        const int f = c.branch_from_index(static_cast<int>(k));
        const int t = c.branch_to_index(static_cast<int>(k));
        if (col_of[f] >= 0) a(row, col_of[f]) = 1.0;
        if (col_of[t] >= 0) a(row, col_of[t]) = -1.0;
        ++row;
    }
    return a;
}

}  // namespace ppf
