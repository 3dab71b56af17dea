#pragma once

#include <map>
#include <string>
#include <vector>

#include "ppf/types.hpp"

namespace ppf {

/// Mean over columns of the per-column root mean square error.
double average_rmse(const Mat& estimate, const Mat& truth);

/// First-order Wasserstein distance between two one-dimensional empirical
/// distributions. Equal sample counts reduce to the sorted pairing mean;
/// unequal counts integrate |CDF_a - CDF_b| over the merged support.
double wasserstein1(const Vec& a, const Vec& b);

struct AwdResult {
    double average = 0.0;
    Vec per_response;
};

/// Column-wise W1 between estimate and truth, averaged over columns.
AwdResult awd(const Mat& estimate, const Mat& truth);

/// Mean absolute errors of the per-column means (e1) and sample stds (e2,
/// divisor n-1).
std::pair<double, double> moment_maes(const Mat& estimate, const Mat& truth);

/// All four metric values for one quantity and one method.
struct MetricsRow {
    double rmse = 0.0;
    double awd = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;
};

MetricsRow evaluate_pair(const Mat& estimate, const Mat& truth);

/// quantity -> method -> metric values, in insertion order of quantities.
struct EvalReport {
    std::vector<std::string> quantities;
    std::vector<std::string> methods;
    std::map<std::string, std::map<std::string, MetricsRow>> rows;
    // per-response W1 vectors for figure-style output, keyed quantity/method
    std::map<std::string, std::map<std::string, Vec>> per_response_wd;
};

std::string report_to_csv(const EvalReport& rep);
std::string report_to_text(const EvalReport& rep);

/// Per-response W1 values with labels, sorted descending, as CSV text.
std::string per_response_csv(const Vec& wd, const std::vector<std::string>& labels);

}  // namespace ppf
