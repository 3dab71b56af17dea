#include "ppf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "ppf/errors.hpp"

namespace ppf {

namespace {

void require_same_shape(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ContractError("estimate and truth shapes differ");
    if (a.rows() == 0 || a.cols() == 0)
        throw ContractError("metrics need at least one sample and one response");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

double average_rmse(const Mat& estimate, const Mat& truth) {
    require_same_shape(estimate, truth);
    const double n = static_cast<double>(estimate.rows());
    double sum = 0.0;
    for (Eigen::Index j = 0; j < estimate.cols(); ++j)
        sum += std::sqrt((estimate.col(j) - truth.col(j)).squaredNorm() / n);
    return sum / static_cast<double>(estimate.cols());
}

double wasserstein1(const Vec& a, const Vec& b) {
    if (a.size() == 0 || b.size() == 0)
        throw ContractError("wasserstein1 needs non-empty samples");
    std::vector<double> sa(a.data(), a.data() + a.size());
    std::vector<double> sb(b.data(), b.data() + b.size());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());

    if (sa.size() == sb.size()) {
        double sum = 0.0;
        for (std::size_t i = 0; i < sa.size(); ++i) sum += std::abs(sa[i] - sb[i]);
        return sum / static_cast<double>(sa.size());
    }

    // Unequal counts: sweep the merged support accumulating |F_a - F_b| dx.
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t ia = 0, ib = 0;
    double prev = std::min(sa[0], sb[0]);
    double dist = 0.0;
    while (ia < sa.size() || ib < sb.size()) {
        double next;
        if (ia < sa.size() && (ib >= sb.size() || sa[ia] <= sb[ib]))
            next = sa[ia];
        else
            next = sb[ib];
        dist += std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb) *
                (next - prev);
        prev = next;
        while (ia < sa.size() && sa[ia] == next) ++ia;
        while (ib < sb.size() && sb[ib] == next) ++ib;
    }
    return dist;
}

AwdResult awd(const Mat& estimate, const Mat& truth) {
    require_same_shape(estimate, truth);
    AwdResult res;
    res.per_response.resize(estimate.cols());
    for (Eigen::Index j = 0; j < estimate.cols(); ++j)
        res.per_response(j) = wasserstein1(estimate.col(j), truth.col(j));
    res.average = res.per_response.mean();
    return res;
}

std::pair<double, double> moment_maes(const Mat& estimate, const Mat& truth) {
    require_same_shape(estimate, truth);
    if (estimate.rows() < 2)
        throw ContractError("std comparison needs at least two samples");
    const double n = static_cast<double>(estimate.rows());
    double e1 = 0.0, e2 = 0.0;
    for (Eigen::Index j = 0; j < estimate.cols(); ++j) {
        const double mu_e = estimate.col(j).mean();
        const double mu_t = truth.col(j).mean();
        e1 += std::abs(mu_e - mu_t);
        const double sd_e = std::sqrt(
            (estimate.col(j).array() - mu_e).square().sum() / (n - 1.0));
        const double sd_t =
            std::sqrt((truth.col(j).array() - mu_t).square().sum() / (n - 1.0));
        e2 += std::abs(sd_e - sd_t);
    }
    const double d = static_cast<double>(estimate.cols());
    return {e1 / d, e2 / d};
}

MetricsRow evaluate_pair(const Mat& estimate, const Mat& truth) {
    MetricsRow row;
    row.rmse = average_rmse(estimate, truth);
    row.awd = awd(estimate, truth).average;
    auto [e1, e2] = moment_maes(estimate, truth);
    row.e1 = e1;
    row.e2 = e2;
    return row;
}

std::string report_to_csv(const EvalReport& rep) {
    std::ostringstream os;
    os << "quantity,method,rmse,awd,e1,e2\n";
    for (const auto& q : rep.quantities) {
        for (const auto& m : rep.methods) {
            auto qi = rep.rows.find(q);
            if (qi == rep.rows.end()) continue;
            auto mi = qi->second.find(m);
            if (mi == qi->second.end()) continue;
            const MetricsRow& r = mi->second;
            os << q << "," << m << "," << fmt(r.rmse) << "," << fmt(r.awd) << ","
               << fmt(r.e1) << "," << fmt(r.e2) << "\n";
        }
    }
    return os.str();
}

std::string report_to_text(const EvalReport& rep) {
    std::ostringstream os;
    for (const auto& q : rep.quantities) {
        auto qi = rep.rows.find(q);
        if (qi == rep.rows.end()) continue;
        os << "== " << q << " ==\n";
        char line[160];
        std::snprintf(line, sizeof line, "%-8s %14s %14s %14s %14s\n", "method",
                      "avg RMSE", "AWD", "e1", "e2");
        os << line;
        for (const auto& m : rep.methods) {
            auto mi = qi->second.find(m);
            if (mi == qi->second.end()) continue;
            const MetricsRow& r = mi->second;
            std::snprintf(line, sizeof line, "%-8s %14.6e %14.6e %14.6e %14.6e\n",
                          m.c_str(), r.rmse, r.awd, r.e1, r.e2);
            os << line;
        }
        os << "\n";
    }
    return os.str();
}

std::string per_response_csv(const Vec& wd, const std::vector<std::string>& labels) {
    if (static_cast<std::size_t>(wd.size()) != labels.size())
        throw ContractError("per-response labels do not match the value count");
    std::vector<Eigen::Index> order(wd.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return wd(a) > wd(b); });
    std::ostringstream os;
    os << "response,w1\n";
    for (Eigen::Index i : order) os << labels[i] << "," << fmt(wd(i)) << "\n";
    return os.str();
}

}  // namespace ppf
