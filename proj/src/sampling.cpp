#include "ppf/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ppf/errors.hpp"
#include "ppf/pf.hpp"

namespace ppf {

namespace {

// Cholesky factor of the equicorrelation matrix (1-rho) I + rho 11^T,
// with one round of diagonal jitter before giving up.
Mat correlation_cholesky(int n, double rho) {
    if (rho < 0.0 || rho >= 1.0)
        throw ConfigError("correlation coefficient must lie in [0, 1)");
    Mat r = Mat::Constant(n, n, rho);
    r.diagonal().setOnes();
    Eigen::LLT<Mat> llt(r);
    if (llt.info() != Eigen::Success) {
        r.diagonal().array() += 1e-10;
        llt.compute(r);
        if (llt.info() != Eigen::Success)
            throw ConfigError("demand correlation matrix is not positive definite");
    }
    return llt.matrixL();
}

double mean_positive_demand(const NetworkCase& c) {
    double sum = 0.0;
    int cnt = 0;
    for (int i : c.pq_buses()) {
        if (c.buses()[i].p_demand > 0.0) {
            sum += c.buses()[i].p_demand;
            ++cnt;
        }
    }
    return cnt ? sum / cnt : 1.0;
}

}  // namespace

SyntheticPvSource::SyntheticPvSource(std::vector<double> capacities,
                                     std::vector<double> base_demand, double beta_a,
                                     double beta_b)
    : capacities_(std::move(capacities)),
      base_demand_(std::move(base_demand)),
      beta_a_(beta_a),
      beta_b_(beta_b) {
    if (beta_a_ <= 0.0 || beta_b_ <= 0.0)
        throw ConfigError("Beta parameters of the PV profile must be positive");
}

void SyntheticPvSource::fill(std::int64_t, rng::Engine& eng, double* out) const {
    // one time-of-day draw per sample, one cloud factor per bus
    const double tau = eng.uniform01();
    const double s = std::sin(std::numbers::pi * tau);
    const double bell = s * s;
    for (std::size_t j = 0; j < capacities_.size(); ++j) {
        const double cloud = eng.beta(beta_a_, beta_b_);
        out[j] = capacities_[j] * bell * cloud - base_demand_[j];
    }
}

CsvPvSource::CsvPvSource(const std::string& path, const std::vector<int>& expected_buses) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open PV profile file: " + path);
    std::string line;
    if (!std::getline(f, line)) throw FormatError("PV profile file is empty: " + path);
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) {
        auto colon = cell.find(':');
        if (colon == std::string::npos || cell.substr(0, colon) != "pv")
            throw FormatError("PV profile header column '" + cell +
                              "' is not of the form pv:<bus>");
        bus_ids_.push_back(std::stoi(cell.substr(colon + 1)));
    }
    if (bus_ids_ != expected_buses)
        throw FormatError("PV profile columns do not match the configured profile buses");
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != bus_ids_.size())
            throw FormatError("PV profile row " + std::to_string(rows_.size() + 1) +
                              " has " + std::to_string(row.size()) + " columns");
        rows_.push_back(std::move(row));
    }
}

void CsvPvSource::fill(std::int64_t k, rng::Engine&, double* out) const {
    if (k < 0 || k >= static_cast<std::int64_t>(rows_.size()))
        throw FormatError("PV profile file has no row for sample " + std::to_string(k));
    const auto& row = rows_[static_cast<std::size_t>(k)];
    std::copy(row.begin(), row.end(), out);
}

Sampler::Sampler(const NetworkCase& c, const SamplingConfig& cfg) : cfg_(cfg) {
    if (cfg.load_std_fraction < 0.0)
        throw ConfigError("load_std_fraction must be non-negative");
    base_x_ = case_injections(c);
    ng_ = static_cast<int>(c.pv_buses().size());
    nl_ = static_cast<int>(c.pq_buses().size());

    std::vector<bool> is_profile(nl_, false);
    std::vector<double> cap, dem;
    for (int bus : cfg.pv_buses) {
        int dense = c.bus_index(bus);
        auto it = std::find(c.pq_buses().begin(), c.pq_buses().end(), dense);
        if (it == c.pq_buses().end())
            throw ConfigError("profile bus " + std::to_string(bus) + " is not a load bus");
        int slot = static_cast<int>(it - c.pq_buses().begin());
        if (is_profile[slot])
            throw ConfigError("profile bus " + std::to_string(bus) + " listed twice");
        is_profile[slot] = true;
        profile_slots_.push_back(slot);
        const double pd = c.buses()[dense].p_demand;
        cap.push_back(cfg.pv_capacity_factor * (pd > 0.0 ? pd : mean_positive_demand(c)));
        dem.push_back(pd);
    }

    for (int s = 0; s < nl_; ++s) {
        if (is_profile[s]) continue;
        gauss_slots_.push_back(s);
        const Bus& b = c.buses()[c.pq_buses()[s]];
        mean_p_.push_back(b.p_demand);
        mean_q_.push_back(b.q_demand);
    }

    const int m = static_cast<int>(gauss_slots_.size());
    if (m > 0) {
        chol_p_ = correlation_cholesky(m, cfg.corr_p);
        chol_q_ = correlation_cholesky(m, cfg.corr_q);
    }

    if (!cfg.profile_csv.empty()) {
        source_ = std::make_unique<CsvPvSource>(cfg.profile_csv, cfg.pv_buses);
    } else if (!profile_slots_.empty()) {
        source_ = std::make_unique<SyntheticPvSource>(cap, dem, cfg.pv_beta_a,
                                                      cfg.pv_beta_b);
    }
}

Vec Sampler::sample(std::int64_t k) const {
    rng::Engine eng = rng::Engine::for_sample(cfg_.seed, static_cast<std::uint64_t>(k));
    Vec x = base_x_;

    const int m = static_cast<int>(gauss_slots_.size());
    if (m > 0) {
        Vec zp(m), zq(m);
        for (int i = 0; i < m; ++i) zp(i) = eng.normal();
        for (int i = 0; i < m; ++i) zq(i) = eng.normal();
        Vec dp = chol_p_ * zp;
        Vec dq = chol_q_ * zq;
        for (int i = 0; i < m; ++i) {
            const double sp = cfg_.load_std_fraction * std::abs(mean_p_[i]);
            const double sq = cfg_.load_std_fraction * std::abs(mean_q_[i]);
            const double pd = mean_p_[i] + sp * dp(i);
            const double qd = mean_q_[i] + sq * dq(i);
            x(ng_ + gauss_slots_[i]) = -pd;
            x(ng_ + nl_ + gauss_slots_[i]) = -qd;
        }
    }

    if (!profile_slots_.empty()) {
        std::vector<double> p(profile_slots_.size());
        source_->fill(k, eng, p.data());
        for (std::size_t j = 0; j < profile_slots_.size(); ++j)
            x(ng_ + profile_slots_[j]) = p[j];
        for (std::size_t j = 0; j < profile_slots_.size(); ++j) {
            const double u = eng.uniform_open01();
            x(ng_ + nl_ + profile_slots_[j]) = p[j] * u;
        }
    }
    return x;
}

}  // namespace ppf
