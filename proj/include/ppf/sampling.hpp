#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "ppf/rng.hpp"
#include "ppf/types.hpp"

namespace ppf {

/// Random-injection model: a handful of profile-driven buses plus correlated
/// Gaussian demands everywhere else.
struct SamplingConfig {
    std::vector<int> pv_buses;        // external ids of profile-driven load buses
    double load_std_fraction = 0.01;  // demand std as a fraction of the mean
    double corr_p = 0.2;              // equicorrelation of active demands
    double corr_q = 0.8;              // equicorrelation of reactive demands
    std::uint64_t seed = 0;
    int sample_count = 0;
    std::array<int, 3> split{0, 0, 0};  // train / validation / test sizes

    // synthetic profile source: capacity * bell(tau) * Beta(a,b) - base demand
    double pv_capacity_factor = 2.0;
    double pv_beta_a = 2.0;
    double pv_beta_b = 2.0;
    std::string profile_csv;  // when set, per-sample injections come from file
};

/// Per-sample net active injections for the profile buses.
class PvProfileSource {
  public:
    virtual ~PvProfileSource() = default;
    virtual int columns() const = 0;
    /// Fills `out[0..columns)` for sample `k`; `eng` is the sample's stream.
    virtual void fill(std::int64_t k, rng::Engine& eng, double* out) const = 0;
};

/// Clear-sky bell curve at a uniformly drawn time of day, scaled per bus by a
/// Beta-distributed cloud factor, net of the bus base demand.
class SyntheticPvSource final : public PvProfileSource {
  public:
    SyntheticPvSource(std::vector<double> capacities, std::vector<double> base_demand,
                      double beta_a, double beta_b);
    int columns() const override { return static_cast<int>(capacities_.size()); }
    void fill(std::int64_t k, rng::Engine& eng, double* out) const override;

  private:
    std::vector<double> capacities_;
    std::vector<double> base_demand_;
    double beta_a_, beta_b_;
};

/// User-supplied per-sample injections, one column per profile bus.
class CsvPvSource final : public PvProfileSource {
  public:
    CsvPvSource(const std::string& path, const std::vector<int>& expected_buses);
    int columns() const override { return static_cast<int>(bus_ids_.size()); }
    void fill(std::int64_t k, rng::Engine& eng, double* out) const override;

  private:
    std::vector<int> bus_ids_;
    std::vector<std::vector<double>> rows_;
};

/// Draws injection samples per the configured model. Sample k is a pure
/// function of (seed, k), so generation parallelizes without coordination.
class Sampler {
  public:
    Sampler(const NetworkCase& c, const SamplingConfig& cfg);

    /// Injection vector [P_g; P_l; Q_l] for sample index k.
    Vec sample(std::int64_t k) const;

    int dim() const { return static_cast<int>(base_x_.size()); }
    const std::vector<int>& profile_slots() const { return profile_slots_; }

  private:
    SamplingConfig cfg_;
    Vec base_x_;                     // case injections, the Gaussian means
    std::vector<int> gauss_slots_;   // x-vector slots of Gaussian P entries
    std::vector<int> profile_slots_; // x-vector slots of profile P entries
    std::vector<double> mean_p_, mean_q_;  // demands (positive = consumption)
    Mat chol_p_, chol_q_;            // Cholesky factors of the correlations
    std::unique_ptr<PvProfileSource> source_;
    int ng_ = 0, nl_ = 0;
};

}  // namespace ppf
