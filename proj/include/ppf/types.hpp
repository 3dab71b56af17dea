#pragma once

#include <Eigen/Dense>
#include <string>
#include <unordered_map>
#include <vector>

#include "ppf/errors.hpp"

namespace ppf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class BusKind { Slack, Generator, Load };

struct Bus {
    int id = 0;  // external bus number, preserved for reporting
    BusKind kind = BusKind::Load;
    double p_demand = 0.0;  // per unit on the system base
    double q_demand = 0.0;
    double gs_shunt = 0.0;
    double bs_shunt = 0.0;
    double base_kv = 0.0;
    double v_mag_init = 1.0;  // per unit
    double v_ang_init = 0.0;  // radians
};

struct Gen {
    int bus_id = 0;
    double p_out = 0.0;  // per unit
    double q_out = 0.0;
    double v_setpoint = 1.0;
    bool in_service = true;
};

struct Branch {
    int from_bus = 0;
    int to_bus = 0;
    double r = 0.0;
    double x = 0.0;
    double b_charge = 0.0;  // total line-charging susceptance
    double tap = 1.0;       // off-nominal turns ratio
    double shift = 0.0;     // radians
    bool in_service = true;
};

/// Parsed grid model. Immutable after construction; dense internal indices
/// are 0..N-1 in file order, external numbers stay on Bus::id.
class NetworkCase {
  public:
    NetworkCase(double base_mva, std::vector<Bus> buses, std::vector<Gen> gens,
                std::vector<Branch> branches);

    double base_mva() const { return base_mva_; }
    const std::vector<Bus>& buses() const { return buses_; }
    const std::vector<Gen>& gens() const { return gens_; }
    const std::vector<Branch>& branches() const { return branches_; }

    int n_buses() const { return static_cast<int>(buses_.size()); }
    /// M: number of in-service branches.
    int n_lines() const { return n_lines_; }

    int slack() const { return slack_; }
    /// Dense indices of PV buses, ascending.
    const std::vector<int>& pv_buses() const { return pv_; }
    /// Dense indices of PQ buses, ascending.
    const std::vector<int>& pq_buses() const { return pq_; }
    /// Non-slack dense indices in the angle-vector order [generators; loads].
    const std::vector<int>& angle_order() const { return angle_order_; }

    int bus_index(int external_id) const;
    int branch_from_index(int branch) const { return from_idx_[branch]; }
    int branch_to_index(int branch) const { return to_idx_[branch]; }

    /// Voltage magnitude held at a bus: generator setpoint where one is in
    /// service, otherwise the bus initial value.
    double held_voltage(int bus_index) const { return held_v_[bus_index]; }

    /// Total in-service generator active output at a bus, per unit.
    double gen_p(int bus_index) const { return gen_p_[bus_index]; }

  private:
    double base_mva_;
    std::vector<Bus> buses_;
    std::vector<Gen> gens_;
    std::vector<Branch> branches_;
    std::unordered_map<int, int> index_;
    std::vector<int> from_idx_, to_idx_;
    std::vector<int> pv_, pq_, angle_order_;
    std::vector<double> held_v_, gen_p_;
    int slack_ = -1;
    int n_lines_ = 0;
};

/// Nodal admittance matrix Y = g + jb, dense at desk scale.
struct AdmittanceMatrix {
    Mat g;
    Mat b;
};

}  // namespace ppf
