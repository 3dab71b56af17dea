#include "ppf/types.hpp"

#include <set>

namespace ppf {

NetworkCase::NetworkCase(double base_mva, std::vector<Bus> buses, std::vector<Gen> gens,
                         std::vector<Branch> branches)
    : base_mva_(base_mva),
      buses_(std::move(buses)),
      gens_(std::move(gens)),
      branches_(std::move(branches)) {
    if (base_mva_ <= 0.0) throw ValidationError("baseMVA must be positive");

    for (int i = 0; i < n_buses(); ++i) {
        const Bus& b = buses_[i];
        if (b.id <= 0) throw ValidationError("bus ids must be positive integers");
        if (!index_.emplace(b.id, i).second)
            throw ValidationError("duplicate bus id " + std::to_string(b.id));
        if (b.v_mag_init <= 0.0)
            throw ValidationError("bus " + std::to_string(b.id) +
                                  ": initial voltage magnitude must be positive");
        if (b.kind == BusKind::Slack) {
            if (slack_ >= 0) throw ValidationError("more than one slack bus");
            slack_ = i;
        }
    }
    if (slack_ < 0) throw ValidationError("case has no slack bus");

    held_v_.resize(buses_.size());
    gen_p_.assign(buses_.size(), 0.0);
    for (int i = 0; i < n_buses(); ++i) held_v_[i] = buses_[i].v_mag_init;
    std::set<int> seen_gen_bus;
    for (const Gen& g : gens_) {
        auto it = index_.find(g.bus_id);
        if (it == index_.end())
            throw ValidationError("generator references missing bus " +
                                  std::to_string(g.bus_id));
        const Bus& b = buses_[it->second];
        if (b.kind == BusKind::Load)
            throw ValidationError("generator attached to load bus " +
                                  std::to_string(g.bus_id));
        if (!g.in_service) continue;
        gen_p_[it->second] += g.p_out;
        // first in-service generator at a bus sets the voltage target
        if (seen_gen_bus.insert(g.bus_id).second) held_v_[it->second] = g.v_setpoint;
    }

    from_idx_.reserve(branches_.size());
    to_idx_.reserve(branches_.size());
    for (const Branch& br : branches_) {
        auto f = index_.find(br.from_bus);
        auto t = index_.find(br.to_bus);
        if (f == index_.end() || t == index_.end())
            throw ValidationError("branch " + std::to_string(br.from_bus) + "-" +
                                  std::to_string(br.to_bus) +
                                  " references a missing bus");
        if (br.tap <= 0.0)
            throw ValidationError("branch " + std::to_string(br.from_bus) + "-" +
                                  std::to_string(br.to_bus) + ": tap must be positive");
        if (br.in_service && br.r == 0.0 && br.x == 0.0)
            throw ValidationError("branch " + std::to_string(br.from_bus) + "-" +
                                  std::to_string(br.to_bus) +
                                  " in service with zero series impedance");
        from_idx_.push_back(f->second);
        to_idx_.push_back(t->second);
        if (br.in_service) ++n_lines_;
    }

    for (int i = 0; i < n_buses(); ++i) {
        if (buses_[i].kind == BusKind::Generator) pv_.push_back(i);
        if (buses_[i].kind == BusKind::Load) pq_.push_back(i);
    }
    angle_order_ = pv_;
    angle_order_.insert(angle_order_.end(), pq_.begin(), pq_.end());
}

int NetworkCase::bus_index(int external_id) const {
    auto it = index_.find(external_id);
    if (it == index_.end())
        throw ValidationError("unknown bus id " + std::to_string(external_id));
    return it->second;
}

}  // namespace ppf
