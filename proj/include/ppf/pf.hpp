#pragma once

#include <memory>
#include <optional>

#include "ppf/types.hpp"

namespace ppf {

/// Polar voltage state over all buses. Slack entries are pinned to the case
/// values and generator-bus magnitudes to their setpoints.
struct PfState {
    Vec v_mag;  // per unit
    Vec v_ang;  // radians
};

struct PfSolution {
    PfState state;
    int iterations = 0;
    double max_mismatch = 0.0;
    bool converged = false;
};

struct PfOptions {
    double tol = 1e-8;  // infinity norm of the mismatch, per unit
    int max_iter = 20;
};

/// From-side and to-side branch flows over the M in-service branches,
/// ordered as they appear in the case.
struct BranchFlows {
    Vec p_from, q_from, p_to, q_to;
};

/// Linear-solve backend for the Newton correction; dense LU by default so a
/// sparse factorization can be swapped in for larger systems.
class LinearSolver {
  public:
    virtual ~LinearSolver() = default;
    virtual Vec solve(const Mat& a, const Vec& rhs) const = 0;
};

class DenseLuSolver final : public LinearSolver {
  public:
    Vec solve(const Mat& a, const Vec& rhs) const override;
};

/// V = 1 (loads) or the held setpoint (generators, slack); all angles at the
/// slack angle so every angle difference starts at zero.
PfState flat_start(const NetworkCase& c);

/// Specified net injections [P_g; P_l; Q_l] taken from the case data.
Vec case_injections(const NetworkCase& c);

/// Power-balance residuals [dP at PV and PQ buses; dQ at PQ buses], bus index
/// ascending within each block. `x` holds specified injections in the
/// [P_g; P_l; Q_l] layout.
Vec mismatch(const NetworkCase& c, const AdmittanceMatrix& y, const PfState& state,
             const Vec& x);

/// Analytic polar-form Jacobian of the calculated injections with respect to
/// [theta at non-slack buses; V at PQ buses], rows matching mismatch().
Mat pf_jacobian(const NetworkCase& c, const AdmittanceMatrix& y, const PfState& state);

/// Full Newton-Raphson solve. Reports non-convergence in the result rather
/// than throwing; throws SolverError only on singular Jacobians or non-finite
/// states.
PfSolution solve_pf(const NetworkCase& c, const AdmittanceMatrix& y, const Vec& x,
                    const PfOptions& opts = {},
                    const PfState* warm_start = nullptr,
                    const LinearSolver* solver = nullptr);

/// Branch flows from a voltage state via the two-port branch model; reduces
/// exactly to the tap-free flow equations when tap = 1 and shift = 0.
BranchFlows branch_flows(const NetworkCase& c, const PfState& state);

/// Net injections implied by a voltage state, in the [P_g; P_l; Q_l] layout.
/// Inverse of the dataset mapping: lets a stored row be checked for nodal
/// balance.
Vec injections_from_state(const NetworkCase& c, const AdmittanceMatrix& y,
                          const PfState& state);

}  // namespace ppf
