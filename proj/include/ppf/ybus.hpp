#pragma once

#include "ppf/types.hpp"

namespace ppf {

/// Standard bus-admittance construction: series admittance per branch, half
/// of the line charging on each terminal, bus shunts on the diagonal, taps
/// and phase shifts through the two-port transformer model. Out-of-service
/// branches contribute nothing.
AdmittanceMatrix build_ybus(const NetworkCase& c);

}  // namespace ppf
