#pragma once

#include "ppf/types.hpp"

namespace ppf {

/// Reduced incidence matrix A (M x N-1) over in-service branches: +1 at the
/// from bus, -1 at the to bus, slack column deleted. Columns follow the
/// angle-vector order [generator buses; load buses], so A y_a gives branch
/// angle differences for states with the slack angle at zero.
Mat build_reduced_incidence(const NetworkCase& c);

}  // namespace ppf
