#pragma once

#include <string>

#include "ppf/types.hpp"

namespace ppf {

/// Parse MATPOWER case text (`mpc.baseMVA`, `mpc.bus`, `mpc.gen`, `mpc.branch`).
/// Only the power-flow columns are consumed; trailing columns are ignored.
NetworkCase parse_case(const std::string& text);

/// Read and parse a case file from disk.
NetworkCase load_case(const std::string& path);

/// Serialize the supported column subset back to MATPOWER text. Parsing the
/// result reproduces the same NetworkCase.
std::string serialize_case(const NetworkCase& c, const std::string& name = "mpc_case");

}  // namespace ppf
