#pragma once

// JSON conversions shared by the circuit and protocol text formats.

#include "locc/circuit.h"

#include <json.hpp>

namespace locc::detail {

nlohmann::json circuit_to_json(const Circuit& circuit);
Circuit circuit_from_json(const nlohmann::json& j);

}  // namespace locc::detail
