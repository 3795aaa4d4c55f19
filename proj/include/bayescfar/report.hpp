#pragma once

#include <string>

#include <json.hpp>

#include "bayescfar/simulate.hpp"

namespace bcfar {

// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

nlohmann::ordered_json to_json(const SimReport& report);
SimReport report_from_json(const nlohmann::ordered_json& json);

}  // namespace bcfar
