#pragma once

#include "ct2bc/attack.hpp"

#include <string>

namespace ct2bc::attack {

// One JSON object per line; field names are documented in docs/formats.md.
std::string to_json_line(const BindingReport& report);
std::string to_json_line(const ConcealmentReport& report);
std::string to_json_line(const AbortBiasReport& report);

} // namespace ct2bc::attack
