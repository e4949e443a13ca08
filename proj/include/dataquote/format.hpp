#pragma once

#include <string>

namespace dq {

// Shortest decimal that round-trips, '.' separator, no grouping.
std::string format_number(double v);

}  // namespace dq
