#pragma once

#include <string>

namespace fracstar {

/// Shortest decimal form that round-trips to the same double. All file
/// output goes through this so reruns are bitwise identical.
std::string format_double(double v);

}  // namespace fracstar
