#pragma once

#include <string>

namespace occtime {

/// Shortest text that reads back to the same double.
std::string format_double(double x);

}  // namespace occtime
