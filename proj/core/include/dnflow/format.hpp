#pragma once

#include <string>

namespace dnflow {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

}  // namespace dnflow
