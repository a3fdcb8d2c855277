#pragma once

#include <string>

namespace osbm {

/// Shortest decimal representation that reads back to the same double.
/// Non-finite values print as nan, inf and -inf.
std::string format_number(double v);

}  // namespace osbm
