#pragma once

#include <string>

namespace dynspeckle {

/// Shortest decimal text that round-trips to `value` ("5", "0.25", "1e-07").
/// Locale independent.
std::string format_number(double value);

}  // namespace dynspeckle
