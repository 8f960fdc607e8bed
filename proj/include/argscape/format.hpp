#pragma once

#include <string>

namespace argscape {

/// Shortest decimal text that parses back to the same double; '.' separator
/// regardless of locale.
std::string format_double(double value);

}  // namespace argscape
