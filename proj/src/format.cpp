#include "argscape/format.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace argscape {

std::string format_double(double value) {
  if (!std::isfinite(value)) {
    if (std::isnan(value)) return "nan";
    return value > 0 ? "inf" : "-inf";
  }
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (result.ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buffer, result.ptr);
}

}  // namespace argscape
