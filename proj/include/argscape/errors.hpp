#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace argscape {

// Invalid arguments are reported with std::invalid_argument throughout; the
// types below cover the remaining failure classes.

/// An instance is outside what an exact algorithm supports (size limits,
/// non-uniform weights, ...).
class unsupported_instance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exact computation would exceed its work budget.
class resource_limit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input; `position` is the byte offset of the problem.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace argscape

namespace argscape {

/// Experiment name not in the registry.
class unknown_experiment : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Experiment parameters rejected by the experiment's schema.
class invalid_parameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Output could not be written.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace argscape
