#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aqss {

// Malformed textual input. position() is a 0-based character offset.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

// A coalition asked for something only an authorized coalition may do (or the
// reverse, e.g. a leakage report for an authorized coalition).
class AuthorizationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A simulated register would exceed the configured support cap.
class CapacityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A plan cannot be realized under the requested mode.
class PlanError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace aqss
