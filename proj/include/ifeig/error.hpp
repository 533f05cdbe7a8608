#pragma once

#include <stdexcept>
#include <string>

namespace ifeig {

// Violated precondition on caller input.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Interface fitting or mesh validity failure.
struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed mesh or config file; line is 1-based, 0 when not tied to a line.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t line_no)
      : std::runtime_error(line_no ? "line " + std::to_string(line_no) + ": " + what : what),
        line(line_no) {}
  std::size_t line;
};

// Semantic config validation failure.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical breakdown: non-SPD operator, lost eigenvector, degenerate correction.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ifeig
