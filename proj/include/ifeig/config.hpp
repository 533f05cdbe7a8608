#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ifeig/examples.hpp"

namespace ifeig {

/// Everything a CLI run needs. `spec.plan` holds the level plan.
struct RunConfig {
  ExampleSpec spec;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  bool record_time = true;    // false writes 0 seconds for reproducible CSVs
  int max_finest_iters = 6;   // total augmented steps allowed on the finest level
  std::vector<int> sweep;     // n_levels values for timing studies
};

/// Strict key=value parser; '#' starts a comment. Reals accept "a/b".
/// Syntax problems, duplicate and unknown keys raise ParseError with the line;
/// semantic validation failures raise ConfigError.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

// "0.25", "1e-3" or "1/16"; throws std::invalid_argument.
double parse_real(const std::string& text);

}  // namespace ifeig
