#pragma once

#include <string>
#include <vector>

#include "ifeig/multilevel.hpp"

namespace ifeig {

using Clusters = std::vector<std::vector<int>>;  // 0-based, sorted, disjoint

/// A benchmark problem: geometry, piecewise-constant coefficient and the
/// eigenvalue groups that are known to be multiple.
struct ExampleSpec {
  std::string name;
  Geometry geometry;
  double background_k = 1.0;
  std::vector<double> circle_k;  // one per circle
  Clusters clusters;
  double tol_lambda = 1e-9;
  LevelPlan plan;  // desk-scale defaults

  Coefficient coefficient() const;
  // Throws PreconditionError for non-positive coefficients or bad clusters.
  void validate() const;
};

// Two tangent disks of radius 1/3 in (0,2)^2, K = 10 inside, 1 outside.
ExampleSpec example1();
// Four disks of radius 1/4 in (0,2)^2, K = 10 inside, 1 outside.
ExampleSpec example2();
// Laplacian on (0,2)^2 without interfaces.
ExampleSpec unit_square();

// Throws PreconditionError for unknown names.
ExampleSpec example_by_name(const std::string& name);

}  // namespace ifeig
